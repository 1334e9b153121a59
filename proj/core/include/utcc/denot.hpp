#pragma once

/*
 * Denotational semantics over bounded constraint sequences, concrete and
 * abstract. Denotations of the infinite-carrier systems are exposed as
 * membership predicates; over finite carriers they can be materialized
 * and the fixpoint iterated explicitly.
 *
 * The least fixpoint is evaluated by level-indexed unfolding: a call at
 * level 0 denotes the full set (the bottom of the semantic domain), and a
 * call at level n+1 unfolds its body at level n. With next-guarded
 * recursion and the k-cut, memberships of length-k sequences stabilize
 * within (k+1) unfoldings per declaration, which the engine can assert.
 */

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "utcc/ast.hpp"
#include "utcc/description.hpp"
#include "utcc/seqset.hpp"

namespace utcc {

struct DenoteOptions {
  std::size_t k = 2;
  // Fig. 3 equations: guards decided by abs_entails_conc against abstract
  // sequence elements, tells lifted through alpha, unless denotes the full
  // set. Requires desc.
  bool abstract_mode = false;
  const Description* desc = nullptr;
  // Interpret local binders as (deterministically renamed) pool variables
  // instead of searching sequence variants. Sound and complete for queries
  // over global variables only; used by the analyses.
  bool open_locals = false;
  // Re-evaluate top-level memberships one level deeper and fail loudly on
  // disagreement (the fixpoint stabilization invariant).
  bool check_stabilization = false;
  // Internal: resolve calls against a fixed interpretation instead of
  // unfolding (used by the materialized Kleene iteration).
  const std::map<std::string, SeqSet>* call_table = nullptr;
};

class DenoteEngine {
 public:
  // `target` is the system sequence elements live in: the program's own
  // system in concrete mode, the description's abstract system otherwise.
  DenoteEngine(const Program& prog, const ConstraintSystem& target, DenoteOptions opt);

  // s in [[p]] at the least fixpoint of the declarations.
  bool member(const ConstraintSeq& s, const Process& p);
  bool member_of_main(const ConstraintSeq& s);
  bool member_of_call(const ConstraintSeq& s, const std::string& name, const TermVec& args);

  const Program& program() const { return prog_; }
  const ConstraintSystem& target() const { return target_; }
  const DenoteOptions& options() const { return opt_; }
  const Process& prepared_main() const { return prog_.main; }

 private:
  friend SeqSet denotation(std::shared_ptr<DenoteEngine>, const Process&,
                           std::vector<Constraint>);

  bool member_rec(const ConstraintSeq& s, const Process& p, int level);
  bool ask_member(const ConstraintSeq& s, const Constraint& guard, const Process& body,
                  int level);
  bool abs_member(const ConstraintSeq& s, const Process& abs_node, int level);
  bool local_member(const ConstraintSeq& s, const Process& local_node, int level);
  bool guard_holds(const Constraint& element, const Constraint& guard) const;
  Constraint lift(const Constraint& c);
  const Process& call_instance(const std::string& name, const TermVec& args);
  std::vector<Subst> guard_candidates(const Constraint& head, const Constraint& guard,
                                      const std::vector<std::string>& binders);

  Program prog_;  // binders renamed apart, deterministically
  const ConstraintSystem& target_;
  DenoteOptions opt_;
  FreshNames names_;
  int top_level_;

  std::recursive_mutex mutex_;
  std::map<std::string, bool> memo_;
  std::map<std::string, Process> instances_;
  std::map<std::string, Constraint> lift_cache_;
  std::map<std::string, Process> subst_cache_;
  std::map<std::string, std::vector<Subst>> cand_cache_;
  std::map<const void*, bool> callfree_;
};

std::shared_ptr<DenoteEngine> make_denote_engine(const Program& prog,
                                                 const ConstraintSystem& target,
                                                 DenoteOptions opt);

// The denotation of p as a SeqSet predicate backed by the engine.
SeqSet denotation(std::shared_ptr<DenoteEngine> engine, const Process& p,
                  std::vector<Constraint> elements = {});

// Materialized Kleene iteration over an enumerable carrier: maps each
// declaration name to its explicit denotation. Asserts stabilization
// within k+1 iterations. Declaration parameters must be inert in the
// carrier (finite lattices).
std::map<std::string, SeqSet> td_fixpoint_explicit(const Program& prog,
                                                   const ConstraintSystem& sys, std::size_t k,
                                                   const std::vector<Constraint>& elements,
                                                   const DenoteOptions& opt);

// No unless occurs, transitively through calls, under a local binder.
bool check_locally_independent(const Program& prog);

// Name of the instance-fresh local variable for binder b entered at the
// given time offset (1-based): b'offset.
std::string local_instance_name(const std::string& binder, std::size_t offset);

// All variable names a length-k analysis can mention: free and binder
// variables of the program plus the offset-indexed local instance names.
// With tells_only, guard-only variables (synchronization streams) are
// omitted; the groundness truth tables use that trimmed pool.
std::vector<std::string> collect_pool(const Program& prog, std::size_t k,
                                      bool tells_only = false);

}  // namespace utcc
