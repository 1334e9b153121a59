#pragma once

/*
 * Equation-based constraint systems: constraints are formulas
 *
 *     exists y1..ym . (x1 = t1 /\ ... /\ xn = tn /\ p1(..) /\ ... /\ pk(..))
 *
 * kept in solved normal form (equations oriented and fully substituted,
 * bound variables renamed apart with a reserved prefix). This single
 * carrier implements both the Herbrand system over a bounded term universe
 * and the cryptographic term system; the latter plugs in a term policy
 * that cuts messages at depth kappa.
 *
 * Entailment is decided by matching the goal's atoms against the solved
 * form modulo the equality theory, searching bounded witnesses for the
 * goal's existential variables. This is the standard decidable fragment;
 * it is exact for the conjunctions of atoms used by programs.
 */

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "utcc/constraint.hpp"

namespace utcc {

struct PredAtom {
  std::string pred;
  TermVec args;

  bool operator==(const PredAtom& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const PredAtom& o) const;
  std::string str() const;
};

// Parsed but not yet solved conjunction.
struct RawFormula {
  bool is_false = false;
  std::vector<std::string> bound;
  std::vector<std::pair<Term, Term>> equations;
  std::vector<PredAtom> preds;
};

struct FormulaData : ConstraintData {
  bool is_false = false;
  std::vector<std::string> bound;      // canonical names _B1, _B2, ...
  std::map<std::string, Term> eqs;     // solved: domain vars do not occur in any rhs
  std::vector<PredAtom> preds;         // sorted, deduplicated, substituted
  std::string cached_key;              // canonical print, built once
  std::size_t key_hash = 0;            // hash of cached_key

  bool has_pred(const PredAtom& a) const;
};

// Hook for abstract term systems (depth-kappa cut with an absorbing m_top).
struct TermPolicy {
  virtual ~TermPolicy() = default;
  virtual Term normalize(const Term& t) const { return t; }
  virtual bool absorbing(const Term& t) const { (void)t; return false; }
};

class EquationSystem : public ConstraintSystem {
 public:
  EquationSystem(std::string name, Signature sig, std::vector<std::string> pool,
                 TermUniverse universe, std::shared_ptr<const TermPolicy> policy = nullptr);

  std::string name() const override { return name_; }
  const Signature& signature() const { return sig_; }
  const Signature* term_signature() const override { return &sig_; }

  // When set, assignment search (abstractions, quantifier witnesses) only
  // binds variables to members of the declared term universe. This is the
  // bounded-instantiation semantics every analysis over this system uses.
  void set_restrict_instantiation(bool r) { restrict_instantiation_ = r; }
  bool restricted_instantiation() const { return restrict_instantiation_; }
  const std::vector<std::string>& pool() const override { return pool_; }
  const TermUniverse* universe() const override { return &universe_; }
  void extend_universe(const TermVec& ts) { universe_.add_all(ts); }
  void set_pool(std::vector<std::string> pool) { pool_ = std::move(pool); }

  Constraint true_c() const override;
  Constraint false_c() const override;

  Constraint lub(const Constraint& c, const Constraint& d) const override;
  bool entails(const Constraint& d, const Constraint& c) const override;
  Constraint hide(const std::vector<std::string>& xs, const Constraint& c) const override;
  Constraint diag(const std::vector<std::string>& xs, const TermVec& ts) const override;
  VarSet free_vars(const Constraint& c) const override;
  bool is_false(const Constraint& c) const override;
  Constraint normal_form(const Constraint& c) const override;

  std::string print(const Constraint& c) const override;
  std::size_t key_hash(const Constraint& c) const override { return payload(c).key_hash; }
  Constraint parse_constraint(const std::string& text) const override;

  std::vector<Subst> entail_assignments(const Constraint& d, const Constraint& goal,
                                        const VarSet& holes) const override;

  std::optional<std::pair<Constraint, std::vector<std::string>>> open_existentials(
      const Constraint& c, FreshNames& names) const override;

  // Solved form of a raw conjunction (decomposition, occurs check,
  // orientation, substitution); clashes and occurs failures yield false.
  Constraint solve(const RawFormula& raw) const;
  Constraint from_atoms(const std::vector<std::string>& bound,
                        const std::vector<std::pair<Term, Term>>& eqs,
                        const std::vector<PredAtom>& preds) const;
  Constraint atom(const std::string& pred, TermVec args) const;
  Constraint equation(const Term& lhs, const Term& rhs) const;

  const FormulaData& payload(const Constraint& c) const;

  // Entailment that refuses to look at absorbing terms; used by the
  // certified abstract-to-concrete entailment of the crypto domain.
  bool entails_strict(const Constraint& d, const Constraint& c) const;

  // Rebuilds a constraint of this system from another equation system's
  // payload, normalizing terms under this system's policy.
  Constraint import(const Constraint& c) const;

 private:
  struct SolveCtx;

  Constraint make(std::shared_ptr<const FormulaData> d) const { return Constraint(this, std::move(d)); }
  Constraint make_false() const;
  std::shared_ptr<FormulaData> canonicalize(FormulaData d) const;
  bool search_goals(const FormulaData& d, const FormulaData& goal, const VarSet& holes,
                    bool strict, bool enumerate_unbound, std::size_t cap,
                    std::vector<Subst>* out) const;

  std::string name_;
  Signature sig_;
  std::vector<std::string> pool_;
  TermUniverse universe_;
  std::shared_ptr<const TermPolicy> policy_;
  bool restrict_instantiation_ = false;
};

}  // namespace utcc
