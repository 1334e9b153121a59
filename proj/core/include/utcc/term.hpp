#pragma once

/*
 * First-order terms over a signature, plus the bounded term universes used
 * by quantifier and abstraction enumeration.
 *
 * Terms are immutable trees shared through shared_ptr; equality is
 * structural with a memoized hash. Whether an identifier is a variable is
 * decided by the signature: symbols not declared as constants or functions
 * are variables.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace utcc {

class Term;
using TermVec = std::vector<Term>;
using VarSet = std::set<std::string>;
using Subst = std::map<std::string, Term>;

class Term {
 public:
  Term() = default;

  static Term var(const std::string& name);
  static Term app(const std::string& sym, TermVec args = {});

  bool valid() const { return node_ != nullptr; }
  bool is_var() const { return node_->is_var; }
  const std::string& sym() const { return node_->sym; }
  const TermVec& args() const { return node_->args; }
  std::size_t hash() const { return node_->hash; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  // Total order: by hash class first, then structurally. Deterministic
  // across runs (no pointer values involved).
  bool operator<(const Term& o) const { return compare(o) < 0; }
  int compare(const Term& o) const;

  void collect_vars(VarSet& out) const;
  VarSet vars() const;
  bool contains_var(const std::string& v) const;
  // Applies a substitution; unmapped variables are left in place.
  Term apply(const Subst& s) const;
  void collect_subterms(std::set<Term>& out) const;

  std::string str() const;

 private:
  struct Node {
    bool is_var;
    std::string sym;
    TermVec args;
    std::size_t hash;
  };
  std::shared_ptr<const Node> node_;
};

// One-way matching: pattern variables listed in `holes` may be bound, all
// other symbols (including free variables) must match literally. Bindings
// already present in `binding` are respected. Returns false and leaves
// `binding` unspecified on mismatch.
bool match_term(const Term& pattern, const Term& subject, const VarSet& holes,
                Subst& binding);

struct Signature {
  std::set<std::string> constants;
  std::map<std::string, int> functions;   // name -> arity
  std::map<std::string, int> predicates;  // name -> arity

  bool is_constant(const std::string& s) const { return constants.count(s) > 0; }
  bool is_function(const std::string& s) const { return functions.count(s) > 0; }
  bool is_predicate(const std::string& s) const { return predicates.count(s) > 0; }
  // A symbol that is neither a declared constant nor function is a variable.
  bool is_variable(const std::string& s) const {
    return !is_constant(s) && !is_function(s) && !is_predicate(s);
  }
  void merge(const Signature& other);
};

// A finite set of terms closed under subterms. Enumeration for hidden
// variables, diagonal elements and abstractions ranges over this set.
class TermUniverse {
 public:
  TermUniverse() = default;

  void add(const Term& t);            // inserts t and all of its subterms
  void add_all(const TermVec& ts);

  bool contains(const Term& t) const { return index_.count(t) > 0; }
  const TermVec& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // All terms whose variables avoid `avoid` (admissibility filter).
  TermVec admissible_for(const VarSet& avoid) const;

  // Generates all terms over the signature up to the given constructor
  // depth, using the supplied variables as leaves. Intended for small
  // signatures only; `max_terms` guards against blow-ups.
  static TermUniverse generate(const Signature& sig, const std::vector<std::string>& vars,
                               int depth, std::size_t max_terms = 200000);

 private:
  TermVec terms_;
  std::set<Term> index_;
};

// Deterministic fresh-name source. Derived names keep the base readable:
// base "m" yields m'1, m'2, ... so runs are byte-reproducible.
class FreshNames {
 public:
  std::string fresh(const std::string& base);
  void reset() { counter_ = 0; }

 private:
  std::uint64_t counter_ = 0;
};

}  // namespace utcc
