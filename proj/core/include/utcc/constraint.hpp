#pragma once

/*
 * Cylindric constraint systems: a lattice of constraints with lub,
 * entailment, hiding (cylindrification) and diagonal elements, as used by
 * both the operational and the denotational semantics.
 *
 * Constraints are immutable values tagged with the system they belong to;
 * all operations are pure, so sharing across threads is safe. Mixing
 * operands from different systems is a usage error.
 */

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "utcc/errors.hpp"
#include "utcc/term.hpp"

namespace utcc {

struct ConstraintData {
  virtual ~ConstraintData() = default;
};

class ConstraintSystem;

class Constraint {
 public:
  Constraint() = default;
  Constraint(const ConstraintSystem* sys, std::shared_ptr<const ConstraintData> data)
      : sys_(sys), data_(std::move(data)) {}

  bool valid() const { return sys_ != nullptr; }
  const ConstraintSystem* system() const { return sys_; }
  const ConstraintData* data() const { return data_.get(); }

  template <typename T>
  const T& as() const {
    const T* p = dynamic_cast<const T*>(data_.get());
    check_internal(p != nullptr, "constraint payload type mismatch");
    return *p;
  }

  std::string str() const;

  bool operator==(const Constraint& o) const;
  bool operator<(const Constraint& o) const;

 private:
  const ConstraintSystem* sys_ = nullptr;
  std::shared_ptr<const ConstraintData> data_;
};

class ConstraintSystem {
 public:
  virtual ~ConstraintSystem() = default;

  virtual std::string name() const = 0;

  virtual Constraint true_c() const = 0;
  virtual Constraint false_c() const = 0;

  virtual Constraint lub(const Constraint& c, const Constraint& d) const = 0;
  // entails(d, c): c can be deduced from d, i.e. c <= d in the lattice.
  virtual bool entails(const Constraint& d, const Constraint& c) const = 0;
  // Cylindrification over each variable in xs.
  virtual Constraint hide(const std::vector<std::string>& xs, const Constraint& c) const = 0;
  // Diagonal element \bigsqcup x_i = t_i; empty vectors give true.
  virtual Constraint diag(const std::vector<std::string>& xs, const TermVec& ts) const = 0;

  virtual VarSet free_vars(const Constraint& c) const = 0;
  virtual Constraint normal_form(const Constraint& c) const { return c; }

  virtual bool is_false(const Constraint& c) const { return equivalent(c, false_c()); }
  bool equivalent(const Constraint& c, const Constraint& d) const {
    return entails(c, d) && entails(d, c);
  }

  // c[ts/xs] = exists xs (c lub d_xs_ts). Requires adm(xs, ts).
  Constraint subst(const Constraint& c, const std::vector<std::string>& xs,
                   const TermVec& ts) const;

  // Deterministic key used for canonical ordering, set membership and
  // serialization. Equivalent-but-distinct constraints may have different
  // keys; normal forms of equal payloads agree.
  virtual std::string key(const Constraint& c) const { return c.str(); }
  // Hash of the key; memo identity for large constraints.
  virtual std::size_t key_hash(const Constraint& c) const {
    return std::hash<std::string>{}(key(c));
  }
  virtual std::string print(const Constraint& c) const = 0;
  virtual Constraint parse_constraint(const std::string& text) const = 0;

  // Every element of a finite carrier, in a canonical order. nullopt when
  // the carrier is not enumerable (equation-based systems).
  virtual std::optional<std::vector<Constraint>> enumerate() const { return std::nullopt; }

  // The declared variable pool and term universe, when the system has them.
  virtual const std::vector<std::string>& pool() const { return empty_pool_; }
  virtual const TermUniverse* universe() const { return nullptr; }
  // Signature used to parse terms (call arguments); null for systems
  // without a term language.
  virtual const Signature* term_signature() const { return nullptr; }

  // Set of assignments theta over `holes` such that d entails goal[theta].
  // Used by the SOS rule for abstractions and by the forall operator on
  // sequence sets; systems without terms return the empty set unless the
  // goal is entailed outright (then the empty assignment).
  virtual std::vector<Subst> entail_assignments(const Constraint& d, const Constraint& goal,
                                                const VarSet& holes) const;

  // Opens the outer existential blocks of c, naming the opened variables
  // with `names`. Returns nullopt when there is nothing to open. First
  // element of the pair is the opened constraint, second the opened names.
  virtual std::optional<std::pair<Constraint, std::vector<std::string>>> open_existentials(
      const Constraint& c, FreshNames& names) const {
    (void)c;
    (void)names;
    return std::nullopt;
  }

 protected:
  void check_same_system(const Constraint& c) const {
    check_usage(c.system() == this, "constraint belongs to a different system");
  }

 private:
  static const std::vector<std::string> empty_pool_;
};

}  // namespace utcc
