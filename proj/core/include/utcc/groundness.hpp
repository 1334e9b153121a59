#pragma once

/*
 * Groundness and type-dependency domains for the Herbrand system with
 * list constructors:
 *
 *  - Pos: positive propositional formulas over a fixed variable pool,
 *    represented exactly by their model sets (truth-table bitsets).
 *  - Type dependencies: conjunctions of nil(x), list(x), list(x,xs)
 *    closed under nil(x) -> list(x) and list(x,xs) /\ list(xs) -> list(x).
 *  - Their reduced product (the groundness-type system).
 *
 * One system class covers both the plain Pos domain and the product; the
 * type component is simply disabled for the former.
 */

#include <cstdint>
#include <memory>
#include <set>

#include "utcc/constraint.hpp"
#include "utcc/formula.hpp"

namespace utcc {

// Model set over 2^n assignments of the pool, little-endian bit order:
// assignment index m has variable i true iff bit i of m is set.
class PosBits {
 public:
  PosBits() = default;
  PosBits(std::size_t nvars, bool all);

  std::size_t nvars() const { return nvars_; }
  bool get(std::size_t m) const;
  void set(std::size_t m, bool v);
  bool is_all() const;
  bool is_empty() const;
  bool subset_of(const PosBits& o) const;
  PosBits and_with(const PosBits& o) const;
  PosBits forget(std::size_t var) const;
  bool operator==(const PosBits& o) const { return words_ == o.words_; }
  std::string hex() const;
  static PosBits from_hex(std::size_t nvars, const std::string& hex);

 private:
  std::size_t nvars_ = 0;
  std::vector<std::uint64_t> words_;
};

struct TypeAtom {
  enum class Kind { Nil, List, ListPair };
  Kind kind;
  std::string a;
  std::string b;  // ListPair tail

  bool operator<(const TypeAtom& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
  bool operator==(const TypeAtom& o) const {
    return kind == o.kind && a == o.a && b == o.b;
  }
  std::string str() const;
};

using TypeConj = std::set<TypeAtom>;

TypeConj saturate_types(const TypeConj& t);

class GroundnessSystem : public ConstraintSystem {
 public:
  GroundnessSystem(std::vector<std::string> pool, bool with_types,
                   std::size_t max_pool = 16);

  std::string name() const override { return with_types_ ? "postype" : "pos"; }
  bool with_types() const { return with_types_; }

  Constraint true_c() const override;
  Constraint false_c() const override;
  Constraint lub(const Constraint& c, const Constraint& d) const override;
  bool entails(const Constraint& d, const Constraint& c) const override;
  Constraint hide(const std::vector<std::string>& xs, const Constraint& c) const override;
  Constraint diag(const std::vector<std::string>& xs, const TermVec& ts) const override;
  VarSet free_vars(const Constraint& c) const override;
  bool is_false(const Constraint& c) const override;
  std::string key(const Constraint& c) const override;
  std::size_t key_hash(const Constraint& c) const override;
  std::string print(const Constraint& c) const override;
  Constraint parse_constraint(const std::string& text) const override;
  const std::vector<std::string>& pool() const override { return pool_; }

  Constraint make(PosBits g, TypeConj t) const;
  const PosBits& pos_of(const Constraint& c) const;
  const TypeConj& types_of(const Constraint& c) const;

  // alpha_G / alpha_T / alpha_GT of a Herbrand constraint, conjunct-wise,
  // existentials eliminated positively.
  Constraint alpha_from(const Constraint& herbrand) const;

  // Certified abstract-to-concrete entailment: nil(x) |~ x=[] and
  // list(x,xs) |~ exists x',x''.(x=[x'|x'']); Pos alone certifies nothing
  // beyond false (groundness cannot distinguish [] from ground lists).
  bool tilde_entails(const Constraint& d_abs, const Constraint& herbrand_goal) const;

  std::size_t var_index(const std::string& v) const;

 private:
  struct Data : ConstraintData {
    bool is_false = false;
    PosBits g;
    TypeConj t;
    std::string cached_key;
    std::size_t cached_hash = 0;
  };
  const Data& payload(const Constraint& c) const {
    check_same_system(c);
    return c.as<Data>();
  }

  std::vector<std::string> pool_;
  std::map<std::string, std::size_t> index_;
  bool with_types_;
};

}  // namespace utcc
