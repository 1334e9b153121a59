#pragma once

/*
 * Bounded sequences of constraints and the algebra of sequence sets used
 * by the denotational semantics: upward closure, head complement,
 * prefixing, intersection, and the exists/forall operators on variables.
 *
 * A SeqSet is either an explicit set of sequences over an enumerated
 * element list, or a characteristic predicate (with an optional element
 * list it can be materialized over). Every set contains false^k, the
 * mandatory member of the semantic domain.
 */

#include <functional>
#include <set>
#include <vector>

#include "utcc/constraint.hpp"

namespace utcc {

class ConstraintSeq {
 public:
  ConstraintSeq() = default;
  explicit ConstraintSeq(std::vector<Constraint> items) : items_(std::move(items)) {}

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Constraint& at(std::size_t i) const { return items_.at(i); }
  const std::vector<Constraint>& items() const { return items_; }

  ConstraintSeq tail() const;
  ConstraintSeq prepend(const Constraint& c) const;
  ConstraintSeq truncate(std::size_t k) const;  // k-cut
  // gamma_k: pad with true up to length n.
  ConstraintSeq pad_true(std::size_t n) const;

  std::string str() const;
  std::string key() const;
  // 128-bit content digest of the canonical keys; cheap memo identity for
  // long sequences (the full key can be megabytes for saturated stores).
  std::string digest() const;

  bool operator==(const ConstraintSeq& o) const;
  bool operator<(const ConstraintSeq& o) const { return key() < o.key(); }

 private:
  std::vector<Constraint> items_;
};

// s <= s': |s| <= |s'| and s'(i) entails s(i) pointwise.
bool seq_leq(const ConstraintSeq& s, const ConstraintSeq& t);
bool seq_equiv(const ConstraintSeq& s, const ConstraintSeq& t);
// Pointwise hide.
ConstraintSeq seq_hide(const std::vector<std::string>& xs, const ConstraintSeq& s);
// True when s and t are xs-variants: hide(xs, s) == hide(xs, t) pointwise.
bool seq_variant_of(const std::vector<std::string>& xs, const ConstraintSeq& s,
                    const ConstraintSeq& t);
ConstraintSeq seq_lub(const ConstraintSeq& s, const ConstraintSeq& t);

class SeqSet {
 public:
  using Pred = std::function<bool(const ConstraintSeq&)>;

  static SeqSet explicit_set(std::size_t k, std::vector<Constraint> elements,
                             std::set<ConstraintSeq> members);
  static SeqSet predicate(std::size_t k, const ConstraintSystem* sys, Pred member,
                          std::vector<Constraint> elements = {});
  // All length-k sequences over `elements`.
  static SeqSet full(std::size_t k, const ConstraintSystem* sys,
                     std::vector<Constraint> elements = {});

  std::size_t k() const { return k_; }
  const ConstraintSystem* system() const { return sys_; }
  bool is_explicit() const { return explicit_.has_value(); }
  const std::vector<Constraint>& elements() const { return elements_; }

  // Membership. Sequences shorter than k are accepted when the predicate
  // accepts them (suffix semantics); false^k is always a member.
  bool contains(const ConstraintSeq& s) const;

  // Enumerates all length-k sequences over the element list and filters by
  // membership. Usage error when no element list is available.
  // Work is spread over `threads` workers (<=1: sequential).
  SeqSet materialize(int threads = 1) const;
  const std::set<ConstraintSeq>& members() const;

  std::string to_json() const;  // canonical sorted form, explicit sets only

 private:
  std::size_t k_ = 0;
  const ConstraintSystem* sys_ = nullptr;
  std::vector<Constraint> elements_;
  std::optional<std::set<ConstraintSeq>> explicit_;
  Pred pred_;
};

// Operators of the semantics (Not. 3.1 and Fig. 2 shapes).

// up_close(c, k): sequences whose head entails c.
SeqSet up_close(const Constraint& c, std::size_t k, std::vector<Constraint> elements = {});
// complement_head(c, k): sequences whose head does not entail c, plus the
// mandatory member false^k.
SeqSet complement_head(const Constraint& c, std::size_t k,
                       std::vector<Constraint> elements = {});
SeqSet intersect(const SeqSet& a, const SeqSet& b);
SeqSet unite(const SeqSet& a, const SeqSet& b);
// shift(S) = C.S: every element prefixed to every member.
SeqSet shift(const SeqSet& s);

// Sequence-level existential: s is a member iff some xs-variant of s is in
// S. Over explicit sets variants are searched in the element list; over
// predicates candidate variants are generated from the term universe.
SeqSet seq_exists(const std::vector<std::string>& xs, const SeqSet& s);

// Sequence-level universal (the closure operator of the abstraction case):
// a member must lie in S together with all its xs-variants above an
// admissible diagonal, for every opening of its existential blocks.
SeqSet seq_forall(const std::vector<std::string>& xs, const SeqSet& s, const TermUniverse& tu);

// Candidate xs-variants of s used by seq_exists over predicate sets:
// openings of existential blocks (renamed into xs or fresh pool names)
// and diagonal augmentations over the universe.
std::vector<ConstraintSeq> variant_candidates(const std::vector<std::string>& xs,
                                              const ConstraintSeq& s, const TermUniverse& tu);

// All (none/full) openings of the existential blocks of s, including s
// itself; opened names are drawn deterministically from the pool.
std::vector<ConstraintSeq> seq_openings(const ConstraintSeq& s);

// The canonical xs-variant of s above diag(xs, ts):
// position i becomes hide(xs, s(i)) lub d_xs_ts.
ConstraintSeq diag_variant(const std::vector<std::string>& xs, const TermVec& ts,
                           const ConstraintSeq& s);

ConstraintSeq false_seq(const ConstraintSystem* sys, std::size_t k);

}  // namespace utcc
