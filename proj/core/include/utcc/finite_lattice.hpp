#pragma once

/*
 * Explicit finite constraint lattices, loaded from a table of elements and
 * their order. Cylindrification is trivial (no variable information) and
 * diagonal elements collapse to true, which makes any finite lattice a
 * degenerate cylindric system suitable for the propositional fragment of
 * the calculus.
 */

#include <map>
#include <string>
#include <vector>

#include "utcc/constraint.hpp"

namespace utcc {

class FiniteLatticeSystem : public ConstraintSystem {
 public:
  // `leq` lists pairs (a, b) with a <= b; the reflexive-transitive closure
  // is taken. "true" must be bottom and "false" top; every pair of
  // elements must have a unique least upper bound.
  FiniteLatticeSystem(std::string name, std::vector<std::string> elements,
                      const std::vector<std::pair<std::string, std::string>>& leq);

  static FiniteLatticeSystem from_json_file(const std::string& path);
  static FiniteLatticeSystem from_json_text(const std::string& text, const std::string& name);

  std::string name() const override { return name_; }
  Constraint true_c() const override { return make(bottom_); }
  Constraint false_c() const override { return make(top_); }

  Constraint lub(const Constraint& c, const Constraint& d) const override;
  bool entails(const Constraint& d, const Constraint& c) const override;
  Constraint hide(const std::vector<std::string>& xs, const Constraint& c) const override;
  Constraint diag(const std::vector<std::string>& xs, const TermVec& ts) const override;
  VarSet free_vars(const Constraint& c) const override { check_same_system(c); return {}; }
  bool is_false(const Constraint& c) const override;

  std::string print(const Constraint& c) const override;
  Constraint parse_constraint(const std::string& text) const override;
  std::optional<std::vector<Constraint>> enumerate() const override;

  int index_of(const Constraint& c) const;
  Constraint element(const std::string& name) const;
  std::size_t size() const { return elements_.size(); }

 private:
  struct Elem : ConstraintData {
    int id;
    explicit Elem(int i) : id(i) {}
  };

  Constraint make(int id) const {
    return Constraint(this, std::make_shared<Elem>(id));
  }

  std::string name_;
  std::vector<std::string> elements_;
  std::map<std::string, int> by_name_;
  std::vector<std::vector<bool>> leq_;  // leq_[a][b]: a <= b
  std::vector<std::vector<int>> lub_;
  int bottom_ = -1;
  int top_ = -1;
};

}  // namespace utcc
