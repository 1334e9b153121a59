#pragma once

/*
 * The suspension constraint system S(C): base constraints paired with a
 * susp/nsusp flag (susp <= nsusp). Lub and order are pointwise, hiding
 * acts on the base only, diagonal elements carry susp. Used by the
 * suspension-freedom analysis together with the hat program
 * transformations.
 */

#include <memory>

#include "utcc/constraint.hpp"

namespace utcc {

class SuspensionSystem : public ConstraintSystem {
 public:
  explicit SuspensionSystem(std::shared_ptr<const ConstraintSystem> base);

  const ConstraintSystem& base() const { return *base_; }

  std::string name() const override { return "susp(" + base_->name() + ")"; }
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
  Constraint parse_constraint(const std::string& text) const override;
  std::optional<std::vector<Constraint>> enumerate() const override;
  const std::vector<std::string>& pool() const override { return base_->pool(); }
  const TermUniverse* universe() const override { return base_->universe(); }
  const Signature* term_signature() const override { return base_->term_signature(); }

  std::vector<Subst> entail_assignments(const Constraint& d, const Constraint& goal,
                                        const VarSet& holes) const override;
  std::optional<std::pair<Constraint, std::vector<std::string>>> open_existentials(
      const Constraint& c, FreshNames& names) const override;

  // hat(c) = <c, susp>
  Constraint hat(const Constraint& base_c) const;
  Constraint make_pair(const Constraint& base_c, bool nsusp) const;
  const Constraint& base_of(const Constraint& c) const;
  bool is_nsusp(const Constraint& c) const;

 private:
  struct Pair : ConstraintData {
    Constraint base;
    bool nsusp;
    Pair(Constraint b, bool f) : base(std::move(b)), nsusp(f) {}
  };
  const Pair& payload(const Constraint& c) const {
    check_same_system(c);
    return c.as<Pair>();
  }

  std::shared_ptr<const ConstraintSystem> base_;
};

}  // namespace utcc
