#include "utcc/constraint.hpp"

namespace utcc {

const std::vector<std::string> ConstraintSystem::empty_pool_{};

std::string Constraint::str() const {
  check_internal(sys_ != nullptr, "printing an empty constraint");
  return sys_->print(*this);
}

bool Constraint::operator==(const Constraint& o) const {
  if (sys_ != o.sys_) return false;
  if (data_ == o.data_) return true;
  return sys_->key(*this) == sys_->key(o);
}

bool Constraint::operator<(const Constraint& o) const {
  check_usage(sys_ == o.sys_, "ordering constraints from different systems");
  return sys_->key(*this) < sys_->key(o);
}

Constraint ConstraintSystem::subst(const Constraint& c, const std::vector<std::string>& xs,
                                   const TermVec& ts) const {
  check_same_system(c);
  check_usage(xs.size() == ts.size(), "subst: variable/term lists differ in length");
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (const auto& x : xs)
      check_usage(!ts[i].contains_var(x), "subst: non-admissible substitution (" + x +
                                              " occurs in replacement terms)");
  return hide(xs, lub(c, diag(xs, ts)));
}

std::vector<Subst> ConstraintSystem::entail_assignments(const Constraint& d,
                                                        const Constraint& goal,
                                                        const VarSet& holes) const {
  (void)holes;
  if (entails(d, goal)) return {Subst{}};
  return {};
}

}  // namespace utcc
