#include "utcc/suspension.hpp"

#include <algorithm>

#include "utcc/parser.hpp"

namespace utcc {

SuspensionSystem::SuspensionSystem(std::shared_ptr<const ConstraintSystem> base)
    : base_(std::move(base)) {}

Constraint SuspensionSystem::make_pair(const Constraint& base_c, bool nsusp) const {
  check_usage(base_c.system() == base_.get(),
              "suspension pair over a constraint from a different base system");
  return Constraint(this, std::make_shared<Pair>(base_c, nsusp));
}

Constraint SuspensionSystem::hat(const Constraint& base_c) const {
  return make_pair(base_c, false);
}

const Constraint& SuspensionSystem::base_of(const Constraint& c) const {
  return payload(c).base;
}

bool SuspensionSystem::is_nsusp(const Constraint& c) const { return payload(c).nsusp; }

Constraint SuspensionSystem::true_c() const { return make_pair(base_->true_c(), false); }

Constraint SuspensionSystem::false_c() const { return make_pair(base_->false_c(), true); }

Constraint SuspensionSystem::lub(const Constraint& c, const Constraint& d) const {
  const Pair& a = payload(c);
  const Pair& b = payload(d);
  return make_pair(base_->lub(a.base, b.base), a.nsusp || b.nsusp);
}

bool SuspensionSystem::entails(const Constraint& d, const Constraint& c) const {
  const Pair& a = payload(d);
  const Pair& b = payload(c);
  // <e, f> entails <c, g> iff e entails c and g <= f (susp below nsusp).
  return base_->entails(a.base, b.base) && (a.nsusp || !b.nsusp);
}

Constraint SuspensionSystem::hide(const std::vector<std::string>& xs,
                                  const Constraint& c) const {
  const Pair& a = payload(c);
  return make_pair(base_->hide(xs, a.base), a.nsusp);
}

Constraint SuspensionSystem::diag(const std::vector<std::string>& xs,
                                  const TermVec& ts) const {
  return make_pair(base_->diag(xs, ts), false);
}

VarSet SuspensionSystem::free_vars(const Constraint& c) const {
  return base_->free_vars(payload(c).base);
}

bool SuspensionSystem::is_false(const Constraint& c) const {
  const Pair& a = payload(c);
  return a.nsusp && base_->is_false(a.base);
}

Constraint SuspensionSystem::normal_form(const Constraint& c) const {
  const Pair& a = payload(c);
  return make_pair(base_->normal_form(a.base), a.nsusp);
}

std::string SuspensionSystem::print(const Constraint& c) const {
  const Pair& a = payload(c);
  return "<" + a.base.str() + ", " + (a.nsusp ? "nsusp" : "susp") + ">";
}

Constraint SuspensionSystem::parse_constraint(const std::string& text) const {
  auto [left, right] = split_angle_pair(text);
  std::string flag;
  for (char ch : right)
    if (!isspace(static_cast<unsigned char>(ch))) flag += ch;
  check_usage(flag == "susp" || flag == "nsusp",
              "suspension flag must be susp or nsusp, got '" + flag + "'");
  return make_pair(base_->parse_constraint(left), flag == "nsusp");
}

std::optional<std::vector<Constraint>> SuspensionSystem::enumerate() const {
  auto base_elems = base_->enumerate();
  if (!base_elems) return std::nullopt;
  std::vector<Constraint> out;
  for (const auto& b : *base_elems) {
    out.push_back(make_pair(b, false));
    out.push_back(make_pair(b, true));
  }
  return out;
}

std::vector<Subst> SuspensionSystem::entail_assignments(const Constraint& d,
                                                        const Constraint& goal,
                                                        const VarSet& holes) const {
  const Pair& a = payload(d);
  const Pair& g = payload(goal);
  if (!a.nsusp && g.nsusp) return {};
  return base_->entail_assignments(a.base, g.base, holes);
}

std::optional<std::pair<Constraint, std::vector<std::string>>>
SuspensionSystem::open_existentials(const Constraint& c, FreshNames& names) const {
  const Pair& a = payload(c);
  auto opened = base_->open_existentials(a.base, names);
  if (!opened) return std::nullopt;
  return std::make_pair(make_pair(opened->first, a.nsusp), opened->second);
}

}  // namespace utcc
