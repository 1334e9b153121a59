#include "utcc/description.hpp"

namespace utcc {

Description identity_description(const ConstraintSystem* sys) {
  Description d;
  d.name = "identity(" + sys->name() + ")";
  d.concrete = sys;
  d.abstr = sys;
  d.alpha = [](const Constraint& c) { return c; };
  d.abs_entails_conc = [sys](const Constraint& da, const Constraint& c) {
    return sys->entails(da, c);
  };
  return d;
}

ConstraintSeq alpha_seq(const Description& d, const ConstraintSeq& s) {
  std::vector<Constraint> out;
  for (const auto& c : s.items()) out.push_back(d.alpha(c));
  return ConstraintSeq(std::move(out));
}

ConstraintSeq k_cut(const ConstraintSeq& s, std::size_t k) { return s.truncate(k); }

ConstraintSeq gamma_k(const ConstraintSeq& s, std::size_t n) { return s.pad_true(n); }

DescriptionReport check_description(const Description& d,
                                    const std::vector<Constraint>& concrete_samples,
                                    const std::vector<Constraint>& entail_goals,
                                    std::size_t max_hide_vars) {
  DescriptionReport report;
  const ConstraintSystem* C = d.concrete;
  const ConstraintSystem* A = d.abstr;

  std::vector<std::string> vars = C->pool();
  if (vars.size() > max_hide_vars) vars.resize(max_hide_vars);

  // (1) alpha(exists x (c)) equivalent to exists^a x (alpha(c)).
  for (const auto& c : concrete_samples) {
    Constraint ac = d.alpha(c);
    for (const auto& x : vars) {
      ++report.checked_hide;
      Constraint lhs = d.alpha(C->hide({x}, c));
      Constraint rhs = A->hide({x}, ac);
      if (!A->equivalent(lhs, rhs))
        report.fail("condition (1) fails at c = " + c.str() + ", x = " + x + ": " +
                    lhs.str() + " vs " + rhs.str());
    }
  }

  // (2) alpha(d_xt) equivalent to the abstract diagonal.
  const TermUniverse* tu = C->universe();
  if (tu) {
    for (const auto& x : vars) {
      for (const auto& t : tu->terms()) {
        if (t.contains_var(x)) continue;
        ++report.checked_diag;
        Constraint lhs = d.alpha(C->diag({x}, {t}));
        Constraint rhs = A->diag({x}, {t});
        if (!A->equivalent(lhs, rhs))
          report.fail("condition (2) fails at d_" + x + "," + t.str() + ": " + lhs.str() +
                      " vs " + rhs.str());
      }
    }
  } else {
    for (const auto& x : vars)
      for (const auto& y : vars) {
        ++report.checked_diag;
        Constraint lhs = d.alpha(C->diag({x}, {Term::var(y)}));
        Constraint rhs = A->diag({x}, {Term::var(y)});
        if (!A->equivalent(lhs, rhs))
          report.fail("condition (2) fails at d_" + x + "," + y);
      }
  }

  // Monotonicity of alpha over sample pairs.
  for (const auto& c : concrete_samples)
    for (const auto& e : concrete_samples) {
      if (!C->entails(e, c)) continue;
      ++report.checked_monotone;
      if (!A->entails(d.alpha(e), d.alpha(c)))
        report.fail("alpha not monotone at " + c.str() + " <= " + e.str());
    }

  // Soundness spot-check of abs_entails_conc: a positive answer for
  // (alpha-image(e0), goal) must be confirmed by every sampled concrete
  // constraint approximated by it.
  for (const auto& e0 : concrete_samples) {
    Constraint da = d.alpha(e0);
    for (const auto& goal : entail_goals) {
      if (!d.abs_entails_conc(da, goal)) continue;
      ++report.checked_entail;
      for (const auto& cprime : concrete_samples) {
        if (!A->entails(d.alpha(cprime), da)) continue;
        if (!C->entails(cprime, goal))
          report.fail("abs_entails_conc unsound: " + da.str() + " |~ " + goal.str() +
                      " but " + cprime.str() + " does not entail the goal");
      }
    }
  }
  return report;
}

}  // namespace utcc
