#include "utcc/formula.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "utcc/parser.hpp"

namespace utcc {

namespace {

// Matching where pattern holes may be bound and the subject side is already
// resolved under d's equations; freshly bound values are resolved too so
// later comparisons are stable.
bool match_with_resolution(const Term& pattern, const Term& subject, const VarSet& holes,
                           Subst& binding, const Subst& sigma_d) {
  if (pattern.is_var() && holes.count(pattern.sym())) {
    auto it = binding.find(pattern.sym());
    if (it != binding.end()) return it->second.apply(sigma_d) == subject;
    binding.emplace(pattern.sym(), subject);
    return true;
  }
  if (pattern.is_var() || subject.is_var()) {
    if (pattern.is_var()) {
      Term r = Term::var(pattern.sym()).apply(sigma_d);
      if (!(r == pattern)) return match_with_resolution(r, subject, holes, binding, sigma_d);
    }
    return pattern.is_var() == subject.is_var() && pattern.sym() == subject.sym();
  }
  if (pattern.sym() != subject.sym() || pattern.args().size() != subject.args().size())
    return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_with_resolution(pattern.args()[i], subject.args()[i], holes, binding, sigma_d))
      return false;
  return true;
}

constexpr const char* kBoundPrefix = "_B";
constexpr const char* kTempPrefix = "_T";

Term mask_bound(const Term& t, const std::set<std::string>& bound) {
  if (t.is_var()) return bound.count(t.sym()) ? Term::var("_B?") : t;
  if (t.args().empty()) return t;
  TermVec args;
  for (const auto& a : t.args()) args.push_back(mask_bound(a, bound));
  return Term::app(t.sym(), std::move(args));
}

void collect_bound_order(const Term& t, const std::set<std::string>& bound,
                         std::vector<std::string>& order, std::set<std::string>& seen) {
  if (t.is_var()) {
    if (bound.count(t.sym()) && seen.insert(t.sym()).second) order.push_back(t.sym());
    return;
  }
  for (const auto& a : t.args()) collect_bound_order(a, bound, order, seen);
}

bool term_has_absorbing(const Term& t, const TermPolicy* policy) {
  if (!policy) return false;
  if (policy->absorbing(t)) return true;
  if (t.is_var()) return false;
  for (const auto& a : t.args())
    if (term_has_absorbing(a, policy)) return true;
  return false;
}

std::string render_formula(const utcc::FormulaData& p);

}  // namespace

bool FormulaData::has_pred(const PredAtom& a) const {
  auto it = std::lower_bound(preds.begin(), preds.end(), a);
  return it != preds.end() && *it == a;
}

bool PredAtom::operator<(const PredAtom& o) const {
  if (pred != o.pred) return pred < o.pred;
  if (args.size() != o.args.size()) return args.size() < o.args.size();
  for (std::size_t i = 0; i < args.size(); ++i)
    if (int c = args[i].compare(o.args[i])) return c < 0;
  return false;
}

std::string PredAtom::str() const {
  std::string s = pred;
  if (!args.empty()) {
    s += "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ",";
      s += args[i].str();
    }
    s += ")";
  }
  return s;
}

EquationSystem::EquationSystem(std::string name, Signature sig, std::vector<std::string> pool,
                               TermUniverse universe, std::shared_ptr<const TermPolicy> policy)
    : name_(std::move(name)),
      sig_(std::move(sig)),
      pool_(std::move(pool)),
      universe_(std::move(universe)),
      policy_(std::move(policy)) {
  for (const auto& v : pool_) universe_.add(Term::var(v));
  check_usage(universe_.size() > 0, "equation system needs a non-empty term universe");
}

Constraint EquationSystem::true_c() const {
  return make(std::make_shared<FormulaData>());
}

Constraint EquationSystem::false_c() const { return make_false(); }

Constraint EquationSystem::make_false() const {
  auto d = std::make_shared<FormulaData>();
  d->is_false = true;
  return make(d);
}

const FormulaData& EquationSystem::payload(const Constraint& c) const {
  check_same_system(c);
  return c.as<FormulaData>();
}

// ---------------------------------------------------------------------------
// Solving (unification with orientation, occurs check and the term policy).

struct EquationSystem::SolveCtx {
  const EquationSystem* sys;
  std::map<std::string, Term> sigma;
  std::vector<std::pair<Term, Term>> work;
  std::set<std::string> bound;
  bool failed = false;

  const TermPolicy* policy() const { return sys->policy_.get(); }

  Term normalize(const Term& t) const { return policy() ? policy()->normalize(t) : t; }

  Term resolve(const Term& t) const { return normalize(t.apply(sigma)); }

  void fail() { failed = true; }

  void rebind_force(const std::string& v, const Term& t) { sigma[v] = t; }

  void bind(const std::string& v, const Term& t0) {
    Term t = normalize(t0);
    if (t.is_var() && t.sym() == v) return;
    if (t.contains_var(v)) {
      fail();  // occurs check: no finite solution
      return;
    }
    Subst unit{{v, t}};
    for (auto& [w, rhs] : sigma) {
      Term r = normalize(rhs.apply(unit));
      if (r.contains_var(w) && !(r.is_var() && r.sym() == w)) {
        fail();
        return;
      }
      rhs = r;
    }
    sigma[v] = t;
  }

  // Bound variables are eliminated first so that witnesses disappear into
  // the solved form; among equals the lexicographically larger name is
  // bound, keeping output deterministic.
  void orient_vars(const Term& a, const Term& b) {
    bool ab = bound.count(a.sym()) > 0;
    bool bb = bound.count(b.sym()) > 0;
    if (ab == bb) {
      if (a.sym() > b.sym())
        bind(a.sym(), b);
      else
        bind(b.sym(), a);
    } else if (ab) {
      bind(a.sym(), b);
    } else {
      bind(b.sym(), a);
    }
  }

  void run() {
    while (!work.empty() && !failed) {
      auto [a0, b0] = work.back();
      work.pop_back();
      Term a = resolve(a0);
      Term b = resolve(b0);
      if (a == b) continue;
      if (a.is_var() && b.is_var()) {
        orient_vars(a, b);
      } else if (a.is_var()) {
        bind(a.sym(), b);
      } else if (b.is_var()) {
        bind(b.sym(), a);
      } else if (policy() && (policy()->absorbing(a) || policy()->absorbing(b))) {
        // Conflict at the cut boundary: the absorbing element swallows the
        // equation. Variables that pointed here are coarsened to m_top.
        Term absorber = policy()->absorbing(a) ? a : b;
        if (a0.is_var()) rebind_force(a0.sym(), absorber);
        if (b0.is_var()) rebind_force(b0.sym(), absorber);
      } else if (a.sym() == b.sym() && a.args().size() == b.args().size()) {
        for (std::size_t i = 0; i < a.args().size(); ++i)
          work.emplace_back(a.args()[i], b.args()[i]);
      } else {
        fail();  // clash f(...) = g(...)
      }
    }
  }
};

std::shared_ptr<FormulaData> EquationSystem::canonicalize(FormulaData d) const {
  auto out = std::make_shared<FormulaData>();
  if (d.is_false) {
    out->is_false = true;
    return out;
  }
  std::set<std::string> bound(d.bound.begin(), d.bound.end());

  // Keep only bound names that actually occur.
  std::set<std::string> occurring;
  auto note = [&](const Term& t) {
    for (const auto& v : t.vars())
      if (bound.count(v)) occurring.insert(v);
  };
  for (const auto& [x, t] : d.eqs) note(t);
  for (const auto& p : d.preds)
    for (const auto& a : p.args) note(a);

  // Canonical numbering: visit atoms in an order independent of the
  // current bound names (mask them), then rename by first occurrence.
  struct Item {
    std::string masked;
    bool is_eq;
    std::string var;
    Term term;
    PredAtom pred;
  };
  std::vector<Item> items;
  for (const auto& [x, t] : d.eqs) {
    Item it;
    it.is_eq = true;
    it.var = x;
    it.term = t;
    it.masked = x + "=" + mask_bound(t, occurring).str();
    items.push_back(std::move(it));
  }
  for (const auto& p : d.preds) {
    Item it;
    it.is_eq = false;
    it.pred = p;
    PredAtom masked{p.pred, {}};
    for (const auto& a : p.args) masked.args.push_back(mask_bound(a, occurring));
    it.masked = masked.str();
    items.push_back(std::move(it));
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.masked < b.masked; });

  Subst rename;
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& it : items) {
    if (it.is_eq)
      collect_bound_order(it.term, occurring, order, seen);
    else
      for (const auto& a : it.pred.args) collect_bound_order(a, occurring, order, seen);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::string nn = kBoundPrefix + std::to_string(i + 1);
    rename.emplace(order[i], Term::var(nn));
    out->bound.push_back(nn);
  }

  for (const auto& it : items) {
    if (it.is_eq) {
      out->eqs.emplace(it.var, it.term.apply(rename));
    } else {
      PredAtom p{it.pred.pred, {}};
      for (const auto& a : it.pred.args) p.args.push_back(a.apply(rename));
      out->preds.push_back(std::move(p));
    }
  }
  std::sort(out->preds.begin(), out->preds.end());
  out->preds.erase(std::unique(out->preds.begin(), out->preds.end()), out->preds.end());
  out->cached_key = render_formula(*out);
  out->key_hash = std::hash<std::string>{}(out->cached_key);
  return out;
}

Constraint EquationSystem::solve(const RawFormula& raw) const {
  if (raw.is_false) return make_false();
  SolveCtx ctx;
  ctx.sys = this;

  // Rename the raw bound variables to private temporaries.
  Subst rename;
  int tmp = 0;
  for (const auto& b : raw.bound) {
    std::string nn = kTempPrefix + std::to_string(++tmp);
    rename.emplace(b, Term::var(nn));
    ctx.bound.insert(nn);
  }
  for (const auto& [l, r] : raw.equations)
    ctx.work.emplace_back(l.apply(rename), r.apply(rename));
  std::vector<PredAtom> preds;
  for (const auto& p : raw.preds) {
    PredAtom q{p.pred, {}};
    for (const auto& a : p.args) q.args.push_back(a.apply(rename));
    preds.push_back(std::move(q));
  }

  ctx.run();
  if (ctx.failed) return make_false();

  FormulaData d;
  for (const auto& [v, t] : ctx.sigma) {
    if (ctx.bound.count(v)) continue;  // exists y (y = t /\ R) == R[t/y]
    Term r = ctx.resolve(t);
    if (r.is_var() && r.sym() == v) continue;
    d.eqs.emplace(v, r);
  }
  for (const auto& p : preds) {
    PredAtom q{p.pred, {}};
    for (const auto& a : p.args) q.args.push_back(ctx.resolve(a));
    d.preds.push_back(std::move(q));
  }
  d.bound.assign(ctx.bound.begin(), ctx.bound.end());
  return make(canonicalize(std::move(d)));
}

Constraint EquationSystem::from_atoms(const std::vector<std::string>& bound,
                                      const std::vector<std::pair<Term, Term>>& eqs,
                                      const std::vector<PredAtom>& preds) const {
  RawFormula raw;
  raw.bound = bound;
  raw.equations = eqs;
  raw.preds = preds;
  return solve(raw);
}

Constraint EquationSystem::atom(const std::string& pred, TermVec args) const {
  check_usage(sig_.is_predicate(pred), "undeclared predicate " + pred);
  check_usage(sig_.predicates.at(pred) == static_cast<int>(args.size()),
              "arity mismatch for predicate " + pred);
  return from_atoms({}, {}, {PredAtom{pred, std::move(args)}});
}

Constraint EquationSystem::equation(const Term& lhs, const Term& rhs) const {
  return from_atoms({}, {{lhs, rhs}}, {});
}

Constraint EquationSystem::lub(const Constraint& c, const Constraint& d) const {
  const FormulaData& a = payload(c);
  const FormulaData& b = payload(d);
  if (a.is_false || b.is_false) return make_false();
  RawFormula raw;
  // Rename the two bound blocks apart (normal form, Not. 2.7).
  Subst ra, rb;
  int i = 0;
  for (const auto& v : a.bound) {
    std::string nn = "_La" + std::to_string(++i);
    ra.emplace(v, Term::var(nn));
    raw.bound.push_back(nn);
  }
  i = 0;
  for (const auto& v : b.bound) {
    std::string nn = "_Lb" + std::to_string(++i);
    rb.emplace(v, Term::var(nn));
    raw.bound.push_back(nn);
  }
  for (const auto& [x, t] : a.eqs) raw.equations.emplace_back(Term::var(x), t.apply(ra));
  for (const auto& [x, t] : b.eqs) raw.equations.emplace_back(Term::var(x), t.apply(rb));
  for (const auto& p : a.preds) {
    PredAtom q{p.pred, {}};
    for (const auto& t : p.args) q.args.push_back(t.apply(ra));
    raw.preds.push_back(std::move(q));
  }
  for (const auto& p : b.preds) {
    PredAtom q{p.pred, {}};
    for (const auto& t : p.args) q.args.push_back(t.apply(rb));
    raw.preds.push_back(std::move(q));
  }
  return solve(raw);
}

// ---------------------------------------------------------------------------
// Entailment: match the goal's atoms against the solved form.

namespace {

struct Goal {
  bool is_eq;
  std::string var;  // eq: lhs variable
  Term term;        // eq: rhs
  PredAtom pred;
};

}  // namespace

bool EquationSystem::search_goals(const FormulaData& d, const FormulaData& goal,
                                  const VarSet& extra_holes, bool strict,
                                  bool enumerate_unbound, std::size_t cap,
                                  std::vector<Subst>* out) const {
  VarSet holes(goal.bound.begin(), goal.bound.end());
  holes.insert(extra_holes.begin(), extra_holes.end());

  const TermPolicy* pol = policy_.get();
  auto poisoned = [&](const Term& t) { return strict && term_has_absorbing(t, pol); };

  Subst sigma_d(d.eqs.begin(), d.eqs.end());
  auto resolve_d = [&](const Term& t) { return t.apply(sigma_d); };

  std::vector<Goal> goals;
  for (const auto& [x, t] : goal.eqs) {
    Goal g;
    g.is_eq = true;
    g.var = x;
    g.term = t;
    goals.push_back(std::move(g));
  }
  for (const auto& p : goal.preds) {
    Goal g;
    g.is_eq = false;
    g.pred = p;
    goals.push_back(std::move(g));
  }

  bool found = false;
  std::vector<Subst> results;

  // Under restricted instantiation, abstraction binders may only be bound
  // to terms of the declared universe.
  const bool restricted = restrict_instantiation_;
  auto restricted_ok = [&](const Subst& theta) {
    if (!restricted) return true;
    for (const auto& h : extra_holes) {
      auto it = theta.find(h);
      // Variables (pool members, opened locals) are always admissible;
      // the restriction bounds composed terms only.
      if (it != theta.end() && !it->second.is_var() && !universe_.contains(it->second))
        return false;
    }
    return true;
  };

  // True when every variable of t that is a hole has a binding.
  auto holes_resolved = [&](const Term& t, const Subst& theta) {
    for (const auto& v : t.vars())
      if (holes.count(v) && !theta.count(v)) return false;
    return true;
  };
  auto instantiate = [&](const Term& t, const Subst& theta) { return resolve_d(t.apply(theta)); };

  std::function<bool(std::vector<Goal>, Subst, int)> rec =
      [&](std::vector<Goal> pending, Subst theta, int stuck) -> bool {
    if (found && out == nullptr) return true;
    if (results.size() >= cap) return found;
    if (pending.empty()) {
      // Unconstrained existential witnesses: any universe term will do.
      std::vector<std::string> unbound;
      for (const auto& h : holes)
        if (!theta.count(h)) unbound.push_back(h);
      if (unbound.empty()) {
        if (strict)
          for (const auto& [h, t] : theta)
            if (poisoned(t)) return found;
        if (!restricted_ok(theta)) return found;
        found = true;
        if (out) results.push_back(theta);
        return true;
      }
      TermVec choices = universe_.admissible_for({});
      if (choices.empty()) return found;
      if (!enumerate_unbound) {
        for (const auto& h : unbound) theta.emplace(h, choices.front());
        found = true;
        if (out) results.push_back(theta);
        return true;
      }
      // Enumerate witnesses for the first unbound hole, recurse for the rest.
      std::vector<Goal> none;
      for (const auto& t : choices) {
        if (poisoned(t)) continue;
        Subst th = theta;
        th.emplace(unbound.front(), t);
        rec(none, std::move(th), 0);
        if (results.size() >= cap) break;
      }
      return found;
    }

    if (stuck > static_cast<int>(pending.size())) {
      // Every remaining goal is blocked on unbound holes: enumerate one.
      std::set<std::string> blocked;
      for (const auto& g : pending) {
        VarSet vs = g.is_eq ? g.term.vars() : VarSet{};
        if (!g.is_eq)
          for (const auto& a : g.pred.args) a.collect_vars(vs);
        for (const auto& v : vs)
          if (holes.count(v) && !theta.count(v)) blocked.insert(v);
      }
      if (blocked.empty()) return found;
      for (const auto& t : universe_.admissible_for({})) {
        if (poisoned(t)) continue;
        Subst th = theta;
        th.emplace(*blocked.begin(), t);
        rec(pending, std::move(th), 0);
        if (found && out == nullptr) return true;
        if (results.size() >= cap) break;
      }
      return found;
    }

    Goal g = pending.front();
    std::vector<Goal> rest(pending.begin() + 1, pending.end());

    if (g.is_eq) {
      bool lhs_is_hole = holes.count(g.var) > 0;
      if (lhs_is_hole && !theta.count(g.var)) {
        if (!holes_resolved(g.term, theta)) {
          rest.push_back(g);  // defer
          return rec(std::move(rest), std::move(theta), stuck + 1);
        }
        Term value = instantiate(g.term, theta);
        if (poisoned(value)) return found;
        Subst th = theta;
        th.emplace(g.var, value);
        return rec(std::move(rest), std::move(th), 0);
      }
      Term lhs = lhs_is_hole ? instantiate(Term::var(g.var), theta)
                             : resolve_d(Term::var(g.var));
      if (poisoned(lhs)) return found;
      // The rhs may still contain holes: match it against the resolved lhs.
      Term pattern = g.term.apply(theta);
      Subst binding = theta;
      if (match_with_resolution(pattern, lhs, holes, binding, sigma_d)) {
        return rec(std::move(rest), std::move(binding), 0);
      }
      return found;
    }

    // Predicate goal. Unbound holes of this atom:
    VarSet atom_holes;
    for (const auto& a : g.pred.args)
      for (const auto& v : a.vars())
        if (holes.count(v) && !theta.count(v)) atom_holes.insert(v);

    if (atom_holes.empty()) {
      // Fully determined: one sorted lookup instead of a scan.
      PredAtom inst{g.pred.pred, {}};
      bool bad = false;
      for (const auto& a : g.pred.args) {
        Term t = instantiate(a, theta);
        if (poisoned(t)) bad = true;
        inst.args.push_back(std::move(t));
      }
      if (!bad && d.has_pred(inst)) return rec(std::move(rest), std::move(theta), 0);
      return found;
    }

    if (restricted && d.preds.size() > 64 && atom_holes.size() <= 3) {
      // Invert the search: enumerate universe values for the holes and
      // look the instantiated atom up, instead of scanning a large store.
      std::vector<std::string> hs(atom_holes.begin(), atom_holes.end());
      TermVec choices = universe_.admissible_for({});
      std::vector<std::size_t> idx(hs.size(), 0);
      for (;;) {
        Subst th = theta;
        bool bad = false;
        for (std::size_t i = 0; i < hs.size(); ++i) {
          if (poisoned(choices[idx[i]])) bad = true;
          th.emplace(hs[i], choices[idx[i]]);
        }
        if (!bad) {
          PredAtom inst{g.pred.pred, {}};
          for (const auto& a : g.pred.args) inst.args.push_back(instantiate(a, th));
          if (d.has_pred(inst)) {
            rec(rest, std::move(th), 0);
            if (found && out == nullptr) return true;
            if (results.size() >= cap) break;
          }
        }
        std::size_t i = hs.size();
        while (i > 0 && ++idx[i - 1] == choices.size()) idx[--i] = 0;
        if (i == 0) break;
      }
      return found;
    }

    for (const auto& atom : d.preds) {
      if (atom.pred != g.pred.pred || atom.args.size() != g.pred.args.size()) continue;
      bool skip = false;
      if (strict)
        for (const auto& a : atom.args)
          if (term_has_absorbing(a, pol)) {
            skip = true;
            break;
          }
      if (skip) continue;
      Subst binding = theta;
      bool ok = true;
      for (std::size_t i = 0; i < atom.args.size() && ok; ++i)
        ok = match_with_resolution(g.pred.args[i].apply(binding), resolve_d(atom.args[i]),
                                   holes, binding, sigma_d);
      if (ok && restricted_ok(binding)) {
        rec(rest, std::move(binding), 0);
        if (found && out == nullptr) return true;
        if (results.size() >= cap) break;
      }
    }
    return found;
  };

  if (d.is_false) {
    // false entails everything; witnesses are enumerated if requested.
    std::vector<Goal> none;
    rec(none, Subst{}, 0);
  } else {
    rec(goals, Subst{}, 0);
  }
  if (out) {
    std::sort(results.begin(), results.end());
    results.erase(std::unique(results.begin(), results.end()), results.end());
    *out = std::move(results);
  }
  return found;
}

namespace {
std::string render_formula(const utcc::FormulaData& p) {
  if (p.is_false) return "false";
  std::vector<std::string> atoms;
  for (const auto& [x, t] : p.eqs) atoms.push_back(x + "=" + t.str());
  for (const auto& q : p.preds) atoms.push_back(q.str());
  if (atoms.empty()) return "true";
  std::sort(atoms.begin(), atoms.end());
  std::string body;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) body += " /\\ ";
    body += atoms[i];
  }
  if (p.bound.empty()) return body;
  std::string vars;
  for (std::size_t i = 0; i < p.bound.size(); ++i) {
    if (i) vars += ",";
    vars += p.bound[i];
  }
  return "exists " + vars + ".(" + body + ")";
}
}  // namespace

bool EquationSystem::entails(const Constraint& d, const Constraint& c) const {
  const FormulaData& dd = payload(d);
  const FormulaData& cc = payload(c);
  if (dd.is_false) return true;
  if (cc.is_false) return false;
  return search_goals(dd, cc, {}, /*strict=*/false, /*enumerate_unbound=*/false,
                      /*cap=*/1, nullptr);
}

bool EquationSystem::entails_strict(const Constraint& d, const Constraint& c) const {
  const FormulaData& dd = payload(d);
  const FormulaData& cc = payload(c);
  if (dd.is_false) return true;
  if (cc.is_false) return false;
  return search_goals(dd, cc, {}, /*strict=*/true, /*enumerate_unbound=*/false,
                      /*cap=*/1, nullptr);
}

std::vector<Subst> EquationSystem::entail_assignments(const Constraint& d,
                                                      const Constraint& goal,
                                                      const VarSet& holes) const {
  const FormulaData& dd = payload(d);
  const FormulaData& gg = payload(goal);
  if (gg.is_false) return {};
  std::vector<Subst> out;
  search_goals(dd, gg, holes, /*strict=*/false, /*enumerate_unbound=*/true,
               /*cap=*/20000, &out);
  // Project to the requested holes.
  std::vector<Subst> projected;
  for (const auto& th : out) {
    Subst p;
    for (const auto& h : holes) {
      auto it = th.find(h);
      if (it != th.end()) p.emplace(h, it->second);
    }
    if (p.size() == holes.size()) projected.push_back(std::move(p));
  }
  std::sort(projected.begin(), projected.end());
  projected.erase(std::unique(projected.begin(), projected.end()), projected.end());
  return projected;
}

Constraint EquationSystem::hide(const std::vector<std::string>& xs, const Constraint& c) const {
  const FormulaData& p = payload(c);
  if (p.is_false) return c;
  std::set<std::string> hiding(xs.begin(), xs.end());
  if (hiding.empty()) return c;

  // Dropping the equation of a hidden domain variable realizes
  // exists x (x=t /\ R) == R; remaining occurrences become bound and the
  // formula is re-solved so orientation can eliminate them where possible.
  RawFormula raw;
  raw.bound = p.bound;
  Subst rename;
  int i = 0;
  for (const auto& v : hiding) {
    bool occurs = false;
    for (const auto& [x, t] : p.eqs)
      if (!hiding.count(x) && t.contains_var(v)) occurs = true;
    for (const auto& q : p.preds)
      for (const auto& a : q.args)
        if (a.contains_var(v)) occurs = true;
    if (occurs) {
      std::string nn = std::string("_H") + std::to_string(++i);
      rename.emplace(v, Term::var(nn));
      raw.bound.push_back(nn);
    }
  }
  for (const auto& [x, t] : p.eqs) {
    if (hiding.count(x)) continue;
    raw.equations.emplace_back(Term::var(x), t.apply(rename));
  }
  for (const auto& q : p.preds) {
    PredAtom a{q.pred, {}};
    for (const auto& t : q.args) a.args.push_back(t.apply(rename));
    raw.preds.push_back(std::move(a));
  }
  return solve(raw);
}

Constraint EquationSystem::diag(const std::vector<std::string>& xs, const TermVec& ts) const {
  check_usage(xs.size() == ts.size(), "diag: variable/term lists differ in length");
  RawFormula raw;
  for (std::size_t i = 0; i < xs.size(); ++i)
    raw.equations.emplace_back(Term::var(xs[i]), ts[i]);
  return solve(raw);
}

VarSet EquationSystem::free_vars(const Constraint& c) const {
  const FormulaData& p = payload(c);
  VarSet out;
  if (p.is_false) return out;
  std::set<std::string> bound(p.bound.begin(), p.bound.end());
  for (const auto& [x, t] : p.eqs) {
    out.insert(x);
    for (const auto& v : t.vars())
      if (!bound.count(v)) out.insert(v);
  }
  for (const auto& q : p.preds)
    for (const auto& a : q.args)
      for (const auto& v : a.vars())
        if (!bound.count(v)) out.insert(v);
  return out;
}

bool EquationSystem::is_false(const Constraint& c) const { return payload(c).is_false; }

Constraint EquationSystem::normal_form(const Constraint& c) const {
  FormulaData copy = payload(c);
  return make(canonicalize(std::move(copy)));
}

std::string EquationSystem::print(const Constraint& c) const {
  const FormulaData& p = payload(c);
  if (!p.cached_key.empty()) return p.cached_key;
  return render_formula(p);
}

Constraint EquationSystem::parse_constraint(const std::string& text) const {
  return solve(parse_raw_formula(text, sig_));
}

std::optional<std::pair<Constraint, std::vector<std::string>>> EquationSystem::open_existentials(
    const Constraint& c, FreshNames& names) const {
  const FormulaData& p = payload(c);
  if (p.is_false || p.bound.empty()) return std::nullopt;
  FormulaData d;
  Subst rename;
  std::vector<std::string> opened;
  for (const auto& b : p.bound) {
    std::string nn = names.fresh("v");
    rename.emplace(b, Term::var(nn));
    opened.push_back(nn);
  }
  for (const auto& [x, t] : p.eqs) d.eqs.emplace(x, t.apply(rename));
  for (const auto& q : p.preds) {
    PredAtom a{q.pred, {}};
    for (const auto& t : q.args) a.args.push_back(t.apply(rename));
    d.preds.push_back(std::move(a));
  }
  return std::make_pair(make(canonicalize(std::move(d))), opened);
}

Constraint EquationSystem::import(const Constraint& c) const {
  const auto* other = dynamic_cast<const EquationSystem*>(c.system());
  check_usage(other != nullptr, "import expects an equation-based constraint");
  const FormulaData& p = other->payload(c);
  RawFormula raw;
  raw.is_false = p.is_false;
  raw.bound = p.bound;
  for (const auto& [x, t] : p.eqs) raw.equations.emplace_back(Term::var(x), t);
  raw.preds = p.preds;
  return solve(raw);
}

}  // namespace utcc
