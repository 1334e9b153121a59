#include "utcc/groundness.hpp"

#include <algorithm>

#include "utcc/parser.hpp"

namespace utcc {

namespace {

bool is_nil_term(const Term& t) { return !t.is_var() && t.sym() == "nil" && t.args().empty(); }
bool is_cons_term(const Term& t) {
  return !t.is_var() && t.sym() == "cons" && t.args().size() == 2;
}
bool is_ground_list(const Term& t) {
  if (is_nil_term(t)) return true;
  if (!is_cons_term(t)) return false;
  return t.args()[1].is_var() ? false : is_ground_list(t.args()[1]);
}

}  // namespace

PosBits::PosBits(std::size_t nvars, bool all) : nvars_(nvars) {
  std::size_t count = std::size_t{1} << nvars;
  words_.assign((count + 63) / 64, all ? ~std::uint64_t{0} : 0);
  if (all && count % 64 != 0) words_.back() = (std::uint64_t{1} << (count % 64)) - 1;
  if (all && count < 64) words_.back() = (count == 64) ? ~std::uint64_t{0}
                                                       : ((std::uint64_t{1} << count) - 1);
}

bool PosBits::get(std::size_t m) const { return (words_[m / 64] >> (m % 64)) & 1; }

void PosBits::set(std::size_t m, bool v) {
  if (v)
    words_[m / 64] |= std::uint64_t{1} << (m % 64);
  else
    words_[m / 64] &= ~(std::uint64_t{1} << (m % 64));
}

bool PosBits::is_all() const {
  PosBits all(nvars_, true);
  return words_ == all.words_;
}

bool PosBits::is_empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

bool PosBits::subset_of(const PosBits& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

PosBits PosBits::and_with(const PosBits& o) const {
  PosBits r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
  return r;
}

PosBits PosBits::forget(std::size_t var) const {
  PosBits r(nvars_, false);
  std::size_t count = std::size_t{1} << nvars_;
  std::size_t bit = std::size_t{1} << var;
  for (std::size_t m = 0; m < count; ++m)
    if (get(m | bit) || get(m & ~bit)) r.set(m, true);
  return r;
}

std::string PosBits::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto w : words_)
    for (int i = 0; i < 16; ++i) s += digits[(w >> (4 * i)) & 0xf];
  return s;
}

PosBits PosBits::from_hex(std::size_t nvars, const std::string& hex) {
  PosBits r(nvars, false);
  for (std::size_t j = 0; j < hex.size() && j / 16 < r.words_.size(); ++j) {
    char c = hex[j];
    std::uint64_t v = (c >= 'a') ? static_cast<std::uint64_t>(c - 'a' + 10)
                                 : static_cast<std::uint64_t>(c - '0');
    r.words_[j / 16] |= v << (4 * (j % 16));
  }
  return r;
}

std::string TypeAtom::str() const {
  switch (kind) {
    case Kind::Nil:
      return "nil(" + a + ")";
    case Kind::List:
      return "list(" + a + ")";
    case Kind::ListPair:
      return "list(" + a + "," + b + ")";
  }
  return "?";
}

TypeConj saturate_types(const TypeConj& t) {
  TypeConj out = t;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<TypeAtom> add;
    for (const auto& a : out) {
      if (a.kind == TypeAtom::Kind::Nil &&
          !out.count({TypeAtom::Kind::List, a.a, ""}))
        add.push_back({TypeAtom::Kind::List, a.a, ""});
      if (a.kind == TypeAtom::Kind::ListPair &&
          out.count({TypeAtom::Kind::List, a.b, ""}) &&
          !out.count({TypeAtom::Kind::List, a.a, ""}))
        add.push_back({TypeAtom::Kind::List, a.a, ""});
    }
    for (const auto& a : add) {
      out.insert(a);
      changed = true;
    }
  }
  return out;
}

GroundnessSystem::GroundnessSystem(std::vector<std::string> pool, bool with_types,
                                   std::size_t max_pool)
    : pool_(std::move(pool)), with_types_(with_types) {
  check_usage(pool_.size() <= max_pool,
              "groundness pool has " + std::to_string(pool_.size()) +
                  " variables; the configured cap is " + std::to_string(max_pool));
  check_usage(pool_.size() <= 22, "groundness pool too large for truth-table bitsets");
  for (std::size_t i = 0; i < pool_.size(); ++i)
    check_usage(index_.emplace(pool_[i], i).second, "duplicate pool variable " + pool_[i]);
}

std::size_t GroundnessSystem::var_index(const std::string& v) const {
  auto it = index_.find(v);
  check_usage(it != index_.end(), "variable " + v + " is not in the groundness pool");
  return it->second;
}

Constraint GroundnessSystem::make(PosBits g, TypeConj t) const {
  auto d = std::make_shared<Data>();
  d->g = std::move(g);
  // Stored saturated: entailment is then plain containment.
  d->t = with_types_ ? saturate_types(t) : TypeConj{};
  d->cached_key = d->g.hex() + "|";
  for (const auto& atom : d->t) d->cached_key += atom.str() + ";";
  d->cached_hash = std::hash<std::string>{}(d->cached_key);
  return Constraint(this, std::move(d));
}

Constraint GroundnessSystem::true_c() const { return make(PosBits(pool_.size(), true), {}); }

Constraint GroundnessSystem::false_c() const {
  auto d = std::make_shared<Data>();
  d->is_false = true;
  d->g = PosBits(pool_.size(), false);
  d->cached_key = "F";
  d->cached_hash = std::hash<std::string>{}(d->cached_key);
  return Constraint(this, std::move(d));
}

const PosBits& GroundnessSystem::pos_of(const Constraint& c) const { return payload(c).g; }
const TypeConj& GroundnessSystem::types_of(const Constraint& c) const {
  return payload(c).t;
}

Constraint GroundnessSystem::lub(const Constraint& c, const Constraint& d) const {
  const Data& a = payload(c);
  const Data& b = payload(d);
  if (a.is_false || b.is_false) return false_c();
  TypeConj t = a.t;
  t.insert(b.t.begin(), b.t.end());
  return make(a.g.and_with(b.g), std::move(t));
}

bool GroundnessSystem::entails(const Constraint& d, const Constraint& c) const {
  const Data& a = payload(d);
  const Data& b = payload(c);
  if (a.is_false) return true;
  if (b.is_false) return false;
  if (!a.g.subset_of(b.g)) return false;
  if (!with_types_) return true;
  for (const auto& atom : b.t)
    if (!a.t.count(atom)) return false;
  return true;
}

Constraint GroundnessSystem::hide(const std::vector<std::string>& xs,
                                  const Constraint& c) const {
  const Data& a = payload(c);
  if (a.is_false) return c;
  PosBits g = a.g;
  for (const auto& x : xs) {
    auto it = index_.find(x);
    if (it != index_.end()) g = g.forget(it->second);
  }
  TypeConj t = saturate_types(a.t);
  std::set<std::string> hiding(xs.begin(), xs.end());
  TypeConj kept;
  for (const auto& atom : t) {
    if (hiding.count(atom.a)) continue;
    if (atom.kind == TypeAtom::Kind::ListPair && hiding.count(atom.b)) continue;
    kept.insert(atom);
  }
  return make(std::move(g), std::move(kept));
}

namespace {

// Groundness/type contribution of a single solved equation x = t, with
// `extra` naming the (existential) variables that extend the pool.
struct EqAbsorber {
  const std::vector<std::string>& pool;
  const std::map<std::string, std::size_t>& index;
  const std::vector<std::string>& extra;

  std::optional<std::size_t> pos_index(const std::string& v) const {
    auto it = index.find(v);
    if (it != index.end()) return it->second;
    for (std::size_t i = 0; i < extra.size(); ++i)
      if (extra[i] == v) return pool.size() + i;
    return std::nullopt;
  }

  // x <-> (/\ vars t) compiled to bit tests: lhs bit and rhs mask.
  // Equations mentioning untracked variables are skipped (a sound
  // weakening): skip == true.
  struct CompiledEq {
    bool skip = false;
    std::size_t lhs_bit = 0;
    std::size_t rhs_mask = 0;
  };

  CompiledEq compile_eq(const std::string& x, const Term& t) const {
    CompiledEq ce;
    auto xi = pos_index(x);
    if (!xi) {
      ce.skip = true;
      return ce;
    }
    ce.lhs_bit = std::size_t{1} << *xi;
    for (const auto& v : t.vars()) {
      auto vi = pos_index(v);
      if (!vi) {
        ce.skip = true;
        return ce;
      }
      ce.rhs_mask |= std::size_t{1} << *vi;
    }
    return ce;
  }

  static bool eval_compiled(const CompiledEq& ce, std::size_t assignment) {
    if (ce.skip) return true;
    bool lhs = (assignment & ce.lhs_bit) != 0;
    bool rhs = (assignment & ce.rhs_mask) == ce.rhs_mask;
    return lhs == rhs;
  }

  bool eval_eq(const std::string& x, const Term& t, std::size_t assignment) const {
    return eval_compiled(compile_eq(x, t), assignment);
  }

  void type_atoms(const std::string& x, const Term& t, TypeConj& out) const {
    if (is_nil_term(t)) {
      out.insert({TypeAtom::Kind::Nil, x, ""});
      return;
    }
    if (is_cons_term(t)) {
      const Term& tail = t.args()[1];
      if (tail.is_var())
        out.insert({TypeAtom::Kind::ListPair, x, tail.sym()});
      else if (is_ground_list(tail))
        out.insert({TypeAtom::Kind::List, x, ""});
      else if (is_cons_term(tail)) {
        // x = [h | t'] with a structured tail: x is a cons cell whose
        // list-ness follows the tail's; approximate through the tail when
        // it eventually reaches a variable.
        Term cursor = tail;
        while (is_cons_term(cursor)) cursor = cursor.args()[1];
        if (cursor.is_var())
          out.insert({TypeAtom::Kind::ListPair, x, cursor.sym()});
        else if (is_nil_term(cursor))
          out.insert({TypeAtom::Kind::List, x, ""});
      }
    }
  }
};

}  // namespace

Constraint GroundnessSystem::alpha_from(const Constraint& herbrand) const {
  const auto* eq = dynamic_cast<const EquationSystem*>(herbrand.system());
  check_usage(eq != nullptr, "groundness abstraction expects an equation-based constraint");
  const FormulaData& p = eq->payload(herbrand);
  if (p.is_false) return false_c();
  check_usage(p.bound.size() <= 12, "too many existential variables for the abstraction");

  std::size_t n = pool_.size();
  std::size_t nb = p.bound.size();
  EqAbsorber ab{pool_, index_, p.bound};

  PosBits g(n, false);
  std::vector<EqAbsorber::CompiledEq> compiled;
  for (const auto& [x, t] : p.eqs) {
    auto ce = ab.compile_eq(x, t);
    if (!ce.skip) compiled.push_back(ce);
  }
  std::size_t pool_count = std::size_t{1} << n;
  std::size_t bound_count = std::size_t{1} << nb;
  for (std::size_t m = 0; m < pool_count; ++m) {
    bool sat = false;
    for (std::size_t b = 0; b < bound_count && !sat; ++b) {
      std::size_t assignment = m | (b << n);
      bool all = true;
      for (const auto& ce : compiled)
        if (!EqAbsorber::eval_compiled(ce, assignment)) {
          all = false;
          break;
        }
      sat = all;
    }
    if (sat) g.set(m, true);
  }

  TypeConj t;
  for (const auto& [x, term] : p.eqs) ab.type_atoms(x, term, t);
  // Cons-tail facts modulo the equality theory: the solved form may have
  // substituted a variable's value into a tail position, so x=[h|v] is
  // recovered from x=[h|t] whenever some v is solved to exactly t.
  for (const auto& [x, term] : p.eqs) {
    if (!is_cons_term(term)) continue;
    const Term& tail = term.args()[1];
    for (const auto& [v, tv] : p.eqs) {
      if (v != x && tv == tail) t.insert({TypeAtom::Kind::ListPair, x, v});
    }
  }
  t = saturate_types(t);
  std::set<std::string> bound(p.bound.begin(), p.bound.end());
  TypeConj kept;
  for (const auto& atom : t) {
    if (bound.count(atom.a)) continue;
    if (atom.kind == TypeAtom::Kind::ListPair && bound.count(atom.b)) continue;
    kept.insert(atom);
  }
  return make(std::move(g), std::move(kept));
}

Constraint GroundnessSystem::diag(const std::vector<std::string>& xs,
                                  const TermVec& ts) const {
  check_usage(xs.size() == ts.size(), "diag: length mismatch");
  static const std::vector<std::string> no_extra;
  EqAbsorber ab{pool_, index_, no_extra};
  std::size_t n = pool_.size();
  PosBits g(n, false);
  std::vector<EqAbsorber::CompiledEq> compiled;
  for (std::size_t i = 0; i < xs.size(); ++i) compiled.push_back(ab.compile_eq(xs[i], ts[i]));
  std::size_t count = std::size_t{1} << n;
  for (std::size_t m = 0; m < count; ++m) {
    bool all = true;
    for (const auto& ce : compiled)
      if (!EqAbsorber::eval_compiled(ce, m)) {
        all = false;
        break;
      }
    if (all) g.set(m, true);
  }
  TypeConj t;
  for (std::size_t i = 0; i < xs.size(); ++i) ab.type_atoms(xs[i], ts[i], t);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!is_cons_term(ts[i])) continue;
    const Term& tail = ts[i].args()[1];
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != i && ts[j] == tail) t.insert({TypeAtom::Kind::ListPair, xs[i], xs[j]});
  }
  return make(std::move(g), saturate_types(t));
}

VarSet GroundnessSystem::free_vars(const Constraint& c) const {
  const Data& a = payload(c);
  VarSet out;
  if (a.is_false) return out;
  for (std::size_t i = 0; i < pool_.size(); ++i)
    if (!(a.g.forget(i) == a.g)) out.insert(pool_[i]);
  for (const auto& atom : a.t) {
    out.insert(atom.a);
    if (atom.kind == TypeAtom::Kind::ListPair) out.insert(atom.b);
  }
  return out;
}

bool GroundnessSystem::is_false(const Constraint& c) const { return payload(c).is_false; }

std::string GroundnessSystem::key(const Constraint& c) const {
  return payload(c).cached_key;
}

std::size_t GroundnessSystem::key_hash(const Constraint& c) const {
  return payload(c).cached_hash;
}

std::string GroundnessSystem::print(const Constraint& c) const {
  const Data& a = payload(c);
  std::string pos;
  if (a.is_false) {
    pos = "false";
  } else if (a.g.is_all()) {
    pos = "true";
  } else {
    // Try a pure conjunction of ground variables.
    std::vector<std::string> ground;
    PosBits conj(pool_.size(), true);
    std::size_t count = std::size_t{1} << pool_.size();
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      bool forced = true;
      for (std::size_t m = 0; m < count && forced; ++m)
        if (a.g.get(m) && !((m >> i) & 1)) forced = false;
      if (forced) {
        ground.push_back(pool_[i]);
        for (std::size_t m = 0; m < count; ++m)
          if (!((m >> i) & 1)) conj.set(m, false);
      }
    }
    if (conj == a.g && !ground.empty()) {
      for (std::size_t i = 0; i < ground.size(); ++i) {
        if (i) pos += " /\\ ";
        pos += ground[i];
      }
    } else {
      pos = "posmodels(" + a.g.hex() + ")";
    }
  }
  if (!with_types_) return pos;
  std::string types;
  if (a.is_false) {
    types = "false";
  } else if (a.t.empty()) {
    types = "true";
  } else {
    bool first = true;
    for (const auto& atom : a.t) {
      if (!first) types += " /\\ ";
      types += atom.str();
      first = false;
    }
  }
  return "<" + pos + ", " + types + ">";
}

namespace {

bool eval_pos_expr(const PosExpr& e, const std::map<std::string, std::size_t>& index,
                   std::size_t m) {
  switch (e.kind) {
    case PosExpr::Kind::True:
      return true;
    case PosExpr::Kind::False:
      return false;
    case PosExpr::Kind::Var: {
      auto it = index.find(e.var);
      check_usage(it != index.end(), "variable " + e.var + " is not in the groundness pool");
      return (m >> it->second) & 1;
    }
    case PosExpr::Kind::And:
      return eval_pos_expr(e.children[0], index, m) && eval_pos_expr(e.children[1], index, m);
    case PosExpr::Kind::Or:
      return eval_pos_expr(e.children[0], index, m) || eval_pos_expr(e.children[1], index, m);
    case PosExpr::Kind::Iff:
      return eval_pos_expr(e.children[0], index, m) == eval_pos_expr(e.children[1], index, m);
  }
  return false;
}

}  // namespace

Constraint GroundnessSystem::parse_constraint(const std::string& text) const {
  std::string pos_text = text;
  std::string type_text;
  if (with_types_) {
    auto [l, r] = split_angle_pair(text);
    pos_text = l;
    type_text = r;
  }
  std::string trimmed;
  for (char ch : pos_text)
    if (!isspace(static_cast<unsigned char>(ch))) trimmed += ch;
  if (trimmed == "false") return false_c();

  PosBits g(pool_.size(), false);
  if (trimmed.rfind("posmodels(", 0) == 0 && trimmed.back() == ')') {
    g = PosBits::from_hex(pool_.size(), trimmed.substr(10, trimmed.size() - 11));
  } else {
    PosExpr e = parse_pos_expr(pos_text);
    std::size_t count = std::size_t{1} << pool_.size();
    for (std::size_t m = 0; m < count; ++m)
      if (eval_pos_expr(e, index_, m)) g.set(m, true);
  }
  TypeConj t;
  if (with_types_ && !type_text.empty()) {
    for (const auto& a : parse_simple_atoms(type_text)) {
      if (a.pred == "nil" && a.args.size() == 1) {
        t.insert({TypeAtom::Kind::Nil, a.args[0].sym(), ""});
      } else if (a.pred == "list" && a.args.size() == 1) {
        t.insert({TypeAtom::Kind::List, a.args[0].sym(), ""});
      } else if (a.pred == "list" && a.args.size() == 2) {
        t.insert({TypeAtom::Kind::ListPair, a.args[0].sym(), a.args[1].sym()});
      } else {
        throw UsageError("unknown type atom " + a.str());
      }
    }
  }
  return make(std::move(g), saturate_types(t));
}

bool GroundnessSystem::tilde_entails(const Constraint& d_abs,
                                     const Constraint& herbrand_goal) const {
  const Data& a = payload(d_abs);
  if (a.is_false) return true;
  const auto* eq = dynamic_cast<const EquationSystem*>(herbrand_goal.system());
  check_usage(eq != nullptr, "tilde entailment expects a Herbrand goal");
  const FormulaData& goal = eq->payload(herbrand_goal);
  if (goal.is_false) return false;
  if (!goal.preds.empty()) return false;  // predicates are not certified
  if (!with_types_) return goal.eqs.empty();
  const TypeConj& sat = a.t;
  std::set<std::string> bound(goal.bound.begin(), goal.bound.end());
  for (const auto& [x, t] : goal.eqs) {
    if (is_nil_term(t)) {
      if (!sat.count({TypeAtom::Kind::Nil, x, ""})) return false;
      continue;
    }
    if (is_cons_term(t) && t.args()[0].is_var() && bound.count(t.args()[0].sym()) &&
        t.args()[1].is_var() && bound.count(t.args()[1].sym())) {
      // exists x',x''.(x = [x'|x'']): certified by any cons-cell fact.
      bool found = false;
      for (const auto& atom : sat)
        if (atom.kind == TypeAtom::Kind::ListPair && atom.a == x) found = true;
      if (!found) return false;
      continue;
    }
    return false;  // not certifiable in this domain
  }
  return true;
}

}  // namespace utcc
