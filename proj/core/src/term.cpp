#include "utcc/term.hpp"

#include <algorithm>
#include <functional>

#include "utcc/errors.hpp"

namespace utcc {

namespace {
std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
}  // namespace

Term Term::var(const std::string& name) {
  Term t;
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->sym = name;
  n->hash = hash_combine(0x1, std::hash<std::string>{}(name));
  t.node_ = std::move(n);
  return t;
}

Term Term::app(const std::string& sym, TermVec args) {
  Term t;
  auto n = std::make_shared<Node>();
  n->is_var = false;
  n->sym = sym;
  std::size_t h = hash_combine(0x2, std::hash<std::string>{}(sym));
  for (const auto& a : args) h = hash_combine(h, a.hash());
  n->args = std::move(args);
  n->hash = h;
  t.node_ = std::move(n);
  return t;
}

bool Term::operator==(const Term& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->hash != o.node_->hash) return false;
  return compare(o) == 0;
}

int Term::compare(const Term& o) const {
  if (node_ == o.node_) return 0;
  if (node_->is_var != o.node_->is_var) return node_->is_var ? -1 : 1;
  if (int c = node_->sym.compare(o.node_->sym)) return c < 0 ? -1 : 1;
  const auto& a = node_->args;
  const auto& b = o.node_->args;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = a[i].compare(b[i])) return c;
  return 0;
}

void Term::collect_vars(VarSet& out) const {
  if (node_->is_var) {
    out.insert(node_->sym);
    return;
  }
  for (const auto& a : node_->args) a.collect_vars(out);
}

VarSet Term::vars() const {
  VarSet out;
  collect_vars(out);
  return out;
}

bool Term::contains_var(const std::string& v) const {
  if (node_->is_var) return node_->sym == v;
  for (const auto& a : node_->args)
    if (a.contains_var(v)) return true;
  return false;
}

Term Term::apply(const Subst& s) const {
  if (node_->is_var) {
    auto it = s.find(node_->sym);
    return it == s.end() ? *this : it->second;
  }
  if (node_->args.empty()) return *this;
  bool changed = false;
  TermVec args;
  args.reserve(node_->args.size());
  for (const auto& a : node_->args) {
    args.push_back(a.apply(s));
    if (!(args.back() == a)) changed = true;
  }
  return changed ? Term::app(node_->sym, std::move(args)) : *this;
}

void Term::collect_subterms(std::set<Term>& out) const {
  if (!out.insert(*this).second) return;
  if (!node_->is_var)
    for (const auto& a : node_->args) a.collect_subterms(out);
}

std::string Term::str() const {
  if (node_->is_var) return node_->sym;
  if (node_->args.empty()) return node_->sym;
  std::string s = node_->sym + "(";
  for (std::size_t i = 0; i < node_->args.size(); ++i) {
    if (i) s += ",";
    s += node_->args[i].str();
  }
  return s + ")";
}

bool match_term(const Term& pattern, const Term& subject, const VarSet& holes,
                Subst& binding) {
  if (pattern.is_var() && holes.count(pattern.sym())) {
    auto it = binding.find(pattern.sym());
    if (it != binding.end()) return it->second == subject;
    binding.emplace(pattern.sym(), subject);
    return true;
  }
  if (pattern.is_var() || subject.is_var())
    return pattern.is_var() == subject.is_var() && pattern.sym() == subject.sym();
  if (pattern.sym() != subject.sym() || pattern.args().size() != subject.args().size())
    return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_term(pattern.args()[i], subject.args()[i], holes, binding)) return false;
  return true;
}

void Signature::merge(const Signature& other) {
  constants.insert(other.constants.begin(), other.constants.end());
  for (const auto& [f, n] : other.functions) {
    auto it = functions.find(f);
    check_usage(it == functions.end() || it->second == n,
                "conflicting arity for function " + f);
    functions[f] = n;
  }
  for (const auto& [p, n] : other.predicates) {
    auto it = predicates.find(p);
    check_usage(it == predicates.end() || it->second == n,
                "conflicting arity for predicate " + p);
    predicates[p] = n;
  }
}

void TermUniverse::add(const Term& t) {
  std::set<Term> subs;
  t.collect_subterms(subs);
  for (const auto& s : subs) {
    if (index_.insert(s).second) terms_.push_back(s);
  }
  std::sort(terms_.begin(), terms_.end());
}

void TermUniverse::add_all(const TermVec& ts) {
  for (const auto& t : ts) add(t);
}

TermVec TermUniverse::admissible_for(const VarSet& avoid) const {
  TermVec out;
  for (const auto& t : terms_) {
    bool ok = true;
    for (const auto& v : avoid)
      if (t.contains_var(v)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(t);
  }
  return out;
}

TermUniverse TermUniverse::generate(const Signature& sig,
                                    const std::vector<std::string>& vars, int depth,
                                    std::size_t max_terms) {
  TermUniverse u;
  TermVec layer;
  for (const auto& v : vars) layer.push_back(Term::var(v));
  for (const auto& c : sig.constants) layer.push_back(Term::app(c));
  u.add_all(layer);
  TermVec all = u.terms_;
  for (int d = 0; d < depth; ++d) {
    TermVec next;
    for (const auto& [f, arity] : sig.functions) {
      // Cartesian product over current terms, one slot at a time.
      std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
      if (arity == 0) continue;
      while (true) {
        TermVec args;
        for (int i = 0; i < arity; ++i) args.push_back(all[idx[static_cast<std::size_t>(i)]]);
        next.push_back(Term::app(f, std::move(args)));
        check_usage(u.size() + next.size() <= max_terms,
                    "term universe exceeds size cap; lower the depth bound");
        int i = arity - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == all.size()) {
          idx[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
    u.add_all(next);
    all = u.terms_;
  }
  return u;
}

std::string FreshNames::fresh(const std::string& base) {
  return base + "'" + std::to_string(++counter_);
}

}  // namespace utcc
