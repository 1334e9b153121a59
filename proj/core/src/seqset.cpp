#include "utcc/seqset.hpp"

#include <algorithm>
#include <thread>

#include "json.hpp"
#include "utcc/errors.hpp"

namespace utcc {

namespace {
constexpr std::size_t kTupleCap = 200000;
}

ConstraintSeq ConstraintSeq::tail() const {
  check_internal(!items_.empty(), "tail of the empty sequence");
  return ConstraintSeq(std::vector<Constraint>(items_.begin() + 1, items_.end()));
}

ConstraintSeq ConstraintSeq::prepend(const Constraint& c) const {
  std::vector<Constraint> out;
  out.reserve(items_.size() + 1);
  out.push_back(c);
  out.insert(out.end(), items_.begin(), items_.end());
  return ConstraintSeq(std::move(out));
}

ConstraintSeq ConstraintSeq::truncate(std::size_t k) const {
  if (items_.size() <= k) return *this;
  return ConstraintSeq(std::vector<Constraint>(items_.begin(), items_.begin() + k));
}

ConstraintSeq ConstraintSeq::pad_true(std::size_t n) const {
  if (items_.size() >= n) return *this;
  check_internal(!items_.empty(), "cannot pad an empty sequence without a system");
  std::vector<Constraint> out = items_;
  while (out.size() < n) out.push_back(items_.front().system()->true_c());
  return ConstraintSeq(std::move(out));
}

std::string ConstraintSeq::str() const {
  std::string s;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) s += " . ";
    s += items_[i].str();
  }
  return items_.empty() ? "<empty>" : s;
}

std::string ConstraintSeq::key() const {
  std::string s;
  for (const auto& c : items_) s += c.system()->key(c) + "\x1f";
  return s;
}

bool ConstraintSeq::operator==(const ConstraintSeq& o) const { return key() == o.key(); }

std::string ConstraintSeq::digest() const {
  std::uint64_t h1 = 0xcbf29ce484222325ULL;
  std::uint64_t h2 = 0x9e3779b97f4a7c15ULL;
  for (const auto& c : items_) {
    std::uint64_t k = c.system()->key_hash(c);
    h1 = (h1 ^ k) * 0x100000001b3ULL;
    h2 = (h2 + k) * 0xff51afd7ed558ccdULL;
    h2 ^= h2 >> 33;
    h1 = (h1 ^ 0x1f) * 0x100000001b3ULL;
    h2 = (h2 + items_.size()) * 0xc4ceb9fe1a85ec53ULL;
  }
  char buf[40];
  snprintf(buf, sizeof(buf), "%016llx%016llx-%zu", (unsigned long long)h1,
           (unsigned long long)h2, items_.size());
  return std::string(buf);
}

bool seq_leq(const ConstraintSeq& s, const ConstraintSeq& t) {
  if (s.size() > t.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.at(i).system()->entails(t.at(i), s.at(i))) return false;
  return true;
}

bool seq_equiv(const ConstraintSeq& s, const ConstraintSeq& t) {
  return s.size() == t.size() && seq_leq(s, t) && seq_leq(t, s);
}

ConstraintSeq seq_hide(const std::vector<std::string>& xs, const ConstraintSeq& s) {
  std::vector<Constraint> out;
  for (const auto& c : s.items()) out.push_back(c.system()->hide(xs, c));
  return ConstraintSeq(std::move(out));
}

bool seq_variant_of(const std::vector<std::string>& xs, const ConstraintSeq& s,
                    const ConstraintSeq& t) {
  if (s.size() != t.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const ConstraintSystem* sys = s.at(i).system();
    if (!sys->equivalent(sys->hide(xs, s.at(i)), sys->hide(xs, t.at(i)))) return false;
  }
  return true;
}

ConstraintSeq seq_lub(const ConstraintSeq& s, const ConstraintSeq& t) {
  check_usage(s.size() == t.size(), "seq_lub: length mismatch");
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    out.push_back(s.at(i).system()->lub(s.at(i), t.at(i)));
  return ConstraintSeq(std::move(out));
}

ConstraintSeq false_seq(const ConstraintSystem* sys, std::size_t k) {
  std::vector<Constraint> out(k, sys->false_c());
  return ConstraintSeq(std::move(out));
}

// --- SeqSet ------------------------------------------------------------------

SeqSet SeqSet::explicit_set(std::size_t k, std::vector<Constraint> elements,
                            std::set<ConstraintSeq> members) {
  SeqSet s;
  s.k_ = k;
  s.sys_ = elements.empty() ? nullptr : elements.front().system();
  s.elements_ = std::move(elements);
  if (s.sys_) members.insert(false_seq(s.sys_, k));
  s.explicit_ = std::move(members);
  return s;
}

SeqSet SeqSet::predicate(std::size_t k, const ConstraintSystem* sys, Pred member,
                         std::vector<Constraint> elements) {
  SeqSet s;
  s.k_ = k;
  s.sys_ = sys;
  s.pred_ = std::move(member);
  s.elements_ = std::move(elements);
  return s;
}

SeqSet SeqSet::full(std::size_t k, const ConstraintSystem* sys,
                    std::vector<Constraint> elements) {
  return predicate(
      k, sys, [](const ConstraintSeq&) { return true; }, std::move(elements));
}

bool SeqSet::contains(const ConstraintSeq& s) const {
  if (sys_ && s.size() == k_) {
    bool all_false = true;
    for (const auto& c : s.items())
      if (!c.system()->is_false(c)) {
        all_false = false;
        break;
      }
    if (all_false) return true;  // false^k is a member of every set
  }
  if (explicit_) {
    if (explicit_->count(s)) return true;
    for (const auto& m : *explicit_)
      if (seq_equiv(m, s)) return true;
    return false;
  }
  return pred_(s);
}

SeqSet SeqSet::materialize(int threads) const {
  if (explicit_) return *this;
  check_usage(!elements_.empty(), "materialize needs an enumerated element list");
  std::vector<ConstraintSeq> all;
  std::vector<std::size_t> idx(k_, 0);
  if (k_ == 0) {
    all.emplace_back();
  } else {
    for (;;) {
      std::vector<Constraint> seq;
      for (std::size_t i = 0; i < k_; ++i) seq.push_back(elements_[idx[i]]);
      all.emplace_back(std::move(seq));
      std::size_t i = k_;
      while (i > 0 && ++idx[i - 1] == elements_.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  std::vector<char> in(all.size(), 0);
  int nw = std::max(1, threads);
  if (nw == 1) {
    for (std::size_t i = 0; i < all.size(); ++i) in[i] = contains(all[i]) ? 1 : 0;
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (all.size() + static_cast<std::size_t>(nw) - 1) / static_cast<std::size_t>(nw);
    for (int w = 0; w < nw; ++w) {
      std::size_t b = static_cast<std::size_t>(w) * chunk;
      std::size_t e = std::min(all.size(), b + chunk);
      if (b >= e) break;
      workers.emplace_back([this, &all, &in, b, e] {
        for (std::size_t i = b; i < e; ++i) in[i] = contains(all[i]) ? 1 : 0;
      });
    }
    for (auto& t : workers) t.join();
  }
  std::set<ConstraintSeq> members;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (in[i]) members.insert(all[i]);
  return explicit_set(k_, elements_, std::move(members));
}

const std::set<ConstraintSeq>& SeqSet::members() const {
  check_usage(explicit_.has_value(), "members() requires an explicit set; materialize first");
  return *explicit_;
}

std::string SeqSet::to_json() const {
  check_usage(explicit_.has_value(), "serialization requires an explicit set");
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : *explicit_) {
    nlohmann::json seq = nlohmann::json::array();
    for (const auto& c : s.items()) seq.push_back(c.str());
    arr.push_back(seq);
  }
  return arr.dump(2);
}

// --- operators ---------------------------------------------------------------

SeqSet up_close(const Constraint& c, std::size_t k, std::vector<Constraint> elements) {
  const ConstraintSystem* sys = c.system();
  return SeqSet::predicate(
      k, sys,
      [c, sys](const ConstraintSeq& s) {
        return s.empty() || sys->entails(s.at(0), c);
      },
      std::move(elements));
}

SeqSet complement_head(const Constraint& c, std::size_t k, std::vector<Constraint> elements) {
  const ConstraintSystem* sys = c.system();
  return SeqSet::predicate(
      k, sys,
      [c, sys](const ConstraintSeq& s) {
        return s.empty() || !sys->entails(s.at(0), c);
      },
      std::move(elements));
}

SeqSet intersect(const SeqSet& a, const SeqSet& b) {
  check_usage(a.k() == b.k(), "intersect: mismatched cut lengths");
  SeqSet aa = a, bb = b;
  return SeqSet::predicate(
      a.k(), a.system(),
      [aa, bb](const ConstraintSeq& s) { return aa.contains(s) && bb.contains(s); },
      a.elements().empty() ? b.elements() : a.elements());
}

SeqSet unite(const SeqSet& a, const SeqSet& b) {
  check_usage(a.k() == b.k(), "unite: mismatched cut lengths");
  SeqSet aa = a, bb = b;
  return SeqSet::predicate(
      a.k(), a.system(),
      [aa, bb](const ConstraintSeq& s) { return aa.contains(s) || bb.contains(s); },
      a.elements().empty() ? b.elements() : a.elements());
}

SeqSet shift(const SeqSet& s) {
  SeqSet inner = s;
  return SeqSet::predicate(
      s.k() + 1, s.system(),
      [inner](const ConstraintSeq& q) { return q.empty() || inner.contains(q.tail()); },
      s.elements());
}

std::vector<ConstraintSeq> seq_openings(const ConstraintSeq& s) {
  std::vector<ConstraintSeq> out{s};
  FreshNames names;
  bool any = false;
  std::vector<Constraint> opened;
  for (const auto& c : s.items()) {
    auto o = c.system()->open_existentials(c, names);
    if (o) {
      any = true;
      opened.push_back(o->first);
    } else {
      opened.push_back(c);
    }
  }
  if (any) out.emplace_back(std::move(opened));
  return out;
}

ConstraintSeq diag_variant(const std::vector<std::string>& xs, const TermVec& ts,
                           const ConstraintSeq& s) {
  std::vector<Constraint> out;
  for (const auto& c : s.items()) {
    const ConstraintSystem* sys = c.system();
    out.push_back(sys->lub(sys->hide(xs, c), sys->diag(xs, ts)));
  }
  return ConstraintSeq(std::move(out));
}

namespace {

// All |xs|-tuples of universe terms admissible for xs.
std::vector<TermVec> admissible_tuples(const std::vector<std::string>& xs,
                                       const TermUniverse& tu) {
  VarSet avoid(xs.begin(), xs.end());
  TermVec choices = tu.admissible_for(avoid);
  std::vector<TermVec> out;
  std::vector<std::size_t> idx(xs.size(), 0);
  if (xs.empty()) return {TermVec{}};
  if (choices.empty()) return out;
  double estimate = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) estimate *= static_cast<double>(choices.size());
  check_usage(estimate <= static_cast<double>(kTupleCap),
              "term universe too large for quantifier enumeration");
  for (;;) {
    TermVec t;
    for (std::size_t i = 0; i < xs.size(); ++i) t.push_back(choices[idx[i]]);
    out.push_back(std::move(t));
    std::size_t i = xs.size();
    while (i > 0 && ++idx[i - 1] == choices.size()) idx[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

// Injective maps from `from` into `to`, as substitutions.
void injections(const std::vector<std::string>& from, const std::vector<std::string>& to,
                std::size_t i, Subst cur, std::vector<Subst>& out) {
  if (i == from.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& t : to) {
    bool used = false;
    for (const auto& [k, v] : cur)
      if (v.is_var() && v.sym() == t) used = true;
    if (used) continue;
    Subst next = cur;
    next.emplace(from[i], Term::var(t));
    injections(from, to, i + 1, std::move(next), out);
  }
}

}  // namespace

std::vector<ConstraintSeq> variant_candidates(const std::vector<std::string>& xs,
                                              const ConstraintSeq& s, const TermUniverse& tu) {
  std::vector<ConstraintSeq> out;
  std::set<std::string> seen;
  auto push = [&](const ConstraintSeq& c) {
    if (!seq_variant_of(xs, s, c)) return;
    if (seen.insert(c.key()).second) out.push_back(c);
  };
  push(s);
  ConstraintSeq base = seq_hide(xs, s);
  push(base);

  // Openings whose block variables are renamed into xs (scope extrusion).
  FreshNames names;
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    const Constraint& c = s.at(pos);
    auto o = c.system()->open_existentials(c, names);
    if (!o) continue;
    std::vector<Subst> maps;
    if (o->second.size() <= xs.size()) injections(o->second, xs, 0, {}, maps);
    for (const auto& m : maps) {
      // Rename the freshly opened names into xs via subst on the formula.
      std::vector<std::string> from;
      TermVec to;
      for (const auto& [v, t] : m) {
        from.push_back(v);
        to.push_back(t);
      }
      std::vector<Constraint> items = s.items();
      items[pos] = c.system()->subst(o->first, from, to);
      push(ConstraintSeq(std::move(items)));
    }
  }

  // Diagonal augmentations of the hidden base over the universe.
  if (!xs.empty() && tu.size() > 0) {
    VarSet avoid(xs.begin(), xs.end());
    TermVec choices = tu.admissible_for(avoid);
    if (choices.size() * xs.size() <= kTupleCap) {
      // Single-variable diagonals and full tuples.
      for (const auto& x : xs)
        for (const auto& t : choices) {
          std::vector<Constraint> items;
          for (const auto& c : base.items()) {
            const ConstraintSystem* sys = c.system();
            items.push_back(sys->lub(c, sys->diag({x}, {t})));
          }
          push(ConstraintSeq(std::move(items)));
        }
      if (xs.size() > 1) {
        double est = 1;
        for (std::size_t i = 0; i < xs.size(); ++i) est *= static_cast<double>(choices.size());
        if (est <= static_cast<double>(kTupleCap)) {
          for (const auto& t : admissible_tuples(xs, tu)) push(diag_variant(xs, t, s));
        }
      }
    }
  }
  return out;
}

SeqSet seq_exists(const std::vector<std::string>& xs, const SeqSet& s) {
  SeqSet inner = s;
  std::vector<std::string> vars = xs;
  return SeqSet::predicate(
      s.k(), s.system(),
      [inner, vars](const ConstraintSeq& q) {
        if (inner.is_explicit()) {
          for (const auto& m : inner.members())
            if (seq_variant_of(vars, q, m)) return true;
          return false;
        }
        const TermUniverse* tu = inner.system() ? inner.system()->universe() : nullptr;
        TermUniverse empty;
        for (const auto& v : variant_candidates(vars, q, tu ? *tu : empty))
          if (inner.contains(v)) return true;
        return false;
      },
      s.elements());
}

SeqSet seq_forall(const std::vector<std::string>& xs, const SeqSet& s,
                  const TermUniverse& tu) {
  SeqSet inner = s;
  std::vector<std::string> vars = xs;
  TermUniverse universe = tu;
  return SeqSet::predicate(
      s.k(), s.system(),
      [inner, vars, universe](const ConstraintSeq& q) {
        for (const auto& w : seq_openings(q)) {
          if (!inner.contains(w)) return false;
          for (const auto& t : admissible_tuples(vars, universe))
            if (!inner.contains(diag_variant(vars, t, w))) return false;
        }
        return true;
      },
      s.elements());
}

}  // namespace utcc
