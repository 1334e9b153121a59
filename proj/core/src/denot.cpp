#include "utcc/denot.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "utcc/errors.hpp"

namespace utcc {

namespace {

// Deterministic renaming of abstraction binders: a globally unique primed
// name per binder, so instantiation at evaluation time never captures.
// Local binders are left alone; they are renamed per time offset when the
// evaluation reaches them (the m1/m2 naming of unfolded instances).
Process rename_abs_binders(const Process& p, FreshNames& names) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Tell:
    case ProcKind::Call:
      return p;
    case ProcKind::Abs: {
      Subst rename;
      std::vector<std::string> binders;
      for (const auto& b : p.binders()) {
        // 'a-prefixed counters cannot collide with user names (primes are
        // reserved) or with the numeric local-instance names.
        std::string nb = names.fresh(b) ;
        nb = b + "'a" + nb.substr(nb.rfind('\'') + 1);
        rename.emplace(b, Term::var(nb));
        binders.push_back(nb);
      }
      FreshNames scratch;
      Process body = rename_abs_binders(subst_process(p.body(), rename, scratch), names);
      Constraint g = p.constraint();
      if (!rename.empty()) {
        std::vector<std::string> xs;
        TermVec ts;
        for (const auto& [v, t] : rename) {
          xs.push_back(v);
          ts.push_back(t);
        }
        g = g.system()->subst(g, xs, ts);
      }
      return Process::abs(binders, g, body);
    }
    case ProcKind::Local:
      return Process::local(p.binders(), rename_abs_binders(p.body(), names));
    case ProcKind::Par: {
      std::vector<Process> cs;
      for (const auto& q : p.children()) cs.push_back(rename_abs_binders(q, names));
      return Process::par(std::move(cs));
    }
    case ProcKind::Next:
      return Process::next(rename_abs_binders(p.body(), names));
    case ProcKind::Unless:
      return Process::unless(p.constraint(), rename_abs_binders(p.body(), names));
  }
  return p;
}

std::string ptr_key(const void* p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace

DenoteEngine::DenoteEngine(const Program& prog, const ConstraintSystem& target,
                           DenoteOptions opt)
    : target_(target), opt_(opt) {
  for (const auto& [name, d] : prog.decls) {
    Declaration nd = d;
    nd.body = rename_abs_binders(d.body, names_);
    prog_.decls.emplace(name, std::move(nd));
  }
  if (prog.main.valid()) prog_.main = rename_abs_binders(prog.main, names_);
  top_level_ = static_cast<int>((opt_.k + 1) * (prog.decls.size() + 1) + 1);
  if (opt_.abstract_mode)
    check_usage(opt_.desc != nullptr, "abstract mode needs a description");
}

std::shared_ptr<DenoteEngine> make_denote_engine(const Program& prog,
                                                 const ConstraintSystem& target,
                                                 DenoteOptions opt) {
  return std::make_shared<DenoteEngine>(prog, target, opt);
}

bool DenoteEngine::member(const ConstraintSeq& s, const Process& p) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  bool r = member_rec(s, p, top_level_);
  if (opt_.check_stabilization) {
    bool deeper = member_rec(s, p, top_level_ + 1);
    check_internal(r == deeper,
                   "fixpoint failed to stabilize within its bound at " + s.str());
  }
  return r;
}

bool DenoteEngine::member_of_main(const ConstraintSeq& s) { return member(s, prog_.main); }

bool DenoteEngine::member_of_call(const ConstraintSeq& s, const std::string& name,
                                  const TermVec& args) {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  return member(s, Process::call(name, args));
}

Constraint DenoteEngine::lift(const Constraint& c) {
  if (!opt_.abstract_mode) return c;
  std::string key = c.system()->key(c);
  auto it = lift_cache_.find(key);
  if (it != lift_cache_.end()) return it->second;
  Constraint a = opt_.desc->alpha(c);
  lift_cache_.emplace(std::move(key), a);
  return a;
}

bool DenoteEngine::guard_holds(const Constraint& element, const Constraint& guard) const {
  if (opt_.abstract_mode) return opt_.desc->abs_entails_conc(element, guard);
  return target_.entails(element, guard);
}

const Process& DenoteEngine::call_instance(const std::string& name, const TermVec& args) {
  std::string key = name + "(";
  for (const auto& t : args) key += t.str() + ",";
  key += ")";
  auto it = instances_.find(key);
  if (it != instances_.end()) return it->second;
  const Declaration& d = prog_.decl(name);
  check_usage(d.params.size() == args.size(), "arity mismatch calling " + name);
  Subst s;
  for (std::size_t i = 0; i < d.params.size(); ++i) s.emplace(d.params[i], args[i]);
  FreshNames scratch;
  Process inst = subst_process(d.body, s, scratch);
  return instances_.emplace(key, std::move(inst)).first->second;
}

std::vector<Subst> DenoteEngine::guard_candidates(const Constraint& head,
                                                  const Constraint& guard,
                                                  const std::vector<std::string>& binders) {
  std::string ckey = std::to_string(target_.key_hash(head)) + "|" +
                     std::to_string(guard.system()->key_hash(guard));
  for (const auto& b : binders) ckey += "," + b;
  auto hit = cand_cache_.find(ckey);
  if (hit != cand_cache_.end()) return hit->second;
  VarSet holes(binders.begin(), binders.end());
  Constraint g = lift(guard);
  std::vector<Subst> cands = target_.entail_assignments(head, g, holes);
  std::vector<Subst> out;
  for (auto& th : cands) {
    bool admissible = true;
    for (const auto& [x, t] : th) {
      (void)x;
      for (const auto& y : binders)
        if (t.contains_var(y)) admissible = false;
    }
    if (admissible) out.push_back(std::move(th));
  }
  cand_cache_.emplace(std::move(ckey), out);
  return out;
}

bool DenoteEngine::ask_member(const ConstraintSeq& s, const Constraint& guard,
                              const Process& body, int level) {
  if (s.empty()) return true;
  if (!guard_holds(s.at(0), guard)) return true;
  return member_rec(s, body, level);
}

bool DenoteEngine::abs_member(const ConstraintSeq& s, const Process& p, int level) {
  const std::vector<std::string>& xs = p.binders();
  if (xs.empty()) return ask_member(s, p.constraint(), p.body(), level);

  // Binders are renamed apart ('aN names) and can occur neither in
  // analysed sequences nor in instantiated bodies, so the diagonal
  // variant hide(xs, w) lub d_xs_ts decides exactly like w itself: the
  // diagonal only constrains xs, which nothing mentions.
  bool binders_reserved = true;
  for (const auto& x : xs)
    if (x.find("'a") == std::string::npos) binders_reserved = false;

  for (const auto& w : seq_openings(s)) {
    // The opened sequence itself must be quiescent for the ask.
    if (!ask_member(w, p.constraint(), p.body(), level)) return false;
    // Every admissible instantiation above a diagonal: candidates are
    // discovered by matching the guard against the head; for any other
    // tuple the instantiated guard is not entailed and the ask is
    // trivially quiescent.
    std::vector<Subst> cands = guard_candidates(w.at(0), p.constraint(), xs);
    for (const auto& theta : cands) {
      TermVec ts;
      for (const auto& x : xs) ts.push_back(theta.at(x));
      ConstraintSeq wt = binders_reserved ? w : diag_variant(xs, ts, w);
      std::string ikey = ptr_key(p.id()) + "@";
      for (const auto& t : ts) ikey += t.str() + ",";
      Process inst;
      auto it = subst_cache_.find(ikey);
      if (it != subst_cache_.end()) {
        inst = it->second;
      } else {
        Subst sub;
        for (std::size_t i = 0; i < xs.size(); ++i) sub.emplace(xs[i], ts[i]);
        FreshNames scratch;
        inst = subst_process(Process::ask(p.constraint(), p.body()), sub, scratch);
        subst_cache_.emplace(ikey, inst);
      }
      if (!member_rec(wt, inst, level)) return false;
    }
  }
  return true;
}

bool DenoteEngine::local_member(const ConstraintSeq& s, const Process& p, int level) {
  // Instance-fresh local names, indexed by the time offset the local is
  // entered at (length-k query reaching this node with |s| elements left
  // is at offset k-|s|+1). Unfolded recursive instances thus get the
  // m'1, m'2, ... names, one per time unit, deterministically.
  std::size_t offset = opt_.k >= s.size() ? opt_.k - s.size() + 1 : 1;
  std::string ikey = ptr_key(p.id()) + "#" + std::to_string(offset);
  Process instance;
  auto it = subst_cache_.find(ikey);
  if (it != subst_cache_.end()) {
    instance = it->second;
  } else {
    Subst rename;
    std::vector<std::string> renamed;
    for (const auto& b : p.binders()) {
      std::string nb = local_instance_name(b, offset);
      rename.emplace(b, Term::var(nb));
      renamed.push_back(nb);
    }
    FreshNames scratch;
    Process body = subst_process(p.body(), rename, scratch);
    instance = opt_.open_locals ? body : Process::local(renamed, body);
    subst_cache_.emplace(ikey, instance);
  }
  if (opt_.open_locals) return member_rec(s, instance, level);
  const TermUniverse* tu = target_.universe();
  TermUniverse empty;
  for (const auto& v : variant_candidates(instance.binders(), s, tu ? *tu : empty))
    if (member_rec(v, instance.body(), level)) return true;
  return false;
}

namespace {
bool proc_has_call(const Process& p) {
  switch (p.kind()) {
    case ProcKind::Call:
      return true;
    case ProcKind::Skip:
    case ProcKind::Tell:
      return false;
    default:
      for (const auto& q : p.children())
        if (proc_has_call(q)) return true;
      return false;
  }
}
}  // namespace

bool DenoteEngine::member_rec(const ConstraintSeq& s, const Process& p, int level) {
  if (s.empty()) return true;
  // Memberships of call-free subtrees do not depend on the unfolding
  // level.
  auto cf = callfree_.find(p.id());
  if (cf == callfree_.end()) cf = callfree_.emplace(p.id(), proc_has_call(p)).first;
  if (!cf->second) level = -1;
  std::string key = ptr_key(p.id()) + "|" + std::to_string(level) + "|" + s.digest();
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  bool result = true;
  switch (p.kind()) {
    case ProcKind::Skip:
      result = true;
      break;
    case ProcKind::Tell:
      result = target_.entails(s.at(0), lift(p.constraint()));
      break;
    case ProcKind::Abs:
      result = abs_member(s, p, level);
      break;
    case ProcKind::Par: {
      result = true;
      for (const auto& q : p.children())
        if (!member_rec(s, q, level)) {
          result = false;
          break;
        }
      break;
    }
    case ProcKind::Local:
      result = local_member(s, p, level);
      break;
    case ProcKind::Next:
      result = member_rec(s.tail(), p.body(), level);
      break;
    case ProcKind::Unless:
      if (opt_.abstract_mode)
        result = true;  // no safe approximation better than the full set
      else
        result = target_.entails(s.at(0), p.constraint()) ||
                 member_rec(s.tail(), p.body(), level);
      break;
    case ProcKind::Call: {
      if (opt_.call_table) {
        auto t = opt_.call_table->find(p.callee());
        check_usage(t != opt_.call_table->end(), "no interpretation for " + p.callee());
        result = t->second.contains(s);
      } else if (level <= 0) {
        result = true;  // bottom of the interpretation domain: the full set
      } else {
        result = member_rec(s, call_instance(p.callee(), p.args()), level - 1);
      }
      break;
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

SeqSet denotation(std::shared_ptr<DenoteEngine> engine, const Process& p,
                  std::vector<Constraint> elements) {
  std::size_t k = engine->options().k;
  const ConstraintSystem* sys = &engine->target();
  return SeqSet::predicate(
      k, sys,
      [engine, p](const ConstraintSeq& s) { return engine->member(s, p); },
      std::move(elements));
}

std::map<std::string, SeqSet> td_fixpoint_explicit(const Program& prog,
                                                   const ConstraintSystem& sys, std::size_t k,
                                                   const std::vector<Constraint>& elements,
                                                   const DenoteOptions& opt) {
  check_usage(!elements.empty(), "explicit fixpoint needs an enumerated carrier");
  std::map<std::string, SeqSet> interp;
  for (const auto& [name, d] : prog.decls) {
    (void)d;
    interp.emplace(name, SeqSet::full(k, &sys, elements).materialize());
  }
  auto same = [](const std::map<std::string, SeqSet>& a,
                 const std::map<std::string, SeqSet>& b) {
    for (const auto& [name, s] : a) {
      const auto& t = b.at(name);
      if (s.members().size() != t.members().size()) return false;
      auto i = s.members().begin();
      auto j = t.members().begin();
      for (; i != s.members().end(); ++i, ++j)
        if (!(*i == *j)) return false;
    }
    return true;
  };
  for (std::size_t iter = 0; iter <= k + 1; ++iter) {
    std::map<std::string, SeqSet> next;
    DenoteOptions step = opt;
    step.k = k;
    step.call_table = &interp;
    auto engine = make_denote_engine(prog, sys, step);
    for (const auto& [name, d] : prog.decls)
      next.emplace(name, denotation(engine, d.body, elements).materialize());
    if (same(interp, next)) return interp;
    interp = std::move(next);
  }
  // One extra confirmation round: guarded recursion makes length-k
  // memberships stable after k+1 unfoldings.
  {
    std::map<std::string, SeqSet> confirm;
    DenoteOptions step = opt;
    step.k = k;
    step.call_table = &interp;
    auto engine = make_denote_engine(prog, sys, step);
    for (const auto& [name, d] : prog.decls)
      confirm.emplace(name, denotation(engine, d.body, elements).materialize());
    check_internal(same(interp, confirm),
                   "fixpoint failed to stabilize within k+1 iterations");
  }
  return interp;
}

namespace {

bool has_unless(const Process& p, const Program& prog, std::set<std::string>& visiting) {
  switch (p.kind()) {
    case ProcKind::Unless:
      return true;
    case ProcKind::Skip:
    case ProcKind::Tell:
      return false;
    case ProcKind::Call: {
      if (!prog.decls.count(p.callee())) return false;
      if (!visiting.insert(p.callee()).second) return false;
      bool r = has_unless(prog.decl(p.callee()).body, prog, visiting);
      return r;
    }
    default: {
      for (const auto& q : p.children())
        if (has_unless(q, prog, visiting)) return true;
      return false;
    }
  }
}

bool locals_independent(const Process& p, const Program& prog) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Tell:
    case ProcKind::Call:
      return true;
    case ProcKind::Local: {
      std::set<std::string> visiting;
      if (has_unless(p.body(), prog, visiting)) return false;
      return locals_independent(p.body(), prog);
    }
    default: {
      for (const auto& q : p.children())
        if (!locals_independent(q, prog)) return false;
      return true;
    }
  }
}

}  // namespace

std::string local_instance_name(const std::string& binder, std::size_t offset) {
  return binder + "'" + std::to_string(offset);
}

namespace {
void collect_vars_rec(const Process& p, std::size_t k, bool tells_only,
                      std::set<std::string>& out) {
  switch (p.kind()) {
    case ProcKind::Skip:
      return;
    case ProcKind::Tell: {
      for (const auto& v : p.constraint().system()->free_vars(p.constraint())) out.insert(v);
      return;
    }
    case ProcKind::Abs: {
      if (!tells_only)
        for (const auto& v : p.constraint().system()->free_vars(p.constraint()))
          out.insert(v);
      collect_vars_rec(p.body(), k, tells_only, out);
      for (const auto& b : p.binders()) out.erase(b);
      return;
    }
    case ProcKind::Local: {
      std::set<std::string> inner;
      collect_vars_rec(p.body(), k, tells_only, inner);
      for (const auto& b : p.binders()) {
        if (inner.erase(b) > 0)
          for (std::size_t i = 1; i <= k; ++i) inner.insert(local_instance_name(b, i));
      }
      out.insert(inner.begin(), inner.end());
      return;
    }
    case ProcKind::Unless:
      if (!tells_only)
        for (const auto& v : p.constraint().system()->free_vars(p.constraint()))
          out.insert(v);
      collect_vars_rec(p.body(), k, tells_only, out);
      return;
    case ProcKind::Next:
      collect_vars_rec(p.body(), k, tells_only, out);
      return;
    case ProcKind::Par:
      for (const auto& q : p.children()) collect_vars_rec(q, k, tells_only, out);
      return;
    case ProcKind::Call:
      for (const auto& t : p.args()) {
        VarSet vs = t.vars();
        out.insert(vs.begin(), vs.end());
      }
      return;
  }
}
}  // namespace

std::vector<std::string> collect_pool(const Program& prog, std::size_t k, bool tells_only) {
  std::set<std::string> vars;
  for (const auto& [name, d] : prog.decls) {
    (void)name;
    collect_vars_rec(d.body, k, tells_only, vars);
    for (const auto& pv : d.params) vars.erase(pv);
  }
  if (prog.main.valid()) collect_vars_rec(prog.main, k, tells_only, vars);
  return {vars.begin(), vars.end()};
}

bool check_locally_independent(const Program& prog) {
  for (const auto& [name, d] : prog.decls) {
    (void)name;
    if (!locals_independent(d.body, prog)) return false;
  }
  return prog.main.valid() ? locals_independent(prog.main, prog) : true;
}

}  // namespace utcc
