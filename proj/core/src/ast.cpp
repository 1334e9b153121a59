#include "utcc/ast.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "utcc/errors.hpp"

namespace utcc {

Process Process::mk(Node n) {
  Process p;
  p.node_ = std::make_shared<const Node>(std::move(n));
  return p;
}

Process Process::skip() { return mk({ProcKind::Skip, {}, {}, {}, {}, {}, {}}); }

Process Process::tell(Constraint c) {
  return mk({ProcKind::Tell, std::move(c), {}, {}, {}, {}, {}});
}

Process Process::ask(Constraint c, Process body) {
  return abs({}, std::move(c), std::move(body));
}

Process Process::abs(std::vector<std::string> binders, Constraint guard, Process body) {
  return abs_with_seen(std::move(binders), std::move(guard), {}, std::move(body));
}

Process Process::abs_with_seen(std::vector<std::string> binders, Constraint guard,
                               std::vector<Constraint> seen, Process body) {
  std::set<std::string> distinct(binders.begin(), binders.end());
  check_usage(distinct.size() == binders.size(), "abs binders must be pairwise distinct");
  return mk({ProcKind::Abs, std::move(guard), std::move(binders), std::move(seen),
             {std::move(body)}, {}, {}});
}

Process Process::par(std::vector<Process> children) {
  if (children.empty()) return skip();
  if (children.size() == 1) return children.front();
  return mk({ProcKind::Par, {}, {}, {}, std::move(children), {}, {}});
}

Process Process::local(std::vector<std::string> vars, Process body) {
  check_usage(!vars.empty(), "local needs at least one variable");
  return mk({ProcKind::Local, {}, std::move(vars), {}, {std::move(body)}, {}, {}});
}

Process Process::next(Process body) {
  return mk({ProcKind::Next, {}, {}, {}, {std::move(body)}, {}, {}});
}

Process Process::unless(Constraint c, Process body) {
  return mk({ProcKind::Unless, std::move(c), {}, {}, {std::move(body)}, {}, {}});
}

Process Process::call(std::string name, TermVec args) {
  return mk({ProcKind::Call, {}, {}, {}, {}, std::move(name), std::move(args)});
}

namespace {

void fv_rec(const Process& p, VarSet& out) {
  switch (p.kind()) {
    case ProcKind::Skip:
      return;
    case ProcKind::Tell: {
      VarSet fs = p.constraint().system()->free_vars(p.constraint());
      out.insert(fs.begin(), fs.end());
      return;
    }
    case ProcKind::Abs: {
      VarSet inner = p.constraint().system()->free_vars(p.constraint());
      fv_rec(p.body(), inner);
      for (const auto& b : p.binders()) inner.erase(b);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case ProcKind::Par:
      for (const auto& q : p.children()) fv_rec(q, out);
      return;
    case ProcKind::Local: {
      VarSet inner;
      fv_rec(p.body(), inner);
      for (const auto& b : p.binders()) inner.erase(b);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case ProcKind::Next:
      fv_rec(p.body(), out);
      return;
    case ProcKind::Unless: {
      VarSet fs = p.constraint().system()->free_vars(p.constraint());
      out.insert(fs.begin(), fs.end());
      fv_rec(p.body(), out);
      return;
    }
    case ProcKind::Call:
      for (const auto& t : p.args()) t.collect_vars(out);
      return;
  }
}

Constraint subst_constraint(const Constraint& c, const Subst& s) {
  std::vector<std::string> xs;
  TermVec ts;
  VarSet fs = c.system()->free_vars(c);
  for (const auto& [v, t] : s) {
    if (!fs.count(v)) continue;
    if (t.is_var() && t.sym() == v) continue;
    xs.push_back(v);
    ts.push_back(t);
  }
  if (xs.empty()) return c;
  // Simultaneous substitutions may overlap (x:=y, y:=z); the admissible
  // encoding exists xs (c lub d) needs the domain and range disjoint, so
  // route through fresh intermediates when they are not.
  bool overlap = false;
  for (const auto& t : ts)
    for (const auto& x : xs)
      if (t.contains_var(x)) overlap = true;
  if (!overlap) return c.system()->subst(c, xs, ts);
  std::vector<std::string> temps;
  TermVec temp_terms;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    temps.push_back("_S" + std::to_string(i + 1) + xs[i]);
    temp_terms.push_back(Term::var(temps.back()));
  }
  Constraint mid = c.system()->subst(c, xs, temp_terms);
  return c.system()->subst(mid, temps, ts);
}

}  // namespace

VarSet free_vars(const Process& p) {
  VarSet out;
  fv_rec(p, out);
  return out;
}

Process subst_process(const Process& p, const Subst& s, FreshNames& names) {
  if (s.empty()) return p;
  switch (p.kind()) {
    case ProcKind::Skip:
      return p;
    case ProcKind::Tell:
      return Process::tell(subst_constraint(p.constraint(), s));
    case ProcKind::Abs:
    case ProcKind::Local: {
      // Rename binders that clash with the substitution's domain or range.
      VarSet range_vars;
      for (const auto& [v, t] : s) {
        (void)v;
        t.collect_vars(range_vars);
      }
      Subst inner = s;
      std::vector<std::string> binders;
      Subst rename;
      for (const auto& b : p.binders()) {
        inner.erase(b);
        if (range_vars.count(b) || s.count(b)) {
          std::string nb = names.fresh(b);
          rename.emplace(b, Term::var(nb));
          binders.push_back(nb);
        } else {
          binders.push_back(b);
        }
      }
      auto fix = [&](const Process& q) {
        Process r = q;
        if (!rename.empty()) r = subst_process(r, rename, names);
        return subst_process(r, inner, names);
      };
      if (p.kind() == ProcKind::Local) return Process::local(binders, fix(p.body()));
      Constraint g = p.constraint();
      if (!rename.empty()) g = subst_constraint(g, rename);
      g = subst_constraint(g, inner);
      std::vector<Constraint> seen;
      for (const auto& e : p.seen()) {
        Constraint e2 = e;
        if (!rename.empty()) e2 = subst_constraint(e2, rename);
        seen.push_back(subst_constraint(e2, inner));
      }
      return Process::abs_with_seen(binders, g, std::move(seen), fix(p.body()));
    }
    case ProcKind::Par: {
      std::vector<Process> cs;
      for (const auto& q : p.children()) cs.push_back(subst_process(q, s, names));
      return Process::par(std::move(cs));
    }
    case ProcKind::Next:
      return Process::next(subst_process(p.body(), s, names));
    case ProcKind::Unless:
      return Process::unless(subst_constraint(p.constraint(), s),
                             subst_process(p.body(), s, names));
    case ProcKind::Call: {
      TermVec args;
      for (const auto& t : p.args()) args.push_back(t.apply(s));
      return Process::call(p.callee(), std::move(args));
    }
  }
  return p;
}

Process map_constraints(const Process& p,
                        const std::function<Constraint(const Constraint&)>& f) {
  switch (p.kind()) {
    case ProcKind::Skip:
      return p;
    case ProcKind::Tell:
      return Process::tell(f(p.constraint()));
    case ProcKind::Abs: {
      std::vector<Constraint> seen;
      for (const auto& e : p.seen()) seen.push_back(f(e));
      return Process::abs_with_seen(p.binders(), f(p.constraint()), std::move(seen),
                                    map_constraints(p.body(), f));
    }
    case ProcKind::Par: {
      std::vector<Process> cs;
      for (const auto& q : p.children()) cs.push_back(map_constraints(q, f));
      return Process::par(std::move(cs));
    }
    case ProcKind::Local:
      return Process::local(p.binders(), map_constraints(p.body(), f));
    case ProcKind::Next:
      return Process::next(map_constraints(p.body(), f));
    case ProcKind::Unless:
      return Process::unless(f(p.constraint()), map_constraints(p.body(), f));
    case ProcKind::Call:
      return p;
  }
  return p;
}

namespace {

// Canonicalization for structural congruence: flatten Par, drop skips,
// rename binders with a subtree-local counter, sort Par children.
Process canon_rec(const Process& p, int& counter, FreshNames& names) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Tell:
    case ProcKind::Call:
      return p;
    case ProcKind::Abs:
    case ProcKind::Local: {
      Subst rename;
      std::vector<std::string> binders;
      for (const auto& b : p.binders()) {
        std::string nb = "_c" + std::to_string(++counter);
        rename.emplace(b, Term::var(nb));
        binders.push_back(nb);
      }
      Process body = canon_rec(subst_process(p.body(), rename, names), counter, names);
      if (p.kind() == ProcKind::Local) return Process::local(binders, body);
      Constraint g = subst_constraint(p.constraint(), rename);
      std::vector<Constraint> seen;
      for (const auto& e : p.seen()) seen.push_back(subst_constraint(e, rename));
      std::sort(seen.begin(), seen.end(),
                [](const Constraint& a, const Constraint& b) { return a.str() < b.str(); });
      return Process::abs_with_seen(binders, g, std::move(seen), body);
    }
    case ProcKind::Par: {
      std::vector<Process> flat;
      std::function<void(const Process&)> flatten = [&](const Process& q) {
        if (q.kind() == ProcKind::Par) {
          for (const auto& ch : q.children()) flatten(ch);
        } else if (q.kind() != ProcKind::Skip) {
          flat.push_back(q);
        }
      };
      flatten(p);
      std::vector<Process> cs;
      for (const auto& q : flat) {
        int sub = 0;
        cs.push_back(canon_rec(q, sub, names));
      }
      std::sort(cs.begin(), cs.end(),
                [](const Process& a, const Process& b) { return a.str() < b.str(); });
      return Process::par(std::move(cs));
    }
    case ProcKind::Next:
      return Process::next(canon_rec(p.body(), counter, names));
    case ProcKind::Unless:
      return Process::unless(p.constraint(), canon_rec(p.body(), counter, names));
  }
  return p;
}

}  // namespace

Process congruence_canonical(const Process& p) {
  FreshNames names;
  int counter = 0;
  return canon_rec(p, counter, names);
}

bool struct_congruent(const Process& p, const Process& q) {
  return congruence_canonical(p).str() == congruence_canonical(q).str();
}

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += xs[i];
  }
  return s;
}

bool needs_parens(const Process& p) { return p.kind() == ProcKind::Par; }

std::string str_rec(const Process& p) {
  switch (p.kind()) {
    case ProcKind::Skip:
      return "skip";
    case ProcKind::Tell:
      return "tell(" + p.constraint().str() + ")";
    case ProcKind::Abs: {
      std::string body = str_rec(p.body());
      if (needs_parens(p.body())) body = "(" + body + ")";
      std::string seen;
      if (!p.seen().empty()) {
        std::vector<std::string> es;
        for (const auto& e : p.seen()) es.push_back(e.str());
        seen = " seen {" + join(es, ", ") + "}";
      }
      if (p.binders().empty()) return "when " + p.constraint().str() + seen + " do " + body;
      return "abs (" + join(p.binders(), ",") + "; " + p.constraint().str() + ")" + seen +
             " do " + body;
    }
    case ProcKind::Par: {
      std::vector<std::string> cs;
      for (const auto& q : p.children()) {
        std::string s = str_rec(q);
        if (q.kind() == ProcKind::Par) s = "(" + s + ")";
        cs.push_back(s);
      }
      return join(cs, " || ");
    }
    case ProcKind::Local:
      return "local " + join(p.binders(), ",") + ".(" + str_rec(p.body()) + ")";
    case ProcKind::Next: {
      std::string body = str_rec(p.body());
      if (needs_parens(p.body())) body = "(" + body + ")";
      return "next " + body;
    }
    case ProcKind::Unless: {
      std::string body = str_rec(p.body());
      if (needs_parens(p.body())) body = "(" + body + ")";
      return "unless " + p.constraint().str() + " next " + body;
    }
    case ProcKind::Call: {
      std::vector<std::string> as;
      for (const auto& t : p.args()) as.push_back(t.str());
      return p.callee() + "(" + join(as, ",") + ")";
    }
  }
  return "?";
}

// Minimum number of next operators guarding any call to `target` reachable
// in p; INT_MAX/2 when no such call occurs.
constexpr int kNoCall = 1 << 20;

int min_next_depth(const Process& p, const std::string& target) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Tell:
      return kNoCall;
    case ProcKind::Abs:
    case ProcKind::Local:
      return min_next_depth(p.body(), target);
    case ProcKind::Par: {
      int best = kNoCall;
      for (const auto& q : p.children()) best = std::min(best, min_next_depth(q, target));
      return best;
    }
    case ProcKind::Next:
    case ProcKind::Unless:
      return std::min(kNoCall, 1 + min_next_depth(p.body(), target));
    case ProcKind::Call:
      return p.callee() == target ? 0 : kNoCall;
  }
  return kNoCall;
}

void collect_calls(const Process& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case ProcKind::Call:
      out.insert(p.callee());
      return;
    case ProcKind::Skip:
    case ProcKind::Tell:
      return;
    default:
      for (const auto& q : p.children()) collect_calls(q, out);
  }
}

}  // namespace

std::string Process::str() const { return str_rec(*this); }

const Declaration& Program::decl(const std::string& name) const {
  auto it = decls.find(name);
  check_usage(it != decls.end(), "unknown process name " + name);
  return it->second;
}

void check_program(const Program& prog) {
  for (const auto& [name, d] : prog.decls) {
    check_usage(name == d.name, "declaration map key mismatch");
    std::set<std::string> params(d.params.begin(), d.params.end());
    check_usage(params.size() == d.params.size(),
                "duplicate formal parameter in declaration " + name);
    for (const auto& v : free_vars(d.body))
      check_usage(params.count(v) > 0 || prog.globals.count(v) > 0,
                  "free variable " + v + " escapes declaration " + name);
    for (const auto& callee : [&] {
           std::set<std::string> cs;
           collect_calls(d.body, cs);
           return cs;
         }())
      check_usage(prog.decls.count(callee) > 0,
                  "declaration " + name + " calls undefined process " + callee);
  }
  {
    std::set<std::string> cs;
    collect_calls(prog.main, cs);
    for (const auto& callee : cs)
      check_usage(prog.decls.count(callee) > 0, "main calls undefined process " + callee);
  }
  // Guarded recursion: no zero-weight cycle in the call graph, where an
  // edge's weight is the least next-depth of the call site.
  std::map<std::string, std::map<std::string, int>> edges;
  for (const auto& [name, d] : prog.decls) {
    std::set<std::string> cs;
    collect_calls(d.body, cs);
    for (const auto& callee : cs) {
      int w = min_next_depth(d.body, callee);
      if (w >= kNoCall) continue;
      edges[name][callee] = std::min(w, 1);  // only zero vs nonzero matters
    }
  }
  // A zero-weight cycle exists iff the subgraph of zero-weight edges has a
  // cycle.
  std::map<std::string, int> state;  // 0 unvisited, 1 in stack, 2 done
  std::function<void(const std::string&)> dfs = [&](const std::string& n) {
    state[n] = 1;
    for (const auto& [m, w] : edges[n]) {
      if (w != 0) continue;
      check_usage(state[m] != 1, "recursive call to " + m + " is not guarded by next");
      if (state[m] == 0) dfs(m);
    }
    state[n] = 2;
  };
  for (const auto& [name, d] : prog.decls) {
    (void)d;
    if (state[name] == 0) dfs(name);
  }
}

std::string program_str(const Program& prog) {
  std::string out;
  for (const auto& [name, d] : prog.decls) {
    out += name + "(" + join(d.params, ",") + ") = " + d.body.str() + ";\n";
  }
  out += prog.main.str() + "\n";
  return out;
}

}  // namespace utcc
