#include "utcc/sos.hpp"

#include <algorithm>
#include <functional>

#include "utcc/errors.hpp"

namespace utcc {

namespace {

struct StepOutcome {
  Process process;
  std::string rule;
};

// Child visiting order for Par nodes. Seeded mode permutes per step with a
// splitmix-style hash so repeated runs are reproducible.
std::vector<std::size_t> child_order(std::size_t n, const SosContext& ctx) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  switch (ctx.scheduler.mode) {
    case Scheduler::Mode::Leftmost:
      break;
    case Scheduler::Mode::Rightmost:
      std::reverse(idx.begin(), idx.end());
      break;
    case Scheduler::Mode::Seeded: {
      std::uint64_t z = ctx.scheduler.seed + 0x9e3779b97f4a7c15ULL * (ctx.step_counter + 1);
      auto rnd = [&]() {
        z += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = z;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
      };
      for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rnd() % i]);
      break;
    }
  }
  return idx;
}

class Stepper {
 public:
  Stepper(SosContext& ctx, std::vector<std::string>& locals, Constraint& store)
      : ctx_(ctx), locals_(locals), store_(store) {}

  std::optional<StepOutcome> step(const Process& p) {
    switch (p.kind()) {
      case ProcKind::Skip:
      case ProcKind::Next:
        return std::nullopt;
      case ProcKind::Tell: {
        store_ = store_.system()->lub(store_, p.constraint());
        return StepOutcome{Process::skip(), "RTell"};
      }
      case ProcKind::Abs:
        return step_abs(p);
      case ProcKind::Par: {
        const auto& cs = p.children();
        for (std::size_t i : child_order(cs.size(), ctx_)) {
          auto sub = step(cs[i]);
          if (!sub) continue;
          std::vector<Process> next = cs;
          next[i] = sub->process;
          return StepOutcome{Process::par(std::move(next)), sub->rule};
        }
        return std::nullopt;
      }
      case ProcKind::Local: {
        Subst rename;
        for (const auto& x : p.binders()) {
          std::string fresh;
          if (ctx_.unit_offset > 0) {
            // Offset-indexed instance names; a residual's locals (already
            // instance-named, re-opened by the observable rule) keep their
            // names, since the previous unit's store is not carried over.
            fresh = x.find('\'') != std::string::npos
                        ? x
                        : x + "'" + std::to_string(ctx_.unit_offset);
            if (std::find(locals_.begin(), locals_.end(), fresh) != locals_.end())
              fresh = ctx_.names.fresh(x);  // second instance in this unit
          } else {
            fresh = ctx_.names.fresh(x);
          }
          if (fresh != x) rename.emplace(x, Term::var(fresh));
          locals_.push_back(fresh);
        }
        if (rename.empty()) return StepOutcome{p.body(), "RLocal"};
        return StepOutcome{subst_process(p.body(), rename, ctx_.names), "RLocal"};
      }
      case ProcKind::Unless: {
        if (store_.system()->entails(store_, p.constraint()))
          return StepOutcome{Process::skip(), "RUnless"};
        return std::nullopt;
      }
      case ProcKind::Call: {
        check_internal(ctx_.program != nullptr, "call without a program context");
        const Declaration& d = ctx_.program->decl(p.callee());
        check_usage(d.params.size() == p.args().size(),
                    "arity mismatch calling " + p.callee());
        Subst s;
        for (std::size_t i = 0; i < d.params.size(); ++i) s.emplace(d.params[i], p.args()[i]);
        return StepOutcome{subst_process(d.body, s, ctx_.names), "RCall"};
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<StepOutcome> step_abs(const Process& p) {
    const Constraint& guard = p.constraint();
    const ConstraintSystem* sys = store_.system();
    VarSet holes(p.binders().begin(), p.binders().end());
    // Candidate instantiations by matching the guard against the store,
    // filtered by full entailment (built into the assignment search) and
    // admissibility.
    std::vector<Subst> cands = sys->entail_assignments(store_, guard, holes);
    for (const auto& theta : cands) {
      TermVec ts;
      bool admissible = true;
      for (const auto& x : p.binders()) {
        const Term& t = theta.at(x);
        for (const auto& y : p.binders())
          if (t.contains_var(y)) admissible = false;
        ts.push_back(t);
      }
      if (!admissible) continue;
      Constraint dxt = sys->diag(p.binders(), ts);
      bool seen = false;
      for (const auto& e : p.seen())
        if (sys->entails(e, dxt)) {
          seen = true;
          break;
        }
      if (seen) continue;
      Subst s;
      for (std::size_t i = 0; i < p.binders().size(); ++i) s.emplace(p.binders()[i], ts[i]);
      Process instance = subst_process(p.body(), s, ctx_.names);
      std::vector<Constraint> seen2 = p.seen();
      seen2.push_back(dxt);
      Process residual =
          Process::abs_with_seen(p.binders(), guard, std::move(seen2), p.body());
      return StepOutcome{Process::par({instance, residual}), "RAbs"};
    }
    return std::nullopt;
  }

  SosContext& ctx_;
  std::vector<std::string>& locals_;
  Constraint& store_;
};

void record(SosContext& ctx, const std::string& rule, const Configuration& g) {
  if (!ctx.trace) return;
  ctx.trace->push_back({rule, g.locals, g.store.str()});
}

}  // namespace

std::optional<Configuration> internal_step(const Configuration& g, SosContext& ctx) {
  const ConstraintSystem* sys = g.store.system();
  // RStructVar: open the scope of existentially quantified constraints in
  // the store's normal form, eagerly.
  if (auto opened = sys->open_existentials(g.store, ctx.names)) {
    Configuration out = g;
    out.store = opened->first;
    for (const auto& v : opened->second) out.locals.push_back(v);
    ++ctx.step_counter;
    record(ctx, "RStructVar", out);
    return out;
  }
  Configuration out = g;
  Stepper stepper(ctx, out.locals, out.store);
  auto res = stepper.step(g.process);
  if (!res) return std::nullopt;
  out.process = res->process;
  ++ctx.step_counter;
  record(ctx, res->rule, out);
  return out;
}

Process future(const Process& p) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Abs:
      return Process::skip();
    case ProcKind::Par: {
      std::vector<Process> cs;
      for (const auto& q : p.children()) {
        Process f = future(q);
        if (f.kind() != ProcKind::Skip) cs.push_back(f);
      }
      return Process::par(std::move(cs));
    }
    case ProcKind::Next:
    case ProcKind::Unless:
      return p.body();
    default:
      // Tell, Local and Call are always reducible, so they cannot occur in
      // a quiescent configuration.
      throw InternalError("future() applied to a reducible process: " + p.str());
  }
}

TimeStepResult run_time_unit(const Process& p, const Constraint& input, std::size_t budget,
                             SosContext& ctx) {
  check_usage(budget >= 1, "step budget must be at least 1");
  Configuration g{{}, p, input};
  TimeStepResult result;
  std::size_t used = 0;
  for (;;) {
    auto next = internal_step(g, ctx);
    if (!next) {
      const ConstraintSystem* sys = g.store.system();
      result.output = sys->hide(g.locals, g.store);
      result.raw_store = g.store;
      Process f = future(g.process);
      result.residual =
          (g.locals.empty() || f.kind() == ProcKind::Skip) ? f : Process::local(g.locals, f);
      result.steps_used = used;
      result.terminated = true;
      return result;
    }
    if (used == budget) break;
    g = *next;
    ++used;
  }
  // Budget exhausted with the configuration still reducible: possibly a
  // non-well-terminated process. The partial store is still reported.
  const ConstraintSystem* sys = g.store.system();
  result.output = sys->hide(g.locals, g.store);
  result.raw_store = g.store;
  result.residual = Process::skip();
  result.steps_used = used;
  result.terminated = false;
  return result;
}

std::vector<Constraint> io_run(const Process& p, const std::vector<Constraint>& inputs,
                               std::size_t budget, SosContext& ctx,
                               std::vector<Constraint>* raw_outputs) {
  std::vector<Constraint> outputs;
  Process current = p;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    ctx.unit_offset = i + 1;
    TimeStepResult r = run_time_unit(current, inputs[i], budget, ctx);
    if (!r.terminated) throw BudgetExhausted(i);
    outputs.push_back(r.output);
    if (raw_outputs) raw_outputs->push_back(r.raw_store);
    current = r.residual;
  }
  return outputs;
}

bool is_quiescent(const Process& p, const std::vector<Constraint>& inputs, std::size_t budget,
                  SosContext& ctx) {
  std::vector<Constraint> outputs = io_run(p, inputs, budget, ctx);
  const ConstraintSystem* sys = inputs.empty() ? nullptr : inputs.front().system();
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (!sys->equivalent(outputs[i], inputs[i])) return false;
  return true;
}

std::set<ConstraintSeq> sp_enumerate(const Process& p, std::size_t k,
                                     const std::vector<Constraint>& elements,
                                     std::size_t budget, SosContext& ctx) {
  check_usage(!elements.empty(), "sp_enumerate needs an element list");
  std::set<ConstraintSeq> out;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<Constraint> seq;
    for (std::size_t i = 0; i < k; ++i) seq.push_back(elements[idx[i]]);
    SosContext local_ctx;
    local_ctx.program = ctx.program;
    local_ctx.scheduler = ctx.scheduler;
    if (is_quiescent(p, seq, budget, local_ctx)) out.insert(ConstraintSeq(seq));
    std::size_t i = k;
    while (i > 0 && ++idx[i - 1] == elements.size()) idx[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

}  // namespace utcc
