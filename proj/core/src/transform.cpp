#include "utcc/transform.hpp"

namespace utcc {

Process hat_process(const Process& p, const SuspensionSystem& S) {
  return map_constraints(p, [&S](const Constraint& c) { return S.hat(c); });
}

namespace {

bool is_ask_like(const Process& p) { return p.kind() == ProcKind::Abs; }

// Detector for a block of asks abs (xi; ci) do Pi:
//   when (exists x1 (c1^) lub ... lub exists xn (cn^))
//     do tell(<c1 lub ... lub cn, nsusp>)
Process block_detector(const std::vector<Process>& asks, const SuspensionSystem& S) {
  Constraint guard = S.true_c();
  Constraint told_base = S.base().true_c();
  for (const auto& a : asks) {
    guard = S.lub(guard, S.hide(a.binders(), S.hat(a.constraint())));
    told_base = S.base().lub(told_base, a.constraint());
  }
  return Process::ask(guard, Process::tell(S.make_pair(told_base, true)));
}

Process per_ask_rewrite(const Process& p, const SuspensionSystem& S) {
  switch (p.kind()) {
    case ProcKind::Skip:
      return p;
    case ProcKind::Tell:
      return Process::tell(S.hat(p.constraint()));
    case ProcKind::Abs: {
      Process body = per_ask_rewrite(p.body(), S);
      Process with_detector = Process::par(
          {body, Process::tell(S.make_pair(p.constraint(), true))});
      return Process::abs(p.binders(), S.hat(p.constraint()), with_detector);
    }
    case ProcKind::Par: {
      std::vector<Process> cs;
      for (const auto& q : p.children()) cs.push_back(per_ask_rewrite(q, S));
      return Process::par(std::move(cs));
    }
    case ProcKind::Local:
      return Process::local(p.binders(), per_ask_rewrite(p.body(), S));
    case ProcKind::Next:
      return Process::next(per_ask_rewrite(p.body(), S));
    case ProcKind::Unless:
      return Process::unless(S.hat(p.constraint()), per_ask_rewrite(p.body(), S));
    case ProcKind::Call:
      return p;
  }
  return p;
}

Process joint_rewrite(const Process& p, const SuspensionSystem& S) {
  switch (p.kind()) {
    case ProcKind::Skip:
    case ProcKind::Call:
      return p;
    case ProcKind::Tell:
      return Process::tell(S.hat(p.constraint()));
    case ProcKind::Abs: {
      // An isolated ask forms a block of one.
      Process hatted = Process::abs(p.binders(), S.hat(p.constraint()),
                                    joint_rewrite(p.body(), S));
      return Process::par({hatted, block_detector({p}, S)});
    }
    case ProcKind::Par: {
      bool all_asks = true;
      for (const auto& q : p.children())
        if (!is_ask_like(q)) all_asks = false;
      if (all_asks) {
        std::vector<Process> cs;
        for (const auto& q : p.children())
          cs.push_back(Process::abs(q.binders(), S.hat(q.constraint()),
                                    joint_rewrite(q.body(), S)));
        cs.push_back(block_detector(p.children(), S));
        return Process::par(std::move(cs));
      }
      std::vector<Process> cs;
      for (const auto& q : p.children()) cs.push_back(joint_rewrite(q, S));
      return Process::par(std::move(cs));
    }
    case ProcKind::Local:
      return Process::local(p.binders(), joint_rewrite(p.body(), S));
    case ProcKind::Next:
      return Process::next(joint_rewrite(p.body(), S));
    case ProcKind::Unless:
      return Process::unless(S.hat(p.constraint()), joint_rewrite(p.body(), S));
  }
  return p;
}

}  // namespace

Process transform_for_suspension(const Process& p, const SuspensionSystem& S,
                                 SuspensionMode mode) {
  switch (mode) {
    case SuspensionMode::PerAsk:
      return per_ask_rewrite(p, S);
    case SuspensionMode::JointDetector:
      return joint_rewrite(p, S);
    case SuspensionMode::HatOnly:
      return hat_process(p, S);
  }
  return p;
}

Program transform_program_for_suspension(const Program& prog, const SuspensionSystem& S,
                                         SuspensionMode mode,
                                         const std::set<std::string>& only) {
  auto mode_for = [&](const std::string& name) {
    if (only.empty() || only.count(name)) return mode;
    return SuspensionMode::HatOnly;
  };
  Program out;
  for (const auto& [name, d] : prog.decls) {
    Declaration nd = d;
    nd.body = transform_for_suspension(d.body, S, mode_for(name));
    out.decls.emplace(name, std::move(nd));
  }
  if (prog.main.valid())
    out.main = transform_for_suspension(prog.main, S, mode_for("main"));
  return out;
}

}  // namespace utcc
