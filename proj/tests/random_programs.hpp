#pragma once

// Deterministic random tccp process generator over a finite lattice, used
// by the property suites (determinism, closure laws, minimality) and the
// acceptance checks. Depth-bounded; optionally restricted to the
// monotonic (unless-free) or locally independent fragments.

#include <cstdint>
#include <vector>

#include "utcc/ast.hpp"
#include "utcc/finite_lattice.hpp"

namespace utcc_testing {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed * 2654435761u + 1) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

struct GeneratorOptions {
  int max_depth = 4;
  bool allow_unless = true;
  bool allow_local = true;
  bool allow_call = true;  // a single next-guarded declaration named loop
};

inline utcc::Process random_process(Rng& rng, const utcc::FiniteLatticeSystem& L,
                                    const GeneratorOptions& opt, int depth) {
  using utcc::Process;
  auto elems = *L.enumerate();
  auto elem = [&] { return elems[rng.below(elems.size())]; };
  // Leaf probability grows with depth.
  if (depth >= opt.max_depth || rng.below(10) < 2) {
    return rng.below(3) == 0 ? Process::skip() : Process::tell(elem());
  }
  switch (rng.below(8)) {
    case 0:
      return Process::tell(elem());
    case 1:
      return Process::ask(elem(), random_process(rng, L, opt, depth + 1));
    case 2: {
      std::vector<Process> cs;
      std::size_t n = 2 + rng.below(2);
      for (std::size_t i = 0; i < n; ++i) cs.push_back(random_process(rng, L, opt, depth + 1));
      return Process::par(std::move(cs));
    }
    case 3:
      return Process::next(random_process(rng, L, opt, depth + 1));
    case 4:
      if (opt.allow_unless)
        return Process::unless(elem(), random_process(rng, L, opt, depth + 1));
      return Process::ask(elem(), random_process(rng, L, opt, depth + 1));
    case 5:
      if (opt.allow_local)
        return Process::local({"v"}, random_process(rng, L, opt, depth + 1));
      return Process::next(random_process(rng, L, opt, depth + 1));
    case 6:
      if (opt.allow_call) return Process::call("loop", {});
      return Process::tell(elem());
    default:
      return Process::ask(elem(), random_process(rng, L, opt, depth + 1));
  }
}

// A program with a single recursive declaration loop() and a random main.
inline utcc::Program random_program(std::uint64_t seed, const utcc::FiniteLatticeSystem& L,
                                    const GeneratorOptions& opt) {
  Rng rng(seed);
  utcc::Program prog;
  if (opt.allow_call) {
    GeneratorOptions body_opt = opt;
    body_opt.allow_call = false;
    body_opt.max_depth = 2;
    utcc::Declaration d;
    d.name = "loop";
    d.body = utcc::Process::par({random_process(rng, L, body_opt, 0),
                                 utcc::Process::next(utcc::Process::call("loop", {}))});
    prog.decls.emplace("loop", d);
  }
  prog.main = random_process(rng, L, opt, 0);
  utcc::check_program(prog);
  return prog;
}

inline bool is_monotonic(const utcc::Process& p) {
  if (p.kind() == utcc::ProcKind::Unless) return false;
  if (p.kind() == utcc::ProcKind::Call || p.kind() == utcc::ProcKind::Skip ||
      p.kind() == utcc::ProcKind::Tell)
    return true;
  for (const auto& q : p.children())
    if (!is_monotonic(q)) return false;
  return true;
}

inline bool is_monotonic(const utcc::Program& prog) {
  for (const auto& [name, d] : prog.decls)
    if (!is_monotonic(d.body)) return false;
  return is_monotonic(prog.main);
}

}  // namespace utcc_testing
