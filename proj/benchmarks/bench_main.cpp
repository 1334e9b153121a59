// Microbenchmarks for the hot paths: solved forms, entailment, the SOS
// interpreter loop and membership evaluation over the finite lattice.

#include <benchmark/benchmark.h>

#include "utcc/denot.hpp"
#include "utcc/finite_lattice.hpp"
#include "utcc/parser.hpp"
#include "utcc/sos.hpp"

namespace {

using namespace utcc;

EquationSystem make_herbrand() {
  Signature sig;
  sig.constants = {"a", "b"};
  sig.functions = {{"f", 2}, {"g", 1}};
  sig.predicates = {{"out", 1}, {"ready", 1}};
  auto tu = TermUniverse::generate(sig, {"x", "y", "z", "w"}, 2, 100000);
  return EquationSystem("herbrand", sig, {"x", "y", "z", "w"}, tu);
}

void BM_SolvedForm(benchmark::State& state) {
  EquationSystem H = make_herbrand();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        H.parse_constraint("exists q,r.(x=f(q,g(r)) /\\ q=g(a) /\\ out(x) /\\ y=r)"));
  }
}
BENCHMARK(BM_SolvedForm);

void BM_Entailment(benchmark::State& state) {
  EquationSystem H = make_herbrand();
  Constraint d = H.parse_constraint("x=f(g(a),g(b)) /\\ out(x) /\\ out(g(a)) /\\ ready(y)");
  Constraint c = H.parse_constraint("exists q.(x=f(q,g(b)) /\\ out(q))");
  for (auto _ : state) benchmark::DoNotOptimize(H.entails(d, c));
}
BENCHMARK(BM_Entailment);

void BM_IoRunFiniteLattice(benchmark::State& state) {
  FiniteLatticeSystem L("C6", {"true", "a", "b", "c", "d", "false"},
                        {{"a", "b"}, {"c", "d"}});
  Program prog = bind_program(
      parse_program_source("p() = when a do tell(b) || unless b next p();\np()"), L);
  std::vector<Constraint> inputs = {L.element("a"), L.element("c"), L.element("a")};
  for (auto _ : state) {
    SosContext ctx;
    ctx.program = &prog;
    benchmark::DoNotOptimize(io_run(prog.main, inputs, 1000, ctx));
  }
}
BENCHMARK(BM_IoRunFiniteLattice);

void BM_MembershipFiniteLattice(benchmark::State& state) {
  FiniteLatticeSystem L("C6", {"true", "a", "b", "c", "d", "false"},
                        {{"a", "b"}, {"c", "d"}});
  Program prog = bind_program(
      parse_program_source("p() = when a do tell(b) || next p();\np()"), L);
  DenoteOptions opt;
  opt.k = 3;
  auto engine = make_denote_engine(prog, L, opt);
  auto elems = *L.enumerate();
  std::size_t i = 0;
  for (auto _ : state) {
    ConstraintSeq s({elems[i % 6], elems[(i / 6) % 6], elems[(i / 36) % 6]});
    ++i;
    benchmark::DoNotOptimize(engine->member_of_main(s));
  }
}
BENCHMARK(BM_MembershipFiniteLattice);

}  // namespace

BENCHMARK_MAIN();
