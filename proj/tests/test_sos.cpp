#include "doctest.h"

#include "random_programs.hpp"
#include "utcc/parser.hpp"
#include "utcc/sos.hpp"

using namespace utcc;

namespace {

FiniteLatticeSystem make_c6() {
  return FiniteLatticeSystem("C6", {"true", "a", "b", "c", "d", "false"},
                             {{"a", "b"}, {"c", "d"}});
}

EquationSystem make_out_sys() {
  Signature sig;
  sig.predicates = {{"out", 1}, {"outp", 1}};
  sig.functions = {{"f", 1}};
  sig.constants = {"a"};
  auto tu = TermUniverse::generate(sig, {"x", "z"}, 2, 10000);
  return EquationSystem("outs", sig, {"x", "z"}, tu);
}

std::vector<Constraint> run(const Program& prog, const std::vector<Constraint>& inputs,
                            Scheduler sched = {}) {
  SosContext ctx;
  ctx.program = &prog;
  ctx.scheduler = sched;
  return io_run(prog.main, inputs, 5000, ctx);
}

}  // namespace

TEST_CASE("single rules") {
  FiniteLatticeSystem L = make_c6();
  Program prog;
  SUBCASE("tell adds to the store") {
    prog.main = Process::tell(L.element("c"));
    SosContext ctx;
    ctx.program = &prog;
    Configuration g{{}, prog.main, L.element("a")};
    auto next = internal_step(g, ctx);
    REQUIRE(next.has_value());
    CHECK(next->process.kind() == ProcKind::Skip);
    CHECK(next->store == L.lub(L.element("a"), L.element("c")));
  }
  SUBCASE("unless reduces to skip when the guard is entailed") {
    prog.main = Process::unless(L.element("c"), Process::tell(L.element("a")));
    SosContext ctx;
    ctx.program = &prog;
    Configuration g{{}, prog.main, L.element("d")};
    auto next = internal_step(g, ctx);
    REQUIRE(next.has_value());
    CHECK(next->process.kind() == ProcKind::Skip);
    CHECK(next->store == L.element("d"));
  }
  SUBCASE("unless is stuck when the guard is not entailed") {
    prog.main = Process::unless(L.element("c"), Process::tell(L.element("a")));
    SosContext ctx;
    ctx.program = &prog;
    Configuration g{{}, prog.main, L.element("a")};
    CHECK_FALSE(internal_step(g, ctx).has_value());
  }
}

TEST_CASE("scope extrusion run") {
  // P = local x.(tell(out(x)) || P'), Q = abs (z; out(z)) do Q' in the
  // store exists w.(out(w)): the derivation opens the scope of w, fires
  // the abstraction on both the opened w and the new local x, and the
  // final store keeps both atoms.
  EquationSystem H = make_out_sys();
  auto C = [&](const std::string& s) { return H.parse_constraint(s); };
  Process Pp = Process::skip();
  Process Qp = Process::tell(C("outp(z)"));
  Process P = Process::local({"x"}, Process::par({Process::tell(C("out(x)")), Pp}));
  Process Q = Process::abs({"z"}, C("out(z)"), Qp);
  Program prog;
  prog.main = Process::par({P, Q});

  SosContext ctx;
  ctx.program = &prog;
  Configuration g{{}, prog.main, C("exists w.(out(w))")};
  std::size_t fired = 0;
  std::vector<TraceEntry> trace;
  ctx.trace = &trace;
  for (int i = 0; i < 100; ++i) {
    auto next = internal_step(g, ctx);
    if (!next) break;
    g = *next;
    if (trace.back().rule == "RAbs") ++fired;
  }
  // the abstraction fired for the opened local and for x
  CHECK(fired == 2);
  CHECK(g.locals.size() == 2);
  // store contains out at both names plus the f-images
  for (const auto& l : g.locals) {
    CHECK(H.entails(g.store, H.atom("out", {Term::var(l)})));
    CHECK(H.entails(g.store, H.atom("outp", {Term::var(l)})));
  }
  // structural opening rule appeared in the trace
  bool opened = false;
  for (const auto& t : trace)
    if (t.rule == "RStructVar") opened = true;
  CHECK(opened);
}

TEST_CASE("non-well-terminated processes exhaust the budget") {
  // abs (x; c(x)) do tell(c(f(x))) keeps feeding itself
  EquationSystem H = make_out_sys();
  Process Q = Process::abs({"q"}, H.atom("out", {Term::var("q")}),
                           Process::tell(H.parse_constraint("out(f(q))")));
  SosContext ctx;
  Program prog;
  prog.main = Q;
  ctx.program = &prog;
  TimeStepResult r = run_time_unit(Q, H.parse_constraint("out(a)"), 40, ctx);
  CHECK_FALSE(r.terminated);
  CHECK(r.steps_used == 40);
  SosContext ctx2;
  ctx2.program = &prog;
  CHECK_THROWS_AS(io_run(Q, {H.parse_constraint("out(a)")}, 40, ctx2), BudgetExhausted);
}

TEST_CASE("io_run of unless matches the timeout semantics") {
  FiniteLatticeSystem L = make_c6();
  Program prog;
  prog.main = Process::unless(L.element("c"), Process::tell(L.element("d")));
  auto o1 = run(prog, {L.true_c(), L.true_c()});
  CHECK(o1[0] == L.true_c());
  CHECK(o1[1] == L.element("d"));
  auto o2 = run(prog, {L.element("c"), L.true_c()});
  CHECK(o2[0] == L.element("c"));
  CHECK(o2[1] == L.true_c());
  // skip is the identity on inputs
  Program sp_prog;
  sp_prog.main = Process::skip();
  auto o3 = run(sp_prog, {L.element("b"), L.element("c")});
  CHECK(o3[0] == L.element("b"));
  CHECK(o3[1] == L.element("c"));
}

TEST_CASE("sp enumeration over the finite lattice") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  SosContext ctx;
  Program prog;
  prog.main = Process::skip();
  ctx.program = &prog;
  CHECK(sp_enumerate(prog.main, 1, elems, 100, ctx).size() == 6);

  prog.main = Process::ask(L.element("a"), Process::tell(L.element("b")));
  auto sp = sp_enumerate(prog.main, 1, elems, 100, ctx);
  std::set<std::string> names;
  for (const auto& s : sp) names.insert(s.at(0).str());
  CHECK(names == std::set<std::string>{"true", "b", "c", "d", "false"});

  prog.main = Process::tell(L.false_c());
  auto spf = sp_enumerate(prog.main, 1, elems, 100, ctx);
  REQUIRE(spf.size() == 1);
  CHECK(spf.begin()->at(0) == L.false_c());
}

TEST_CASE("determinism under permuted parallel exploration") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    utcc_testing::GeneratorOptions opt;
    Program prog = utcc_testing::random_program(seed, L, opt);
    utcc_testing::Rng rng(seed * 77);
    std::vector<Constraint> inputs;
    for (int i = 0; i < 3; ++i) inputs.push_back(elems[rng.below(elems.size())]);
    auto left = run(prog, inputs, {Scheduler::Mode::Leftmost, 0});
    auto right = run(prog, inputs, {Scheduler::Mode::Rightmost, 0});
    auto seeded = run(prog, inputs, {Scheduler::Mode::Seeded, seed});
    REQUIRE(left.size() == right.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
      CHECK(L.equivalent(left[i], right[i]));
      CHECK(L.equivalent(left[i], seeded[i]));
    }
  }
}

TEST_CASE("io is a partial closure operator") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    utcc_testing::GeneratorOptions opt;
    Program prog = utcc_testing::random_program(seed, L, opt);
    utcc_testing::Rng rng(seed);
    std::vector<Constraint> s;
    for (int i = 0; i < 3; ++i) s.push_back(elems[rng.below(elems.size())]);
    auto out = run(prog, s);
    // extensiveness
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(L.entails(out[i], s[i]));
    // idempotence: the output is quiescent
    auto out2 = run(prog, out);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(L.equivalent(out2[i], out[i]));
  }
}

TEST_CASE("monotonicity on the unless-free fragment") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    utcc_testing::GeneratorOptions opt;
    opt.allow_unless = false;
    Program prog = utcc_testing::random_program(seed, L, opt);
    REQUIRE(utcc_testing::is_monotonic(prog));
    utcc_testing::Rng rng(seed);
    std::vector<Constraint> s1, s2;
    for (int i = 0; i < 2; ++i) {
      Constraint lo = elems[rng.below(elems.size())];
      Constraint hi = L.lub(lo, elems[rng.below(elems.size())]);
      s1.push_back(lo);
      s2.push_back(hi);
    }
    auto o1 = run(prog, s1);
    auto o2 = run(prog, s2);
    for (std::size_t i = 0; i < o1.size(); ++i) CHECK(L.entails(o2[i], o1[i]));
  }
}

TEST_CASE("io equals the minimum of the strongest postcondition") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  const std::size_t k = 2;
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    utcc_testing::GeneratorOptions opt;
    opt.allow_unless = false;
    opt.allow_call = false;
    Program prog = utcc_testing::random_program(seed, L, opt);
    SosContext ctx;
    ctx.program = &prog;
    auto sp = sp_enumerate(prog.main, k, elems, 2000, ctx);
    utcc_testing::Rng rng(seed);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<Constraint> s;
      for (std::size_t i = 0; i < k; ++i) s.push_back(elems[rng.below(elems.size())]);
      auto out = run(prog, s);
      ConstraintSeq out_seq{out};
      ConstraintSeq in_seq{s};
      // out is the least quiescent sequence above s
      CHECK(sp.count(out_seq) == 1);
      for (const auto& w : sp)
        if (seq_leq(in_seq, w)) CHECK(seq_leq(out_seq, w));
    }
  }
}

TEST_CASE("internal restartability and potentiality on sampled configurations") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    utcc_testing::GeneratorOptions opt;
    opt.allow_call = false;
    Program prog = utcc_testing::random_program(seed, L, opt);
    SosContext ctx;
    ctx.program = &prog;
    utcc_testing::Rng rng(seed);
    Configuration g{{}, prog.main, elems[rng.below(elems.size())]};
    auto step = internal_step(g, ctx);
    if (!step) continue;
    // restartability: re-running from the reached store still reaches it
    Configuration h{step->locals, g.process, step->store};
    SosContext ctx2;
    ctx2.program = &prog;
    auto step2 = internal_step(h, ctx2);
    if (step2) CHECK(L.entails(step2->store, step->store));
    // potentiality: a stronger store still permits the transition
    Configuration s{{}, g.process, L.lub(g.store, elems[rng.below(elems.size())])};
    SosContext ctx3;
    ctx3.program = &prog;
    auto step3 = internal_step(s, ctx3);
    if (step3) CHECK(L.entails(step3->store, g.store));
  }
}

TEST_CASE("future function shape") {
  FiniteLatticeSystem L = make_c6();
  Process next_p = Process::next(Process::tell(L.element("a")));
  Process unless_p = Process::unless(L.element("c"), Process::tell(L.element("b")));
  Process abs_p = Process::ask(L.element("d"), Process::skip());
  CHECK(future(next_p).kind() == ProcKind::Tell);
  CHECK(future(unless_p).kind() == ProcKind::Tell);
  CHECK(future(abs_p).kind() == ProcKind::Skip);
  Process par = Process::par({next_p, abs_p});
  CHECK(future(par).kind() == ProcKind::Tell);  // skip children are dropped
}
