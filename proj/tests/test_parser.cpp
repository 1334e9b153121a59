#include "doctest.h"

#include "utcc/finite_lattice.hpp"
#include "utcc/parser.hpp"

using namespace utcc;

namespace {

EquationSystem make_sys() {
  Signature sig;
  sig.constants = {"a"};
  sig.functions = {{"g", 1}, {"cons", 2}, {"nil", 0}};
  sig.predicates = {{"out", 1}, {"ready", 0}};
  auto tu = TermUniverse::generate(sig, {"x", "y", "z"}, 1, 10000);
  return EquationSystem("test", sig, {"x", "y", "z"}, tu);
}

Program parse_over(const std::string& text, const ConstraintSystem& sys) {
  return bind_program(parse_program_source(text), sys);
}

}  // namespace

TEST_CASE("basic process forms") {
  EquationSystem H = make_sys();
  Program p = parse_over("tell(out(x))", H);
  CHECK(p.main.kind() == ProcKind::Tell);

  p = parse_over("local x.(tell(out(x)))", H);
  CHECK(p.main.kind() == ProcKind::Local);
  CHECK(p.main.binders() == std::vector<std::string>{"x"});
  CHECK(p.main.body().kind() == ProcKind::Tell);

  p = parse_over("when out(x) do skip || next tell(ready())", H);
  CHECK(p.main.kind() == ProcKind::Par);
  CHECK(p.main.children()[0].kind() == ProcKind::Abs);
  CHECK(p.main.children()[0].binders().empty());
  CHECK(p.main.children()[1].kind() == ProcKind::Next);

  p = parse_over("abs (q; out(q)) do tell(out(g(q)))", H);
  CHECK(p.main.kind() == ProcKind::Abs);
  CHECK(p.main.binders() == std::vector<std::string>{"q"});

  p = parse_over("unless out(a) next skip", H);
  CHECK(p.main.kind() == ProcKind::Unless);
}

TEST_CASE("replication desugars to a next-guarded declaration") {
  EquationSystem H = make_sys();
  Program p = parse_over("!tell(out(x))", H);
  CHECK(p.main.kind() == ProcKind::Call);
  REQUIRE(p.decls.count("bang_0") == 1);
  const Declaration& d = p.decls.at("bang_0");
  // bang_0(x) = tell(out(x)) || next bang_0(x)
  CHECK(d.params == std::vector<std::string>{"x"});
  CHECK(d.body.kind() == ProcKind::Par);
  bool has_next_call = false;
  for (const auto& q : d.body.children())
    if (q.kind() == ProcKind::Next && q.body().kind() == ProcKind::Call &&
        q.body().callee() == "bang_0")
      has_next_call = true;
  CHECK(has_next_call);
  // the generated declaration passes the guardedness check (check_program
  // ran during binding)
}

TEST_CASE("list sugar") {
  EquationSystem H = make_sys();
  Term t = parse_term("[a,a|x]", H.signature());
  CHECK(t == Term::app("cons", {Term::app("a"), Term::app("cons", {Term::app("a"), Term::var("x")})}));
  CHECK(parse_term("[]", H.signature()) == Term::app("nil"));
}

TEST_CASE("well-formedness violations are rejected") {
  EquationSystem H = make_sys();
  // duplicate declaration
  CHECK_THROWS_AS(parse_over("p() = skip;\np() = skip;\np()", H), UsageError);
  // unguarded recursion
  CHECK_THROWS_AS(parse_over("p() = p();\np()", H), UsageError);
  CHECK_THROWS_AS(parse_over("p() = q();\nq() = p();\np()", H), UsageError);
  // guarded mutual recursion is fine
  CHECK_NOTHROW(parse_over("p() = next q();\nq() = p();\np()", H));
  // free-variable escape
  CHECK_THROWS_AS(parse_over("p() = tell(out(x));\np()", H), UsageError);
  // ... unless declared global
  CHECK_NOTHROW(parse_over("global x.\np() = tell(out(x));\np()", H));
  // undefined call
  CHECK_THROWS_AS(parse_over("q()", H), UsageError);
  // syntax error with position
  CHECK_THROWS_AS(parse_over("tell(", H), ParseError);
  CHECK_THROWS_AS(parse_over("when out(x) tell(out(x))", H), ParseError);
}

TEST_CASE("round trip through the pretty printer") {
  EquationSystem H = make_sys();
  const char* src =
      "p(x) = tell(out(x)) || next p(x);\n"
      "q() = abs (v; out(v)) do tell(out(g(v)));\n"
      "local y.(p(y) || q() || unless out(a) next skip)";
  Program p1 = parse_over(src, H);
  Program p2 = parse_over(program_str(p1), H);
  CHECK(program_str(p1) == program_str(p2));
  CHECK(struct_congruent(p1.main, p2.main));
}

TEST_CASE("structural congruence") {
  EquationSystem H = make_sys();
  Process P = Process::tell(H.parse_constraint("out(x)"));
  Process Q = Process::next(Process::skip());
  // P || skip == P
  CHECK(struct_congruent(Process::par({P, Process::skip()}), P));
  // commutativity and associativity
  CHECK(struct_congruent(Process::par({P, Q}), Process::par({Q, P})));
  CHECK(struct_congruent(Process::par({Process::par({P, Q}), P}),
                         Process::par({P, Process::par({Q, P})})));
  // alpha-conversion of local binders
  Process lx = Process::local({"x"}, Process::tell(H.parse_constraint("out(x)")));
  Process ly = Process::local({"y"}, Process::tell(H.parse_constraint("out(y)")));
  CHECK(struct_congruent(lx, ly));
  CHECK_FALSE(struct_congruent(lx, P));
  // congruence is preserved by contexts
  CHECK(struct_congruent(Process::next(Process::par({P, Q})),
                         Process::next(Process::par({Q, P}))));
  CHECK(struct_congruent(Process::ask(H.parse_constraint("out(a)"), Process::par({P, Q})),
                         Process::ask(H.parse_constraint("out(a)"), Process::par({Q, P}))));
}

TEST_CASE("process free variables") {
  EquationSystem H = make_sys();
  auto C = [&](const std::string& s) { return H.parse_constraint(s); };
  CHECK(free_vars(Process::local({"x"}, Process::tell(C("out(x)")))).empty());
  // abs binds in guard and body
  Process a = Process::abs({"z"}, C("out(z)"), Process::tell(C("out(g(z))")));
  CHECK(free_vars(a).empty());
  Process call = Process::call("p", {Term::app("g", {Term::var("y")})});
  CHECK(free_vars(call) == VarSet{"y"});
  Process u = Process::unless(C("out(x)"), Process::tell(C("out(y)")));
  CHECK(free_vars(u) == VarSet{"x", "y"});
}

TEST_CASE("finite lattice constraint text") {
  FiniteLatticeSystem L("C4", {"true", "a", "b", "false"}, {{"a", "b"}});
  CHECK(L.parse_constraint("b") == L.element("b"));
  CHECK(L.parse_constraint("a /\\ b") == L.element("b"));
  CHECK_THROWS_AS(L.parse_constraint("zap"), UsageError);
}
