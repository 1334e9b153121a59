#include "doctest.h"

#include <algorithm>

#include "utcc/finite_lattice.hpp"
#include "utcc/formula.hpp"
#include "utcc/parser.hpp"

using namespace utcc;

namespace {

EquationSystem make_herbrand() {
  Signature sig;
  sig.constants = {"a"};
  sig.functions = {{"f", 2}, {"g", 1}};
  sig.predicates = {{"out", 1}, {"out2", 1}, {"sec", 1}};
  auto tu = TermUniverse::generate(sig, {"x", "y", "z", "w"}, 2, 100000);
  return EquationSystem("herbrand", sig, {"x", "y", "z", "w"}, tu);
}

FiniteLatticeSystem make_c6() {
  return FiniteLatticeSystem("C6", {"true", "a", "b", "c", "d", "false"},
                             {{"a", "b"}, {"c", "d"}});
}

// Probe family for entailment-based equivalence oracles over the bounded
// universe.
std::vector<Constraint> probe_family(const EquationSystem& H) {
  std::vector<Constraint> probes;
  auto P = [&](const std::string& s) { probes.push_back(H.parse_constraint(s)); };
  P("true");
  P("out(x)");
  P("out(y)");
  P("out(g(a))");
  P("out(a)");
  P("exists q.(out(q))");
  P("x=g(a)");
  P("y=a");
  P("x=y");
  P("exists q.(x=g(q))");
  P("out(x) /\\ out2(x)");
  P("out(y) /\\ out2(y)");
  return probes;
}

}  // namespace

TEST_CASE("finite lattice table operations") {
  FiniteLatticeSystem L = make_c6();
  CHECK(L.entails(L.element("b"), L.element("a")));
  CHECK_FALSE(L.entails(L.element("a"), L.element("b")));
  CHECK(L.lub(L.true_c(), L.element("c")) == L.element("c"));
  // b and d have no upper bound below false in the two-chain lattice.
  CHECK(L.lub(L.element("b"), L.element("d")) == L.false_c());
  CHECK(L.entails(L.false_c(), L.element("d")));
  auto elems = *L.enumerate();
  for (const auto& c : elems)
    for (const auto& d : elems) {
      CHECK(L.lub(c, d) == L.lub(d, c));
      CHECK(L.lub(c, c) == c);
      CHECK(L.entails(L.lub(c, d), c));
      CHECK(L.entails(L.lub(c, d), d));
      for (const auto& e : elems) {
        CHECK(L.lub(L.lub(c, d), e) == L.lub(c, L.lub(d, e)));
        if (L.entails(e, c) && L.entails(e, d)) CHECK(L.entails(e, L.lub(c, d)));
      }
    }
}

TEST_CASE("solved forms") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };

  Constraint c = P("exists z,y.(x=f(y,y) /\\ y=g(z))");
  CHECK(H.equivalent(c, P("exists q.(x=f(g(q),g(q)))")));

  CHECK(H.equivalent(P("f(x,y)=f(g(a),z)"), P("x=g(a) /\\ y=z")));
  CHECK(H.is_false(P("x=g(x)")));
  // no universe term satisfies x = g(x) (oracle for the occurs failure)
  for (const auto& t : H.universe()->terms()) CHECK_FALSE(t == Term::app("g", {t}));
  CHECK(H.is_false(P("g(x)=f(x,y)")));
  CHECK(H.is_false(P("x=a /\\ x=g(a)")));
  // solved form is idempotent
  Constraint d = P("exists q.(x=f(q,a) /\\ out(q))");
  CHECK(H.normal_form(d) == d);
}

TEST_CASE("entailment over the equality theory") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };

  CHECK(H.entails(P("f(x,y)=f(g(a),z)"), P("x=g(a)")));
  CHECK(H.entails(P("out(42)"), P("true")));
  // a free variable is not a placeholder
  CHECK_FALSE(H.entails(P("out(42)"), P("out(x)")));
  CHECK(H.entails(P("out(g(a))"), P("exists q.(out(q))")));
  CHECK_FALSE(H.entails(P("exists q.(out(q))"), P("out(x)")));
  CHECK(H.entails(P("x=y /\\ out(y)"), P("out(x)")));
  CHECK(H.entails(P("x=g(a) /\\ out(x)"), P("out(g(a))")));
  for (const auto& p : probe_family(H)) CHECK(H.entails(H.false_c(), p));
  CHECK_FALSE(H.entails(P("out(x)"), H.false_c()));
}

TEST_CASE("hide, diag, subst") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };

  CHECK(H.hide({"x"}, H.true_c()) == H.true_c());
  CHECK(H.equivalent(H.hide({"x"}, P("x=g(a) /\\ y=a")), P("y=a")));
  {
    // oracle: same entailments against the probe family
    Constraint lhs = H.hide({"x"}, P("x=g(a) /\\ y=a"));
    Constraint rhs = P("y=a");
    for (const auto& p : probe_family(H))
      CHECK(H.entails(lhs, p) == H.entails(rhs, p));
  }
  CHECK(H.diag({}, {}) == H.true_c());
  CHECK(H.diag({"x"}, {Term::var("x")}) == H.true_c());
  CHECK(H.equivalent(H.diag({"x", "y"}, {Term::app("a"), Term::app("g", {Term::app("a")})}),
                     P("x=a /\\ y=g(a)")));
  CHECK_THROWS_AS(H.diag({"x"}, {}), UsageError);

  CHECK(H.equivalent(H.subst(P("out(x)"), {"x"}, {Term::app("42")}), P("out(42)")));
  CHECK(H.subst(P("out(x)"), {}, {}) == P("out(x)"));
  Constraint s = H.subst(P("out(x) /\\ out2(x)"), {"x"}, {Term::var("y")});
  CHECK(H.entails(s, P("out(y) /\\ out2(y)")));
  CHECK(H.entails(P("out(y) /\\ out2(y)"), s));
  CHECK_THROWS_AS(H.subst(P("out(x)"), {"x"}, {Term::app("g", {Term::var("x")})}), UsageError);

  for (const auto& c : probe_family(H)) {
    Constraint sc = H.subst(c, {"x"}, {Term::var("w")});
    CHECK(H.entails(H.lub(sc, H.diag({"x"}, {Term::var("w")})), c));
  }
}

TEST_CASE("normal form renames bound blocks apart") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };
  Constraint c = H.lub(P("exists w.(out(w))"), P("out(x)"));
  CHECK(H.payload(c).bound.size() == 1);
  CHECK(H.free_vars(c) == VarSet{"x"});
  Constraint two = H.lub(P("exists x.(out(x))"), P("exists x.(sec(x))"));
  CHECK(H.payload(two).bound.size() == 2);
  CHECK(H.free_vars(two).empty());
}

TEST_CASE("free variables per the cylindrification definition") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };
  CHECK(H.free_vars(P("out(x) /\\ out(y)")) == VarSet{"x", "y"});
  CHECK(H.free_vars(P("exists x.(out(x))")).empty());
  CHECK(H.free_vars(H.true_c()).empty());
  for (const auto& c : probe_family(H))
    for (const auto& v : {"x", "y", "z", "w"}) {
      bool syntactic = H.free_vars(c).count(v) > 0;
      bool semantic = !H.equivalent(H.hide({v}, c), c);
      CHECK(syntactic == semantic);
    }
}

TEST_CASE("cylindrification axioms on the bounded universe") {
  EquationSystem H = make_herbrand();
  auto probes = probe_family(H);
  for (const auto& c : probes) {
    for (const auto& v : {"x", "y"}) {
      CHECK(H.entails(c, H.hide({v}, c)));
      CHECK(H.equivalent(H.hide({"x"}, H.hide({"y"}, c)), H.hide({"y"}, H.hide({"x"}, c))));
    }
    for (const auto& d : probes) {
      if (H.entails(d, c)) CHECK(H.entails(H.hide({"x"}, d), H.hide({"x"}, c)));
      Constraint lhs = H.hide({"x"}, H.lub(c, H.hide({"x"}, d)));
      Constraint rhs = H.lub(H.hide({"x"}, c), H.hide({"x"}, d));
      CHECK(H.equivalent(lhs, rhs));
    }
  }
}

TEST_CASE("diagonal axioms") {
  EquationSystem H = make_herbrand();
  auto dxy = [&](const char* x, const char* y) { return H.diag({x}, {Term::var(y)}); };
  CHECK(H.diag({"x"}, {Term::var("x")}) == H.true_c());
  CHECK(H.equivalent(dxy("x", "y"), H.hide({"z"}, H.lub(dxy("x", "z"), dxy("z", "y")))));
  for (const auto& c : probe_family(H)) {
    Constraint rhs = H.lub(dxy("x", "y"), H.hide({"x"}, H.lub(c, dxy("x", "y"))));
    CHECK(H.entails(rhs, c));
  }
}

TEST_CASE("lattice laws on sampled equation constraints") {
  EquationSystem H = make_herbrand();
  auto probes = probe_family(H);
  for (const auto& c : probes)
    for (const auto& d : probes) {
      Constraint j = H.lub(c, d);
      CHECK(H.entails(j, c));
      CHECK(H.entails(j, d));
      CHECK(H.equivalent(j, H.lub(d, c)));
      for (const auto& e : probes)
        if (H.entails(e, c) && H.entails(e, d)) CHECK(H.entails(e, j));
    }
}

TEST_CASE("assignment search for abstraction candidates") {
  EquationSystem H = make_herbrand();
  auto P = [&](const std::string& s) { return H.parse_constraint(s); };
  Constraint store = H.lub(P("out(w)"), P("out(g(a))"));
  auto assigns = H.entail_assignments(store, P("out(q)"), {"q"});
  REQUIRE(assigns.size() == 2);
  std::set<std::string> values;
  for (const auto& th : assigns) values.insert(th.at("q").str());
  CHECK(values == std::set<std::string>{"w", "g(a)"});
  // two-hole matching with shared structure
  auto pairs = H.entail_assignments(P("out(f(a,g(a)))"), P("out(f(p,q))"), {"p", "q"});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].at("p") == Term::app("a"));
  CHECK(pairs[0].at("q") == Term::app("g", {Term::app("a")}));
}

TEST_CASE("mixed-system operands are rejected") {
  EquationSystem H = make_herbrand();
  FiniteLatticeSystem L = make_c6();
  CHECK_THROWS_AS(H.lub(H.true_c(), L.true_c()), UsageError);
  CHECK_THROWS_AS((void)L.entails(L.element("a"), H.true_c()), UsageError);
}
