#include "doctest.h"

#include "utcc/finite_lattice.hpp"
#include "utcc/formula.hpp"
#include "utcc/parser.hpp"
#include "utcc/seqset.hpp"

using namespace utcc;

namespace {

FiniteLatticeSystem make_c6() {
  return FiniteLatticeSystem("C6", {"true", "a", "b", "c", "d", "false"},
                             {{"a", "b"}, {"c", "d"}});
}

EquationSystem make_out_sys() {
  Signature sig;
  sig.constants = {"k"};
  sig.predicates = {{"out", 1}, {"outp", 1}};
  auto tu = TermUniverse::generate(sig, {"x", "y"}, 0, 1000);
  return EquationSystem("outs", sig, {"x", "y"}, tu);
}

// Enumerable constraint list over the tiny predicate system: all lubs of
// atom subsets plus one existential wrap of each, deduplicated up to
// equivalence. Gives seqset an explicit carrier to test against.
std::vector<Constraint> small_carrier(const EquationSystem& H) {
  std::vector<Constraint> atoms = {
      H.parse_constraint("out(x)"), H.parse_constraint("out(y)"), H.parse_constraint("out(k)"),
      H.parse_constraint("outp(x)"), H.parse_constraint("outp(y)")};
  std::vector<Constraint> out{H.true_c(), H.false_c()};
  for (std::size_t m = 1; m < (std::size_t{1} << atoms.size()); ++m) {
    Constraint acc = H.true_c();
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (m & (std::size_t{1} << i)) acc = H.lub(acc, atoms[i]);
    out.push_back(acc);
    out.push_back(H.hide({"x"}, acc));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("sequence comparison and cuts") {
  FiniteLatticeSystem L = make_c6();
  ConstraintSeq s({L.element("a"), L.true_c()});
  ConstraintSeq t({L.element("b"), L.element("c"), L.element("d")});
  CHECK(seq_leq(s, t));
  CHECK_FALSE(seq_leq(t, s));
  CHECK(seq_equiv(s, s));
  CHECK(s.truncate(1).size() == 1);
  CHECK(s.pad_true(4).size() == 4);
  CHECK(s.pad_true(4).at(3) == L.true_c());
  // k-cut then padding is the identity on length-k sequences
  CHECK(seq_equiv(t.truncate(2).pad_true(2), t.truncate(2)));
}

TEST_CASE("up-closure and head complement") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  SeqSet up_a = up_close(L.element("a"), 1, elems).materialize();
  std::set<std::string> heads;
  for (const auto& s : up_a.members()) heads.insert(s.at(0).str());
  // derived by enumerating the lattice entailments
  CHECK(heads == std::set<std::string>{"a", "b", "false"});

  SeqSet comp_true = complement_head(L.true_c(), 1, elems).materialize();
  // empty head-set, only the mandatory member remains
  REQUIRE(comp_true.members().size() == 1);
  CHECK(comp_true.members().begin()->at(0) == L.false_c());

  SeqSet full = SeqSet::full(1, &L, elems).materialize();
  CHECK(full.members().size() == 6);
  CHECK(intersect(up_a, full).materialize().members() == up_a.members());
  SeqSet shifted = shift(SeqSet::explicit_set(
      1, elems, {ConstraintSeq({L.element("d")})}));
  // C.S with S = {d, false}: 6 prefixes for each tail
  auto mat = shifted.materialize();
  CHECK(mat.members().size() == 12);
  CHECK(mat.contains(ConstraintSeq({L.element("a"), L.element("d")})));
  CHECK_FALSE(mat.contains(ConstraintSeq({L.element("a"), L.element("c")})));
}

TEST_CASE("every sequence set contains false^k") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  ConstraintSeq falsek = false_seq(&L, 2);
  CHECK(up_close(L.element("b"), 2, elems).contains(falsek));
  CHECK(complement_head(L.element("b"), 2, elems).contains(falsek));
  CHECK(intersect(up_close(L.element("b"), 2, elems), complement_head(L.element("c"), 2, elems))
            .contains(falsek));
}

TEST_CASE("canonical JSON serialization is sorted and stable") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  SeqSet s1 = up_close(L.element("c"), 2, elems).materialize();
  SeqSet s2 = up_close(L.element("c"), 2, elems).materialize();
  CHECK(s1.to_json() == s2.to_json());
  CHECK(s1.to_json().find("\"d\"") != std::string::npos);
}

TEST_CASE("sequence existential over explicit sets") {
  EquationSystem H = make_out_sys();
  auto C = [&](const std::string& s) { return H.parse_constraint(s); };
  // S contains out(y) lub out(x); the x-variant search admits out(y)-only
  // sequences
  SeqSet S = SeqSet::explicit_set(1, {}, {ConstraintSeq({C("out(y) /\\ out(x)")})});
  SeqSet E = seq_exists({"x"}, S);
  CHECK(E.contains(ConstraintSeq({C("out(y)")})));
  CHECK_FALSE(E.contains(ConstraintSeq({C("outp(y)")})));
  // the full set is a fixpoint of the existential
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  SeqSet full = SeqSet::full(1, &L, elems);
  CHECK(seq_exists({"x"}, full).contains(ConstraintSeq({L.element("d")})));
}

TEST_CASE("sequence existential over predicates finds diagonal variants") {
  EquationSystem H = make_out_sys();
  auto C = [&](const std::string& s) { return H.parse_constraint(s); };
  // S = up-closure of out(y) lub out(x): membership of the hidden query
  // goes through a variant binding x
  SeqSet S = up_close(C("out(y) /\\ out(x)"), 1);
  SeqSet E = seq_exists({"x"}, S);
  CHECK(E.contains(ConstraintSeq({C("out(y)")})));  // variant: add x=y
  // the exists-closed singleton of false: no proper variants
  SeqSet F = SeqSet::explicit_set(1, {}, {false_seq(&H, 1)});
  CHECK(seq_exists({"x"}, F).contains(false_seq(&H, 1)));
  CHECK_FALSE(seq_exists({"x"}, F).contains(ConstraintSeq({C("out(y)")})));
}

TEST_CASE("openings rename existential blocks apart") {
  EquationSystem H = make_out_sys();
  ConstraintSeq s({H.parse_constraint("exists q.(out(q))"), H.parse_constraint("out(x)")});
  auto opens = seq_openings(s);
  REQUIRE(opens.size() == 2);
  CHECK(opens[0] == s);
  CHECK(H.payload(opens[1].at(0)).bound.empty());
  CHECK(H.free_vars(opens[1].at(0)).size() == 1);
}

TEST_CASE("forall is a closure operator on small explicit sets") {
  EquationSystem H = make_out_sys();
  auto carrier = small_carrier(H);
  const TermUniverse& tu = *H.universe();
  // Build a family of explicit sets over the carrier and check the laws.
  std::vector<SeqSet> families;
  families.push_back(up_close(H.parse_constraint("out(x)"), 1, carrier).materialize());
  families.push_back(up_close(H.parse_constraint("out(k)"), 1, carrier).materialize());
  families.push_back(
      intersect(up_close(H.parse_constraint("out(x)"), 1, carrier),
                complement_head(H.parse_constraint("outp(x)"), 1, carrier))
          .materialize());
  for (const auto& S : families) {
    SeqSet FS = seq_forall({"x"}, S, tu).materialize();
    // extensive in the domain order: forall(S) is a subset of S
    for (const auto& m : FS.members()) CHECK(S.contains(m));
    // idempotent
    SeqSet FFS = seq_forall({"x"}, FS, tu).materialize();
    CHECK(FFS.members() == FS.members());
  }
  // monotone: S subset of T implies forall(S) subset of forall(T)
  SeqSet small = up_close(H.parse_constraint("out(x) /\\ outp(x)"), 1, carrier).materialize();
  SeqSet big = up_close(H.parse_constraint("out(x)"), 1, carrier).materialize();
  SeqSet fsmall = seq_forall({"x"}, small, tu).materialize();
  SeqSet fbig = seq_forall({"x"}, big, tu).materialize();
  for (const auto& m : fsmall.members()) CHECK(fbig.contains(m));
}

TEST_CASE("x-variants above a diagonal coincide") {
  // Obs.-style check: two xs-variants both entailing the diagonal are
  // equivalent.
  EquationSystem H = make_out_sys();
  auto C = [&](const std::string& s) { return H.parse_constraint(s); };
  for (const auto& c : small_carrier(H)) {
    Constraint v1 = H.lub(H.hide({"x"}, c), H.diag({"x"}, {Term::var("y")}));
    Constraint v2 = H.lub(H.lub(H.hide({"x"}, c), H.diag({"x"}, {Term::var("y")})), C("true"));
    CHECK(H.equivalent(v1, v2));
    CHECK(H.equivalent(H.hide({"x"}, v1), H.hide({"x"}, c)));
  }
}

TEST_CASE("existential distributes over intersection with variant-closed sets") {
  // For T closed under x-variants: exists_x(S /\ T) == exists_x(S) /\ T.
  EquationSystem H = make_out_sys();
  auto carrier = small_carrier(H);
  SeqSet S = up_close(H.parse_constraint("out(x) /\\ out(y)"), 1, carrier);
  SeqSet T = up_close(H.parse_constraint("outp(y)"), 1, carrier);  // x-free: variant closed
  SeqSet lhs = seq_exists({"x"}, intersect(S, T)).materialize();
  SeqSet rhs = intersect(seq_exists({"x"}, S), T).materialize();
  CHECK(lhs.members() == rhs.members());
}

TEST_CASE("forall on degenerate finite lattices is the identity") {
  FiniteLatticeSystem L = make_c6();
  auto elems = *L.enumerate();
  TermUniverse tu;
  tu.add(Term::var("x"));
  SeqSet S = up_close(L.element("a"), 1, elems).materialize();
  SeqSet F = seq_forall({"x"}, S, tu).materialize();
  CHECK(F.members() == S.members());
}
