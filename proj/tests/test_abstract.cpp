#include "doctest.h"

#include "random_programs.hpp"
#include "utcc/denot.hpp"
#include "utcc/domains.hpp"
#include "utcc/parser.hpp"
#include "utcc/transform.hpp"

using namespace utcc;

namespace {

std::shared_ptr<FiniteLatticeSystem> make_c6() {
  return std::make_shared<FiniteLatticeSystem>(
      FiniteLatticeSystem("C6", {"true", "a", "b", "c", "d", "false"},
                          {{"a", "b"}, {"c", "d"}}));
}

}  // namespace

TEST_CASE("k-cut / padding form a Galois connection") {
  auto L = make_c6();
  auto elems = *L->enumerate();
  utcc_testing::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Constraint> xs, ys;
    std::size_t n = 3, k = 2;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(elems[rng.below(6)]);
    for (std::size_t i = 0; i < k; ++i) ys.push_back(elems[rng.below(6)]);
    ConstraintSeq s{xs}, w{ys};
    // alpha_k(s) <= w iff s <= gamma_k(w) (gamma pads with true)
    bool left = seq_leq(k_cut(s, k), w);
    bool right = seq_leq(s, gamma_k(w, n));
    CHECK(left == right);
    CHECK(seq_equiv(k_cut(gamma_k(w, n), k), w));
  }
}

TEST_CASE("identity description passes the correctness checks") {
  auto L = make_c6();
  Description id = identity_description(L.get());
  auto elems = *L->enumerate();
  auto report = check_description(id, elems, elems);
  CHECK(report.ok);
  CHECK(report.checked_hide > 0);
  CHECK(report.checked_monotone > 0);
}

TEST_CASE("a broken abstraction dropping diagonals is caught") {
  Signature sig;
  sig.constants = {"k0"};
  sig.functions = {{"cons", 2}, {"nil", 0}};
  sig.predicates = {};
  auto tu = TermUniverse::generate(sig, {"x", "y"}, 1, 10000);
  auto H = std::make_shared<EquationSystem>("herb", sig, std::vector<std::string>{"x", "y"}, tu);
  GroundnessSystem GT({"x", "y"}, true);
  Description broken;
  broken.name = "broken";
  broken.concrete = H.get();
  broken.abstr = &GT;
  // alpha forgets everything: condition (2) on diagonals must fail
  broken.alpha = [&GT](const Constraint&) { return GT.true_c(); };
  broken.abs_entails_conc = [](const Constraint&, const Constraint&) { return false; };
  std::vector<Constraint> samples = {H->true_c(), H->parse_constraint("x=[]"),
                                     H->parse_constraint("x=[k0|y]")};
  auto report = check_description(broken, samples, samples);
  CHECK_FALSE(report.ok);
  bool diag_failure = false;
  for (const auto& f : report.failures)
    if (f.find("condition (2)") != std::string::npos) diag_failure = true;
  CHECK(diag_failure);
}

TEST_CASE("abstract unless denotes the full set") {
  auto L = make_c6();
  auto elems = *L->enumerate();
  Description id = identity_description(L.get());
  Program prog;
  prog.main = Process::unless(L->element("a"), Process::tell(L->element("d")));
  DenoteOptions opt;
  opt.k = 2;
  opt.abstract_mode = true;
  opt.desc = &id;
  auto engine = make_denote_engine(prog, *L, opt);
  auto den = denotation(engine, prog.main, elems).materialize();
  CHECK(den.members().size() == 36);
}

TEST_CASE("guard blocking: the groundness negative control") {
  // tell(x=a) || when x=b do tell(y=b): the abstract analysis must not
  // conclude that y is ground, because alpha identifies x=a and x=b.
  Signature sig;
  sig.constants = {"ca", "cb"};
  sig.functions = {{"cons", 2}, {"nil", 0}};
  auto tu = TermUniverse::generate(sig, {"x", "y"}, 1, 10000);
  auto H = std::make_shared<EquationSystem>("herb", sig, std::vector<std::string>{"x", "y"}, tu);
  auto GT = std::make_shared<GroundnessSystem>(std::vector<std::string>{"x", "y"}, true);
  Description d;
  d.concrete = H.get();
  d.abstr = GT.get();
  GroundnessSystem* g = GT.get();
  d.alpha = [g](const Constraint& c) { return g->alpha_from(c); };
  d.abs_entails_conc = [g](const Constraint& da, const Constraint& c) {
    return g->tilde_entails(da, c);
  };
  Program prog;
  prog.main = Process::par({Process::tell(H->parse_constraint("x=ca")),
                            Process::ask(H->parse_constraint("x=cb"),
                                         Process::tell(H->parse_constraint("y=cb")))});
  DenoteOptions opt;
  opt.k = 1;
  opt.abstract_mode = true;
  opt.desc = &d;
  auto engine = make_denote_engine(prog, *GT, opt);
  // alpha of the concrete output: x ground, nothing about y; the naive
  // equation would demand y, the guarded one must accept this member
  Constraint img = g->alpha_from(H->parse_constraint("x=ca"));
  CHECK(engine->member_of_main(ConstraintSeq({img})));
}

TEST_CASE("abstraction soundness for the hat description over the lattice") {
  auto L = make_c6();
  auto S = std::make_shared<SuspensionSystem>(L);
  Description hat = hat_description(L.get(), S.get());
  auto report = check_description(hat, *L->enumerate(), *L->enumerate());
  CHECK(report.ok);

  auto elems = *L->enumerate();
  auto selems = *S->enumerate();
  const std::size_t k = 2;
  for (std::uint64_t seed = 900; seed < 925; ++seed) {
    utcc_testing::GeneratorOptions gopt;
    gopt.allow_call = false;
    Program prog = utcc_testing::random_program(seed, *L, gopt);
    DenoteOptions copt;
    copt.k = k;
    auto conc_engine = make_denote_engine(prog, *L, copt);
    auto conc = denotation(conc_engine, prog.main, elems).materialize();
    DenoteOptions aopt;
    aopt.k = k;
    aopt.abstract_mode = true;
    aopt.desc = &hat;
    auto abs_engine = make_denote_engine(prog, *S, aopt);
    for (const auto& s : conc.members()) {
      CHECK(abs_engine->member_of_main(alpha_seq(hat, s)));
    }
  }
}

TEST_CASE("induced Galois insertion on sequence sets") {
  // alpha(S) = pointwise images, gamma(Sa) = preimages: alpha(gamma) = id
  // and gamma(alpha) extensive, for the surjective identity description.
  auto L = make_c6();
  auto elems = *L->enumerate();
  Description id = identity_description(L.get());
  utcc_testing::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::set<ConstraintSeq> members;
    for (int i = 0; i < 5; ++i)
      members.insert(ConstraintSeq({elems[rng.below(6)], elems[rng.below(6)]}));
    auto image = [&](const std::set<ConstraintSeq>& S) {
      std::set<ConstraintSeq> out;
      for (const auto& s : S) out.insert(alpha_seq(id, s));
      return out;
    };
    auto preimage = [&](const std::set<ConstraintSeq>& Sa) {
      std::set<ConstraintSeq> out;
      for (const auto& e1 : elems)
        for (const auto& e2 : elems) {
          ConstraintSeq s({e1, e2});
          if (Sa.count(alpha_seq(id, s))) out.insert(s);
        }
      return out;
    };
    CHECK(image(preimage(members)) == members);
    auto ga = preimage(image(members));
    for (const auto& s : members) CHECK(ga.count(s) == 1);
  }
}

TEST_CASE("guard monotonicity of the certified entailment") {
  // c <= c' implies that everything certifying c' certifies c.
  Signature sig;
  sig.functions = {{"cons", 2}, {"nil", 0}};
  auto tu = TermUniverse::generate(sig, {"x", "y"}, 1, 10000);
  EquationSystem H("herb", sig, {"x", "y"}, tu);
  GroundnessSystem GT({"x", "y"}, true);
  Constraint weak = H.parse_constraint("x=[]");
  Constraint strong = H.parse_constraint("x=[] /\\ y=[]");
  REQUIRE(H.entails(strong, weak));
  std::vector<Constraint> abs_samples = {
      GT.parse_constraint("<true, nil(x)>"), GT.parse_constraint("<x, nil(x) /\\ nil(y)>"),
      GT.parse_constraint("<true, true>"), GT.false_c()};
  for (const auto& da : abs_samples)
    if (GT.tilde_entails(da, strong)) CHECK(GT.tilde_entails(da, weak));
}
