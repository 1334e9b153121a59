#include "doctest.h"

#include "utcc/crypto.hpp"
#include "utcc/denot.hpp"
#include "utcc/domains.hpp"
#include "utcc/groundness.hpp"
#include "utcc/parser.hpp"
#include "utcc/suspension.hpp"
#include "utcc/transform.hpp"

using namespace utcc;

namespace {

std::shared_ptr<FiniteLatticeSystem> make_c6() {
  return std::make_shared<FiniteLatticeSystem>(
      FiniteLatticeSystem("C6", {"true", "a", "b", "c", "d", "false"},
                          {{"a", "b"}, {"c", "d"}}));
}

std::shared_ptr<EquationSystem> make_lists(std::vector<std::string> pool) {
  Signature sig;
  sig.constants = {"k0"};
  sig.functions = {{"cons", 2}, {"nil", 0}};
  auto tu = TermUniverse::generate(sig, pool, 2, 100000);
  return std::make_shared<EquationSystem>("herb", sig, pool, tu);
}

}  // namespace

TEST_CASE("message length and the kappa cut") {
  Term m = Term::var("m");
  CHECK(message_length(Term::app("A")) == 0);
  CHECK(message_length(Term::app("pub", {Term::app("B")})) == 0);
  Term mm = Term::app("pair", {m, Term::app("pair", {m, m})});
  CHECK(message_length(mm) == 2);
  CHECK(cut_term(mm, 2) == mm);
  CHECK(cut_term(mm, 1) == m_top());
  // enc adds one constructor; keys are transparent
  Term msg = Term::app("enc", {Term::app("pair", {m, Term::app("A")}),
                               Term::app("pub", {Term::app("C")})});
  CHECK(message_length(msg) == 2);
}

TEST_CASE("crypto abstraction cuts long messages") {
  CryptoDomain dom = make_crypto_domain(1, {"A", "B"}, {"m"}, {});
  auto C = [&](const std::string& s) { return dom.concrete->parse_constraint(s); };
  // alpha_1(out(((m,m),m))) = out(m_top)
  Constraint longmsg = C("out(pair(pair(m,m),m))");
  Constraint img = dom.desc.alpha(longmsg);
  CHECK(dom.abstr->entails(img, dom.abstr->atom("out", {m_top()})));
  // short messages pass through unchanged
  Constraint shortmsg = C("out(pair(m,A))");
  CHECK(dom.abstr->equivalent(dom.desc.alpha(shortmsg), dom.abstr->import(shortmsg)));
  // alpha distributes over lub
  Constraint both = dom.concrete->lub(longmsg, shortmsg);
  CHECK(dom.abstr->equivalent(dom.desc.alpha(both),
                              dom.abstr->lub(dom.desc.alpha(longmsg), dom.desc.alpha(shortmsg))));
  // m_top absorbs conflicting equations at the cut boundary
  Constraint conflict = dom.abstr->lub(dom.abstr->parse_constraint("x=mtop"),
                                       dom.abstr->import(C("x=pair(m,A)")));
  CHECK_FALSE(dom.abstr->is_false(conflict));
  CHECK(dom.abstr->entails(conflict, dom.abstr->parse_constraint("x=mtop")));
}

TEST_CASE("certified crypto entailment refuses the cut element") {
  CryptoDomain dom = make_crypto_domain(3, {"A", "C"}, {"m", "x"}, {});
  auto C = [&](const std::string& s) { return dom.concrete->parse_constraint(s); };
  Constraint da = dom.desc.alpha(C("out(enc(pair(m,A),pub(C))) /\\ out(priv(C))"));
  CHECK(dom.desc.abs_entails_conc(da, C("out(priv(C))")));
  CHECK(dom.desc.abs_entails_conc(da, C("exists q.(out(enc(q,pub(C))))")));
  CHECK_FALSE(dom.desc.abs_entails_conc(da, C("out(m)")));
  // a judgment resting on m_top is refused
  Constraint top_atom = dom.abstr->atom("out", {m_top()});
  CHECK_FALSE(dom.desc.abs_entails_conc(top_atom, C("out(m)")));
  CHECK_FALSE(dom.desc.abs_entails_conc(top_atom, C("exists q.(out(q))")));
  // crypto description passes the correctness checks on a bounded sample
  std::vector<Constraint> samples = {
      dom.concrete->true_c(), C("out(m)"), C("out(A)"), C("out(pair(m,A))"),
      C("out(enc(pair(m,A),pub(C)))"), C("secret(m)"), C("x=pair(m,A)"),
      C("exists q.(out(enc(q,pub(C))))")};
  auto report = check_description(dom.desc, samples, samples);
  CHECK(report.ok);
}

TEST_CASE("groundness and type abstraction of list equations") {
  auto H = make_lists({"x", "y", "z"});
  GroundnessSystem GT({"x", "y", "z"}, true);
  auto C = [&](const std::string& s) { return H->parse_constraint(s); };
  auto A = [&](const std::string& s) { return GT.alpha_from(C(s)); };

  // alpha_G(x=[k0|k0-list]) = x (ground), with list(x)
  CHECK(GT.entails(A("x=[k0]"), GT.parse_constraint("<x, list(x)>")));
  // alpha_G(x=[y|z]) = x <-> (y /\ z), alpha_T = list(x,z)
  Constraint img = A("x=[y|z]");
  CHECK(GT.entails(img, GT.parse_constraint("<x <-> (y /\\ z), list(x,z)>")));
  CHECK_FALSE(GT.entails(img, GT.parse_constraint("<x, true>")));
  // alpha_T(x=[]) = nil(x), saturated with list(x)
  CHECK(GT.entails(A("x=[]"), GT.parse_constraint("<x, nil(x) /\\ list(x)>")));
  // existentials eliminated positively: exists y.(x=[k0|y] /\ y=[]) gives
  // a ground list
  CHECK(GT.entails(A("exists y.(x=[k0|y] /\\ y=[])"), GT.parse_constraint("<x, list(x)>")));
  // saturation: cons-cell with a list tail is a list
  Constraint chain = A("x=[y|z] /\\ z=[]");
  CHECK(GT.entails(chain, GT.parse_constraint("<true, list(x)>")));

  // the groundness-type description passes the correctness checks
  Description d;
  d.concrete = H.get();
  d.abstr = &GT;
  GroundnessSystem* g = &GT;
  d.alpha = [g](const Constraint& c) { return g->alpha_from(c); };
  d.abs_entails_conc = [g](const Constraint& da, const Constraint& c) {
    return g->tilde_entails(da, c);
  };
  std::vector<Constraint> samples = {H->true_c(),
                                     C("x=[]"),
                                     C("x=[k0]"),
                                     C("x=[y|z]"),
                                     C("x=[k0|y] /\\ y=[]"),
                                     C("exists q.(x=[q|y])"),
                                     C("x=y"),
                                     C("z=[k0|z'1]")};
  auto report = check_description(d, samples, samples, 3);
  CHECK(report.ok);
}

TEST_CASE("the certified groundness-type entailment table") {
  auto H = make_lists({"x", "y", "xs"});
  GroundnessSystem GT({"x", "y", "xs"}, true);
  GroundnessSystem POS({"x", "y", "xs"}, false);
  auto C = [&](const std::string& s) { return H->parse_constraint(s); };

  CHECK(GT.tilde_entails(GT.parse_constraint("<true, nil(x)>"), C("x=[]")));
  CHECK(GT.tilde_entails(GT.parse_constraint("<true, list(x,xs)>"),
                         C("exists u,v.(x=[u|v])")));
  // list(x) alone could be nil: the cons query is refused
  CHECK_FALSE(GT.tilde_entails(GT.parse_constraint("<true, list(x)>"),
                               C("exists u,v.(x=[u|v])")));
  // groundness alone never certifies structure: Pos cannot distinguish []
  // from ground lists
  CHECK_FALSE(GT.tilde_entails(GT.parse_constraint("<x, true>"), C("x=[]")));
  CHECK_FALSE(POS.tilde_entails(POS.parse_constraint("x"), C("x=[]")));
  // false certifies anything
  CHECK(GT.tilde_entails(GT.false_c(), C("x=[]")));
}

TEST_CASE("suspension system lattice") {
  auto L = make_c6();
  SuspensionSystem S(L);
  auto pair = [&](const char* c, bool ns) { return S.make_pair(L->element(c), ns); };
  CHECK(S.true_c() == pair("true", false));
  CHECK(S.false_c() == pair("false", true));
  // pointwise order: susp below nsusp
  CHECK(S.entails(pair("b", true), pair("a", false)));
  CHECK_FALSE(S.entails(pair("b", false), pair("a", true)));
  CHECK(S.lub(pair("a", false), pair("c", true)) == pair("false", true));
  // hiding acts on the base only; diagonals carry susp
  CHECK(S.hide({"x"}, pair("d", true)) == pair("d", true));
  CHECK(S.diag({"x"}, {Term::var("y")}) == S.make_pair(L->diag({"x"}, {Term::var("y")}), false));
  CHECK(S.enumerate()->size() == 12);
  // hat embeds at susp
  CHECK(S.hat(L->element("c")) == pair("c", false));
  // parse round trip
  CHECK(S.parse_constraint("<c, nsusp>") == pair("c", true));
}

TEST_CASE("suspension transformations") {
  auto L = make_c6();
  SuspensionSystem S(L);
  Process P = Process::ask(L->element("a"), Process::tell(L->element("b")));
  // per-ask: when a^ do (tell(b^) || tell(<a, nsusp>))
  Process Ph = transform_for_suspension(P, S, SuspensionMode::PerAsk);
  REQUIRE(Ph.kind() == ProcKind::Abs);
  CHECK(Ph.constraint() == S.hat(L->element("a")));
  REQUIRE(Ph.body().kind() == ProcKind::Par);
  CHECK(Ph.body().children()[1].constraint() == S.make_pair(L->element("a"), true));
  // skip transforms to skip
  CHECK(transform_for_suspension(Process::skip(), S, SuspensionMode::PerAsk).kind() ==
        ProcKind::Skip);
  // joint detector over a parallel block of asks
  Process Q = Process::ask(L->element("c"), Process::tell(L->element("d")));
  Process R = transform_for_suspension(Process::par({P, Q}), S, SuspensionMode::JointDetector);
  REQUIRE(R.kind() == ProcKind::Par);
  REQUIRE(R.children().size() == 3);
  const Process& det = R.children()[2];
  CHECK(det.kind() == ProcKind::Abs);
  // guard a^ lub c^ = <lub(a,c), susp> = <false, susp> in the two-chain lattice
  CHECK(det.constraint() == S.make_pair(L->false_c(), false));
  CHECK(det.body().constraint() == S.make_pair(L->false_c(), true));
}

TEST_CASE("suspension semantics of the lattice examples") {
  auto L = make_c6();
  auto S = std::make_shared<SuspensionSystem>(L);
  auto elems = *S->enumerate();
  Process P = Process::ask(L->element("a"), Process::tell(L->element("b")));
  Process Q = Process::ask(L->element("c"), Process::tell(L->element("d")));
  Program empty;
  DenoteOptions opt;
  opt.k = 1;
  opt.check_stabilization = true;
  auto engine = make_denote_engine(empty, *S, opt);
  auto heads = [&](const Process& p) {
    std::set<std::string> out;
    for (const auto& e : elems)
      if (engine->member(ConstraintSeq({e}), p)) out.insert(e.str());
    return out;
  };

  Process Ph = transform_for_suspension(P, *S, SuspensionMode::PerAsk);
  Process Qh = transform_for_suspension(Q, *S, SuspensionMode::PerAsk);
  CHECK(heads(Ph) == std::set<std::string>{"<true, susp>", "<true, nsusp>", "<b, nsusp>",
                                           "<c, susp>", "<c, nsusp>", "<d, susp>",
                                           "<d, nsusp>", "<false, nsusp>"});
  CHECK(heads(Qh) == std::set<std::string>{"<true, susp>", "<true, nsusp>", "<a, susp>",
                                           "<a, nsusp>", "<b, susp>", "<b, nsusp>",
                                           "<d, nsusp>", "<false, nsusp>"});
  CHECK(heads(Process::par({Ph, Qh})) ==
        std::set<std::string>{"<true, susp>", "<true, nsusp>", "<b, nsusp>", "<d, nsusp>",
                              "<false, nsusp>"});

  // the joint detector: only false survives without suspending
  Process R = transform_for_suspension(Process::par({P, Q}), *S,
                                       SuspensionMode::JointDetector);
  CHECK(heads(R) == std::set<std::string>{"<true, susp>", "<true, nsusp>", "<b, susp>",
                                          "<b, nsusp>", "<d, susp>", "<d, nsusp>",
                                          "<false, nsusp>"});
}

TEST_CASE("domain registry specs") {
  DomainSpec s = parse_domain_spec("susp(finite(corpus/lattice6.json))");
  CHECK(s.kind == "susp");
  CHECK(s.arg == "finite(corpus/lattice6.json)");
  CHECK(parse_domain_spec("crypto").kind == "crypto");
  CHECK(parse_domain_spec("finite(x.json)").arg == "x.json");
  CHECK_THROWS_AS([] {
    ProgramSource src = parse_program_source("skip");
    DomainConfig cfg;
    Program bound;
    (void)make_domain(parse_domain_spec("nope"), src, cfg, &bound);
  }(), UsageError);
}
