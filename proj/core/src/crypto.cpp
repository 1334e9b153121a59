#include "utcc/crypto.hpp"

namespace utcc {

std::size_t message_length(const Term& t) {
  if (t.is_var()) return 0;
  if (t.sym() == "mtop") return 1u << 20;  // longer than any kappa in use
  if (t.sym() == "enc" || t.sym() == "pair")
    return 1 + message_length(t.args()[0]) + message_length(t.args()[1]);
  if (t.sym() == "pub" || t.sym() == "priv") return message_length(t.args()[0]);
  return 0;  // constants
}

Term m_top() { return Term::app("mtop"); }

Term cut_term(const Term& t, std::size_t kappa) {
  return message_length(t) <= kappa ? t : m_top();
}

Signature crypto_signature(const std::vector<std::string>& principals) {
  Signature sig;
  for (const auto& p : principals) sig.constants.insert(p);
  sig.functions = {{"enc", 2}, {"pair", 2}, {"pub", 1}, {"priv", 1}};
  sig.predicates = {{"out", 1}, {"secret", 1}};
  return sig;
}

CryptoDomain make_crypto_domain(std::size_t kappa,
                                const std::vector<std::string>& principals,
                                const std::vector<std::string>& pool,
                                const TermVec& universe_seeds) {
  CryptoDomain dom;
  dom.kappa = kappa;

  Signature sig = crypto_signature(principals);
  TermUniverse tu;
  tu.add_all(universe_seeds);
  for (const auto& p : principals) {
    tu.add(Term::app(p));
    tu.add(Term::app("pub", {Term::app(p)}));
    tu.add(Term::app("priv", {Term::app(p)}));
  }
  for (const auto& v : pool) tu.add(Term::var(v));

  dom.concrete = std::make_shared<EquationSystem>("crypto", sig, pool, tu);

  Signature asig = sig;
  asig.constants.insert("mtop");
  TermUniverse atu = tu;
  atu.add(m_top());
  dom.abstr = std::make_shared<EquationSystem>(
      "crypto_cut" + std::to_string(kappa), asig, pool, atu,
      std::make_shared<CutPolicy>(kappa));

  EquationSystem* conc = dom.concrete.get();
  EquationSystem* abst = dom.abstr.get();
  std::size_t k = kappa;

  dom.desc.name = "crypto(kappa=" + std::to_string(kappa) + ")";
  dom.desc.concrete = conc;
  dom.desc.abstr = abst;
  // alpha = alpha_kappa after the solved form; import re-solves under the
  // cut policy.
  dom.desc.alpha = [abst](const Constraint& c) { return abst->import(c); };
  // d_a |~ c: sound only when c lies entirely below the cut and the
  // abstract entailment can be established without touching m_top.
  dom.desc.abs_entails_conc = [conc, abst, k](const Constraint& da, const Constraint& c) {
    const FormulaData& p = conc->payload(c);
    if (p.is_false) return abst->is_false(da);
    for (const auto& [x, t] : p.eqs) {
      (void)x;
      if (message_length(t) > k) return false;
    }
    for (const auto& a : p.preds)
      for (const auto& t : a.args)
        if (message_length(t) > k) return false;
    return abst->entails_strict(da, abst->import(c));
  };
  return dom;
}

}  // namespace utcc
