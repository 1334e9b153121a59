#pragma once

/*
 * The cryptographic constraint system (messages over enc/pair/pub/priv
 * with out and secret predicates) and its depth-kappa abstraction: every
 * message longer than kappa collapses to the absorbing m_top, bounding
 * the state space a Dolev-Yao attacker can generate.
 */

#include <memory>

#include "utcc/description.hpp"
#include "utcc/formula.hpp"

namespace utcc {

// lg: 0 on constants and variables, 1 + lg(m1) + lg(m2) on enc and pair.
// Key constructors are transparent: lg(pub(t)) = lg(priv(t)) = lg(t).
std::size_t message_length(const Term& t);

Term cut_term(const Term& t, std::size_t kappa);
Term m_top();

// Term policy of the abstract system: normalization cuts at kappa, m_top
// absorbs conflicting equations at the cut boundary.
struct CutPolicy : TermPolicy {
  std::size_t kappa;
  explicit CutPolicy(std::size_t k) : kappa(k) {}
  Term normalize(const Term& t) const override { return cut_term(t, kappa); }
  bool absorbing(const Term& t) const override {
    return !t.is_var() && t.sym() == "mtop" && t.args().empty();
  }
};

Signature crypto_signature(const std::vector<std::string>& principals);

struct CryptoDomain {
  std::shared_ptr<EquationSystem> concrete;
  std::shared_ptr<EquationSystem> abstr;
  Description desc;
  std::size_t kappa;
};

// Builds the concrete and cut systems over the given principals and
// variable pool; the term universe is seeded with `universe_seeds` (closed
// under subterms). alpha is the solved form followed by the kappa cut;
// the certified entailment refuses any judgment that would rest on m_top.
CryptoDomain make_crypto_domain(std::size_t kappa, const std::vector<std::string>& principals,
                                const std::vector<std::string>& pool,
                                const TermVec& universe_seeds);

}  // namespace utcc
