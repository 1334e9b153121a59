#pragma once

/*
 * Descriptions (C, alpha, A) connecting a concrete and an abstract
 * constraint system: the abstraction map, the sound abstract-to-concrete
 * entailment used to guard asks, upper-correctness checking, and the
 * k-sequence cut.
 */

#include <functional>
#include <string>
#include <vector>

#include "utcc/seqset.hpp"

namespace utcc {

struct Description {
  std::string name;
  const ConstraintSystem* concrete = nullptr;
  const ConstraintSystem* abstr = nullptr;
  // Monotone map onto the abstract system.
  std::function<Constraint(const Constraint&)> alpha;
  // Sound decision of d_alpha |~ c (Def. of the abstract-to-concrete
  // entailment): yes only when every concrete constraint approximated by
  // d_alpha entails c. Conservative "no" answers are always safe.
  std::function<bool(const Constraint&, const Constraint&)> abs_entails_conc;
};

// Identity description over a system (alpha = id, |~ = entailment).
Description identity_description(const ConstraintSystem* sys);

ConstraintSeq alpha_seq(const Description& d, const ConstraintSeq& s);

// k-sequence abstraction (a Galois connection): truncation and its
// adjoint padding with true.
ConstraintSeq k_cut(const ConstraintSeq& s, std::size_t k);
ConstraintSeq gamma_k(const ConstraintSeq& s, std::size_t n);

struct DescriptionReport {
  bool ok = true;
  std::size_t checked_hide = 0;
  std::size_t checked_diag = 0;
  std::size_t checked_monotone = 0;
  std::size_t checked_entail = 0;
  std::vector<std::string> failures;

  void fail(const std::string& msg) {
    ok = false;
    if (failures.size() < 50) failures.push_back(msg);
  }
};

// Verifies upper correctness (conditions (1) and (2)) over the given
// concrete sample constraints and the system pools, plus monotonicity of
// alpha and soundness spot-checks of abs_entails_conc against the sample
// set. The samples play the role of the bounded universe: for finite
// carriers pass the full enumeration.
DescriptionReport check_description(const Description& d,
                                    const std::vector<Constraint>& concrete_samples,
                                    const std::vector<Constraint>& entail_goals,
                                    std::size_t max_hide_vars = 4);

}  // namespace utcc
