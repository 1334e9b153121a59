#pragma once

/*
 * The domain registry behind the CLI: builds constraint systems and
 * descriptions by name, seeding bounded term universes from the program
 * under analysis.
 *
 *   finite(<file>)  explicit lattice from JSON
 *   herbrand        equation system over the program's signature
 *   crypto          depth-kappa cut of the cryptographic system
 *   pos             groundness only
 *   postype         groundness with type dependencies (reduced product)
 *   susp(<base>)    suspension lift of a base domain
 */

#include <memory>
#include <optional>

#include "utcc/crypto.hpp"
#include "utcc/description.hpp"
#include "utcc/finite_lattice.hpp"
#include "utcc/groundness.hpp"
#include "utcc/parser.hpp"
#include "utcc/suspension.hpp"

namespace utcc {

struct DomainSpec {
  std::string kind;
  std::string arg;  // lattice file, or the base spec of susp(...)
};

DomainSpec parse_domain_spec(const std::string& text);

struct DomainConfig {
  std::size_t k = 2;
  std::size_t kappa = 3;
  std::vector<std::string> extra_pool;
  TermVec extra_universe;            // parsed against the concrete signature
  std::vector<std::string> extra_universe_texts;
  std::size_t pos_pool_cap = 16;
  std::size_t universe_depth = 0;    // generate terms up to this depth too
};

struct DomainBundle {
  std::vector<std::shared_ptr<ConstraintSystem>> owned;
  // Programs are parsed over the concrete side; analyses run over the
  // target side (equal in concrete modes).
  ConstraintSystem* program_system = nullptr;
  ConstraintSystem* target_system = nullptr;
  std::optional<Description> desc;
  bool is_suspension = false;
  SuspensionSystem* susp = nullptr;            // the target, when suspension
  SuspensionSystem* susp_concrete = nullptr;   // concrete S(base)
};

// Builds the domain for a parsed program. The bound program is produced as
// a side effect (it must be bound over the concrete system, and the
// system's universe is then seeded from it).
DomainBundle make_domain(const DomainSpec& spec, const ProgramSource& src,
                         const DomainConfig& cfg, Program* bound_out);

// The (C, hat, S(C)) description used to exercise abstraction soundness
// over a base system.
Description hat_description(const ConstraintSystem* base, const SuspensionSystem* susp);

// Universe seeds from a bound program: constraint terms reachable from
// main (calls unfolded once per instance), with local binders renamed per
// time offset and abstraction binders instantiated over the candidate
// terms (pool variables and constants).
TermVec universe_seeds_from_program(const Program& prog, std::size_t k,
                                    const TermVec& instantiation_candidates);

}  // namespace utcc
