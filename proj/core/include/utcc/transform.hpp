#pragma once

/*
 * Program transformations for the suspension analysis: lifting a program
 * into S(C) with hatted constraints, and the two detector insertions that
 * scatter non-suspension information through asks.
 */

#include "utcc/ast.hpp"
#include "utcc/suspension.hpp"

namespace utcc {

enum class SuspensionMode {
  PerAsk,         // when c do Q  ~>  when c^ do (Q^ || tell(<c, nsusp>))
  JointDetector,  // hatted block plus one detector ask over the block
  HatOnly,        // constraints hatted, no detector tells
};

// Lifts every constraint of p into S(C) via hat.
Process hat_process(const Process& p, const SuspensionSystem& S);

Process transform_for_suspension(const Process& p, const SuspensionSystem& S,
                                 SuspensionMode mode);

// Transforms every declaration body and the main process. When `only` is
// non-empty, detectors are inserted only inside the listed declarations
// ("main" for the main process); everything else is hatted without
// detectors, matching the paper's selective instrumentation.
Program transform_program_for_suspension(const Program& prog, const SuspensionSystem& S,
                                         SuspensionMode mode,
                                         const std::set<std::string>& only = {});

}  // namespace utcc
