#pragma once

/*
 * Structural operational semantics: internal transitions, observable
 * time-unit transitions (with the future function F), input-output runs
 * and quiescence testing.
 *
 * The scheduler is deterministic (leftmost enabled redex by default);
 * confluence of the internal relation makes the observable behavior
 * schedule-independent, which the test suite exercises by permuting the
 * exploration order of parallel compositions.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "utcc/ast.hpp"
#include "utcc/seqset.hpp"

namespace utcc {

struct Configuration {
  std::vector<std::string> locals;
  Process process;
  Constraint store;
};

struct Scheduler {
  enum class Mode { Leftmost, Rightmost, Seeded };
  Mode mode = Mode::Leftmost;
  std::uint64_t seed = 0;
};

struct TraceEntry {
  std::string rule;
  std::vector<std::string> locals;
  std::string store;
};

struct SosContext {
  const Program* program = nullptr;
  Scheduler scheduler;
  FreshNames names;
  std::vector<TraceEntry>* trace = nullptr;
  std::uint64_t step_counter = 0;
  // When positive, local binders opened in this unit are named
  // binder'offset (matching the denotational instance names) instead of
  // drawing fresh counters; io_run sets it to the unit index.
  std::size_t unit_offset = 0;
};

struct TimeStepResult {
  Constraint output;      // exists locals (store)
  Constraint raw_store;   // the quiescent store with locals still open
  Process residual;       // local locals (F(Q))
  std::size_t steps_used = 0;
  bool terminated = true;  // false: budget exhausted before quiescence
};

// Raised by io_run when a unit exhausts its step budget.
struct BudgetExhausted : std::runtime_error {
  std::size_t unit;
  explicit BudgetExhausted(std::size_t unit_)
      : std::runtime_error("step budget exhausted in time unit " + std::to_string(unit_ + 1)),
        unit(unit_) {}
};

// One internal transition under the context's scheduler, or nullopt when
// the configuration is quiescent.
std::optional<Configuration> internal_step(const Configuration& g, SosContext& ctx);

// The future function F of the observable rule: erases abstractions,
// unfolds next and unless.
Process future(const Process& p);

TimeStepResult run_time_unit(const Process& p, const Constraint& input, std::size_t budget,
                             SosContext& ctx);

// Folds run_time_unit over the inputs, feeding residuals forward. When
// raw_outputs is non-null it receives the per-unit stores before local
// hiding (the open-scope view used by analyses).
std::vector<Constraint> io_run(const Process& p, const std::vector<Constraint>& inputs,
                               std::size_t budget, SosContext& ctx,
                               std::vector<Constraint>* raw_outputs = nullptr);

// (s, s) in io(P): the output equals the input element-wise.
bool is_quiescent(const Process& p, const std::vector<Constraint>& inputs, std::size_t budget,
                  SosContext& ctx);

// All length-k sequences over `elements` on which p is quiescent
// (strongest-postcondition enumeration for finite carriers).
std::set<ConstraintSeq> sp_enumerate(const Process& p, std::size_t k,
                                     const std::vector<Constraint>& elements,
                                     std::size_t budget, SosContext& ctx);

}  // namespace utcc
