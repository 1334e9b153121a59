#pragma once

/*
 * The analysis front end shared by the CLI and the test suites: loads a
 * program and a domain, runs simulation or concrete/abstract analysis,
 * evaluates verdict queries over the computed semantics, and renders
 * reports.
 */

#include <string>
#include <vector>

#include "utcc/denot.hpp"
#include "utcc/domains.hpp"
#include "utcc/sos.hpp"
#include "utcc/transform.hpp"

namespace utcc {

struct AnalysisConfig {
  std::string program_path;
  std::string program_source;  // used when program_path is empty
  std::string mode = "simulate";
  std::string domain = "herbrand";
  std::size_t kappa = 3;
  std::size_t k = 2;
  std::size_t budget = 20000;
  std::vector<std::string> inputs;  // constraint texts for simulate
  std::string query_path;
  std::string query_json;
  std::string susp_transform = "per-ask";  // per-ask | joint | hat
  std::vector<std::string> susp_only;      // insert detectors only here
  std::vector<std::string> pool;
  std::vector<std::string> universe_terms;
  std::size_t universe_depth = 0;
  std::size_t pos_pool_cap = 16;
  int threads = 1;
  bool trace = false;
  bool check_stabilization = false;
};

struct QueryVerdict {
  std::string name;
  bool holds = false;
  bool violating = false;  // a query whose holding is a violation
  std::string detail;
  std::vector<std::string> witness;  // sequence, for exists verdicts

  bool is_violation() const { return violating ? holds : !holds; }
};

struct Report {
  std::string mode;
  std::string domain;
  bool error = false;
  std::string error_message;
  std::vector<QueryVerdict> verdicts;
  std::vector<std::string> outputs;       // simulate outputs / messages
  std::vector<std::string> trace_lines;
  std::string digest;                     // canonical JSON of explicit sets
  double seconds = 0.0;

  bool any_violation() const;
  int exit_code() const;  // 0 all hold, 1 violation, 2 error
  std::string to_json() const;
  std::string summary() const;
};

Report run_analysis(const AnalysisConfig& cfg);

// Query evaluation over a semantics given as a membership factory (a fresh
// independent evaluator per worker thread). Exposed for the test suites.
struct QuerySpace {
  std::size_t k = 2;
  const ConstraintSystem* target = nullptr;
  const ConstraintSystem* concrete = nullptr;  // for tilde conditions
  const Description* desc = nullptr;
  std::vector<Constraint> elements;  // probe elements
  // When non-empty, forall/exists queries range over exactly these
  // sequences (already verified members) instead of enumerating elements.
  std::vector<ConstraintSeq> fixed_members;
  // Factory for membership predicates (one per worker).
  std::function<std::function<bool(const ConstraintSeq&)>()> make_membership;
  int threads = 1;
};

std::vector<QueryVerdict> eval_queries(const QuerySpace& space, const std::string& query_json);

// Probe elements: all lubs of subsets of the generators, plus true and
// false. Deduplicated by canonical key.
std::vector<Constraint> probe_elements(const ConstraintSystem& sys,
                                       const std::vector<std::string>& generator_texts);

}  // namespace utcc
