// Command-line front end: loads a .utcc program and a domain, runs
// simulation or concrete/abstract analysis, evaluates verdict queries and
// emits a report (JSON and a human-readable summary).

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "utcc/analysis.hpp"

int main(int argc, char** argv) {
  CLI::App app{"utcc/tccp interpreter and abstract-interpretation analyzer"};

  utcc::AnalysisConfig cfg;
  std::string json_out;

  app.add_option("program", cfg.program_path, "program file (.utcc)")->required();
  app.add_option("--mode", cfg.mode,
                 "simulate | sp | concrete-denote | abstract-denote | secrecy | groundness | "
                 "suspension")
      ->required();
  app.add_option("--domain", cfg.domain,
                 "finite(<file>) | herbrand | crypto | pos | postype | susp(<base>)");
  app.add_option("--kappa", cfg.kappa, "message-length cut for the crypto domain");
  app.add_option("--k", cfg.k, "sequence cut length");
  app.add_option("--budget", cfg.budget, "internal-step budget per time unit");
  app.add_option("--query", cfg.query_path, "JSON query file");
  app.add_option("--inputs", cfg.inputs, "input constraints for simulate, one per unit");
  app.add_option("--pool", cfg.pool, "extra pool variables");
  app.add_option("--universe-term", cfg.universe_terms,
                 "extra probe terms added to the term universe");
  app.add_option("--universe-depth", cfg.universe_depth,
                 "generate all terms up to this depth into the universe");
  app.add_option("--pos-pool-cap", cfg.pos_pool_cap, "variable cap for Pos truth tables");
  app.add_option("--susp-transform", cfg.susp_transform, "per-ask | joint | hat");
  app.add_option("--susp-only", cfg.susp_only,
                 "declarations that receive suspension detectors (default: all)");
  app.add_option("--threads", cfg.threads, "worker threads for membership queries");
  app.add_option("--json", json_out, "write the JSON report to this file");
  app.add_flag("--trace", cfg.trace, "dump one line per internal step (simulate)");
  app.add_flag("--check-stabilization", cfg.check_stabilization,
               "assert the fixpoint stabilization bound on every membership");

  CLI11_PARSE(app, argc, argv);

  utcc::Report report = utcc::run_analysis(cfg);
  std::cout << report.summary();
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << report.to_json() << "\n";
  }
  return report.exit_code();
}
