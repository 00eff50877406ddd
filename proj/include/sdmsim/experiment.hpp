#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdmsim/engine.hpp"

namespace sdmsim {

// Full sweep description, loadable from a JSON config file.
struct ExperimentConfig {
  std::string topology_path;
  SpectrumConfig spectrum;
  std::vector<double> loads_erlangs;
  std::vector<double> bandwidths_gbps = {25, 50, 75, 100, 125, 150};
  int total_requests = 100000;
  int warmup_requests = 10000;
  std::vector<Policy> policies = {Policy::SP, Policy::KSP, Policy::KDP,
                                  Policy::LB, Policy::CALA};
  int k = 3;
  double lb_alpha = 0.5;
  int lb_update_interval = 1500;
  int repetitions = 10;
  uint64_t base_seed = 1;
  std::string output_dir = "out";
  bool use_cache = true;
  TauConvention tau = TauConvention::FromWarmupEnd;
  NruDenominator nru_denom = NruDenominator::DirectedLinks;
  std::optional<std::vector<ModulationEntry>> modulation_override;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

// Human-readable problems; empty means runnable. Lines starting with
// "warning:" do not block execution.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Restricts a sweep to one (policy, load, rep) cell for debugging.
struct CellFilter {
  std::optional<Policy> policy;
  std::optional<double> load;
  std::optional<int> rep;

  bool matches(Policy p, double l, int r) const;
};

struct ExperimentResult {
  std::vector<RunReport> runs;          // sorted by (policy, load, rep)
  std::vector<AggregateReport> summary; // sorted by (policy, load)
};

// Runs every (policy, load, rep) cell that passes the filter. The request
// stream of a cell is seeded from (base_seed, load, rep) only, so every
// policy faces identical traffic. Cells run in parallel up to `workers`;
// each owns its state, so results are independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const Topology& topo,
                                const CellFilter& filter = {}, int workers = 1,
                                std::ostream* log = nullptr);

uint64_t cell_seed(uint64_t base_seed, double load_erlangs, int rep);

// summary.csv: one header plus one row per (policy, load).
void write_summary_csv(std::ostream& os,
                       const std::vector<AggregateReport>& summary);
// runs.jsonl: one JSON record per run.
void write_runs_jsonl(std::ostream& os, const std::vector<RunReport>& runs);

// Writes both files into cfg.output_dir (created if missing).
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res);

}  // namespace sdmsim
