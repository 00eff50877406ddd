#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sdmsim/experiment.hpp"

namespace {

using namespace sdmsim;

int cmd_validate(const std::string& config_path) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  std::vector<std::string> problems = validate_config(cfg);
  bool blocking = false;
  for (const std::string& p : problems) {
    std::cerr << p << "\n";
    if (p.rfind("warning:", 0) != 0) blocking = true;
  }
  if (blocking) return 1;
  std::vector<std::string> warnings;
  Topology topo = Topology::load_json_file(cfg.topology_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "config ok: " << topo.name() << ", " << topo.node_count()
            << " nodes, " << topo.link_count() << " links, "
            << cfg.policies.size() << " policies, " << cfg.loads_erlangs.size()
            << " loads, " << cfg.repetitions << " repetitions\n";
  return 0;
}

int cmd_topo_info(const std::string& path) {
  std::vector<std::string> warnings;
  Topology topo = Topology::load_json_file(path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  TopologyMetrics m = compute_lbc(topo);
  std::printf("name:            %s\n", topo.name().c_str());
  std::printf("nodes:           %d\n", topo.node_count());
  std::printf("links:           %d\n", topo.link_count());
  std::printf("avg degree:      %.4f\n", m.d_avg);
  std::printf("avg length (km): %.2f\n", m.l_avg_km);
  std::printf("link-load sigma: %.4f\n", m.sigma_lbc);
  return 0;
}

int cmd_stream(const std::string& topo_path, double load, uint64_t seed,
               int count) {
  Topology topo = Topology::load_json_file(topo_path);
  TrafficConfig tc;
  tc.load_erlangs = load;
  tc.seed = seed;
  tc.total_requests = count;
  tc.warmup_requests = 0;
  write_stream(std::cout, generate_request_stream(topo, tc));
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& output_dir,
            int workers, bool verbose, const std::string& cell) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;

  std::vector<std::string> problems = validate_config(cfg);
  bool blocking = false;
  for (const std::string& p : problems) {
    std::cerr << p << "\n";
    if (p.rfind("warning:", 0) != 0) blocking = true;
  }
  if (blocking) return 1;

  CellFilter filter;
  if (!cell.empty()) {
    std::istringstream ss(cell);
    std::string pol, load_s, rep_s;
    if (!std::getline(ss, pol, ',') || !std::getline(ss, load_s, ',') ||
        !std::getline(ss, rep_s)) {
      std::cerr << "cell filter must be policy,load,rep\n";
      return 1;
    }
    auto p = parse_policy(pol);
    if (!p) {
      std::cerr << "unknown policy in cell filter: " << pol << "\n";
      return 1;
    }
    filter.policy = *p;
    filter.load = std::stod(load_s);
    filter.rep = std::stoi(rep_s);
  }

  std::vector<std::string> warnings;
  Topology topo = Topology::load_json_file(cfg.topology_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  ExperimentResult res = run_experiment(cfg, topo, filter, workers,
                                        verbose ? &std::cerr : nullptr);
  if (res.runs.empty()) {
    std::cerr << "no cells matched\n";
    return 1;
  }
  write_outputs(cfg, res);
  write_summary_csv(std::cout, res.summary);
  std::cerr << res.runs.size() << " runs written to " << cfg.output_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-traffic simulator for multi-core elastic optical "
               "networks"};
  app.require_subcommand(1);

  std::string config_path, output_dir, cell, topo_path;
  int workers = 1;
  bool verbose = false;
  double load = 100.0;
  uint64_t seed = 1;
  int count = 20;

  CLI::App* run = app.add_subcommand("run", "Run a sweep from a config file");
  run->add_option("-c,--config", config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", output_dir,
                  "Override the config's output directory");
  run->add_option("-w,--workers", workers, "Parallel cells")
      ->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbose, "Log each finished cell");
  run->add_option("--cell", cell,
                  "Run a single policy,load,rep cell (e.g. CALA,2000,0)");

  CLI::App* validate =
      app.add_subcommand("validate", "Check a config file and its topology");
  validate->add_option("-c,--config", config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* info = app.add_subcommand("topo-info", "Topology facts");
  info->add_option("topology", topo_path, "Topology JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* stream =
      app.add_subcommand("stream", "Print a sample request stream");
  stream->add_option("topology", topo_path, "Topology JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  stream->add_option("--load", load, "Offered load in Erlangs");
  stream->add_option("--seed", seed, "Stream seed");
  stream->add_option("-n,--count", count, "Requests to print")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, output_dir, workers, verbose, cell);
    if (*validate) return cmd_validate(config_path);
    if (*info) return cmd_topo_info(topo_path);
    if (*stream) return cmd_stream(topo_path, load, seed, count);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
