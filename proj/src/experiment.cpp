#include "sdmsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace sdmsim {

namespace {

using nlohmann::json;

void read_spectrum(const json& j, SpectrumConfig& s) {
  if (j.contains("cores")) s.cores = j.at("cores").get<int>();
  if (j.contains("slots_per_core"))
    s.slots_per_core = j.at("slots_per_core").get<int>();
  if (j.contains("slot_bandwidth_ghz"))
    s.slot_bandwidth_ghz = j.at("slot_bandwidth_ghz").get<double>();
  if (j.contains("guard_slots")) s.guard_slots = j.at("guard_slots").get<int>();
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("topology")) cfg.topology_path = j.at("topology");
  if (j.contains("spectrum")) read_spectrum(j.at("spectrum"), cfg.spectrum);
  if (j.contains("loads_erlangs"))
    cfg.loads_erlangs = j.at("loads_erlangs").get<std::vector<double>>();
  if (j.contains("bandwidths_gbps"))
    cfg.bandwidths_gbps = j.at("bandwidths_gbps").get<std::vector<double>>();
  if (j.contains("total_requests"))
    cfg.total_requests = j.at("total_requests").get<int>();
  if (j.contains("warmup_requests"))
    cfg.warmup_requests = j.at("warmup_requests").get<int>();
  if (j.contains("policies")) {
    cfg.policies.clear();
    for (const auto& name : j.at("policies")) {
      auto p = parse_policy(name.get<std::string>());
      if (!p)
        throw std::invalid_argument("unknown policy: " +
                                    name.get<std::string>());
      cfg.policies.push_back(*p);
    }
  }
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("lb_alpha")) cfg.lb_alpha = j.at("lb_alpha").get<double>();
  if (j.contains("lb_update_interval"))
    cfg.lb_update_interval = j.at("lb_update_interval").get<int>();
  if (j.contains("repetitions"))
    cfg.repetitions = j.at("repetitions").get<int>();
  if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir");
  if (j.contains("use_cache")) cfg.use_cache = j.at("use_cache").get<bool>();
  if (j.contains("tau")) {
    std::string t = j.at("tau");
    if (t == "from_warmup_end")
      cfg.tau = TauConvention::FromWarmupEnd;
    else if (t == "from_zero")
      cfg.tau = TauConvention::FromZero;
    else
      throw std::invalid_argument("unknown tau convention: " + t);
  }
  if (j.contains("nru_denominator")) {
    std::string t = j.at("nru_denominator");
    if (t == "directed")
      cfg.nru_denom = NruDenominator::DirectedLinks;
    else if (t == "undirected")
      cfg.nru_denom = NruDenominator::UndirectedLinks;
    else
      throw std::invalid_argument("unknown nru denominator: " + t);
  }
  if (j.contains("modulation")) {
    std::vector<ModulationEntry> entries;
    for (const auto& e : j.at("modulation"))
      entries.push_back({e.at("name").get<std::string>(),
                         e.at("bits_per_symbol").get<int>(),
                         e.at("rate_gbps").get<double>(),
                         e.at("max_reach_km").get<double>()});
    cfg.modulation_override = std::move(entries);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& m) { problems.push_back(m); };
  auto warn = [&](const std::string& m) { problems.push_back("warning: " + m); };

  if (cfg.topology_path.empty()) {
    fail("topology path is empty");
  } else if (!std::filesystem::exists(cfg.topology_path)) {
    fail("topology file not found: " + cfg.topology_path);
  }
  if (cfg.spectrum.cores < 1) fail("cores must be >= 1");
  if (cfg.spectrum.slots_per_core < 1) fail("slots_per_core must be >= 1");
  if (cfg.spectrum.slot_bandwidth_ghz <= 0)
    fail("slot_bandwidth_ghz must be positive");
  if (cfg.spectrum.guard_slots < 0) fail("guard_slots must be >= 0");
  if (cfg.loads_erlangs.empty()) fail("loads_erlangs is empty");
  for (double l : cfg.loads_erlangs)
    if (l <= 0) fail("loads must be positive, got " + fmt_double(l));
  if (cfg.bandwidths_gbps.empty()) fail("bandwidths_gbps is empty");
  for (double b : cfg.bandwidths_gbps)
    if (b <= 0) fail("bandwidths must be positive, got " + fmt_double(b));
  if (cfg.total_requests < 1) fail("total_requests must be >= 1");
  if (cfg.warmup_requests < 0) fail("warmup_requests must be >= 0");
  if (cfg.warmup_requests >= cfg.total_requests)
    fail("warmup_requests must be below total_requests");
  if (cfg.policies.empty()) fail("policies is empty");
  if (cfg.k < 1) fail("k must be >= 1");
  if (cfg.k == 1)
    for (Policy p : cfg.policies)
      if (p == Policy::CALA || p == Policy::KSP || p == Policy::KDP)
        warn(std::string(policy_name(p)) +
             " with k = 1 degenerates to the plain shortest path");
  if (cfg.lb_alpha < 0 || cfg.lb_alpha > 1) fail("lb_alpha must be in [0, 1]");
  if (cfg.lb_update_interval < 1) fail("lb_update_interval must be >= 1");
  if (cfg.repetitions < 1) fail("repetitions must be >= 1");
  if (cfg.repetitions > 31)
    fail("repetitions above 31 exceed the confidence table");
  if (cfg.repetitions == 1)
    warn("single repetition: confidence intervals are zero-width");
  if (cfg.total_requests - cfg.warmup_requests < 1000)
    warn("fewer than 1000 counted requests per run");
  if (cfg.modulation_override && cfg.modulation_override->empty())
    fail("modulation override is empty");
  return problems;
}

bool CellFilter::matches(Policy p, double l, int r) const {
  if (policy && *policy != p) return false;
  if (load && std::abs(*load - l) > 1e-9 * std::max(1.0, std::abs(l)))
    return false;
  if (rep && *rep != r) return false;
  return true;
}

uint64_t cell_seed(uint64_t base_seed, double load_erlangs, int rep) {
  uint64_t bits;
  static_assert(sizeof bits == sizeof load_erlangs);
  std::memcpy(&bits, &load_erlangs, sizeof bits);
  uint64_t s = base_seed;
  uint64_t mixed = splitmix64(s) ^ bits;
  return derive_seed(mixed, static_cast<uint64_t>(rep));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const Topology& topo, const CellFilter& filter,
                                int workers, std::ostream* log) {
  struct Cell {
    Policy policy;
    double load;
    int rep;
  };
  std::vector<Cell> cells;
  for (Policy p : cfg.policies)
    for (double l : cfg.loads_erlangs)
      for (int r = 0; r < cfg.repetitions; ++r)
        if (filter.matches(p, l, r)) cells.push_back({p, l, r});

  ModulationTable table = cfg.modulation_override
                              ? ModulationTable(*cfg.modulation_override)
                              : ModulationTable::default_table();

  std::vector<RunReport> runs(cells.size());
  if (workers < 1) workers = 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
#endif
  for (size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    RunInputs in;
    in.topology = &topo;
    in.spectrum = cfg.spectrum;
    in.traffic.load_erlangs = c.load;
    in.traffic.bandwidths_gbps = cfg.bandwidths_gbps;
    in.traffic.total_requests = cfg.total_requests;
    in.traffic.warmup_requests = cfg.warmup_requests;
    in.traffic.seed = cell_seed(cfg.base_seed, c.load, c.rep);
    in.policy.policy = c.policy;
    in.policy.k = cfg.k;
    in.policy.lb_alpha = cfg.lb_alpha;
    in.policy.lb_update_interval = cfg.lb_update_interval;
    in.options.use_cache = cfg.use_cache;
    in.options.tau = cfg.tau;
    in.options.nru_denom = cfg.nru_denom;
    in.options.modulation = table;
    runs[i] = run_simulation(in);
    runs[i].repetition = c.rep;
    if (log) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "cell %s load=%g rep=%d: rbp=%.5f nru=%.4f\n",
                    runs[i].policy.c_str(), c.load, c.rep, runs[i].rbp,
                    runs[i].nru);
#ifdef _OPENMP
#pragma omp critical
#endif
      (*log) << line << std::flush;
    }
  }

  auto policy_rank = [&](const std::string& name) {
    for (size_t i = 0; i < cfg.policies.size(); ++i)
      if (name == policy_name(cfg.policies[i])) return i;
    return cfg.policies.size();
  };
  std::sort(runs.begin(), runs.end(),
            [&](const RunReport& a, const RunReport& b) {
              auto ka = std::tuple(policy_rank(a.policy), a.load_erlangs,
                                   a.repetition);
              auto kb = std::tuple(policy_rank(b.policy), b.load_erlangs,
                                   b.repetition);
              return ka < kb;
            });

  ExperimentResult res;
  res.runs = std::move(runs);
  for (size_t i = 0; i < res.runs.size();) {
    size_t j = i;
    while (j < res.runs.size() && res.runs[j].policy == res.runs[i].policy &&
           res.runs[j].load_erlangs == res.runs[i].load_erlangs)
      ++j;
    res.summary.push_back(
        aggregate({res.runs.data() + i, j - i}));
    i = j;
  }
  return res;
}

void write_summary_csv(std::ostream& os,
                       const std::vector<AggregateReport>& summary) {
  os << "policy,load_erlangs,rbp_mean,rbp_ci,bbp_mean,bbp_ci,nru_mean,nru_ci,"
        "asl_us_mean,asl_us_ci,ahl_mean,ahl_ci,cache_hit_rate\n";
  for (const AggregateReport& a : summary) {
    char row[512];
    std::snprintf(row, sizeof row,
                  "%s,%.10g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,"
                  "%.8g,%.8g\n",
                  a.policy.c_str(), a.load_erlangs, a.rbp.mean,
                  a.rbp.ci_half_width, a.bbp.mean, a.bbp.ci_half_width,
                  a.nru.mean, a.nru.ci_half_width, a.asl_us.mean,
                  a.asl_us.ci_half_width, a.ahl.mean, a.ahl.ci_half_width,
                  a.cache_hit_rate);
    os << row;
  }
}

void write_runs_jsonl(std::ostream& os, const std::vector<RunReport>& runs) {
  for (const RunReport& r : runs) os << r.to_json() << '\n';
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::ofstream csv(fs::path(cfg.output_dir) / "summary.csv");
  if (!csv) throw std::runtime_error("cannot write summary.csv");
  write_summary_csv(csv, res.summary);
  std::ofstream jsonl(fs::path(cfg.output_dir) / "runs.jsonl");
  if (!jsonl) throw std::runtime_error("cannot write runs.jsonl");
  write_runs_jsonl(jsonl, res.runs);
}

}  // namespace sdmsim
