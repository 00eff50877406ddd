#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdmsim/metrics.hpp"
#include "sdmsim/modulation.hpp"
#include "sdmsim/routing.hpp"
#include "sdmsim/spectrum.hpp"
#include "sdmsim/traffic.hpp"

namespace sdmsim {

enum class Policy { SP, KSP, KDP, LB, CALA };

const char* policy_name(Policy p);
std::optional<Policy> parse_policy(const std::string& name);

struct PolicyConfig {
  Policy policy = Policy::CALA;
  int k = 3;                     // candidate budget for KSP/KDP/CALA
  double lb_alpha = 0.5;         // length weight in the balanced metric
  int lb_update_interval = 1500; // requests between weight snapshots
};

struct Decision {
  bool accepted = false;
  int candidate_index = 0;  // 1-based k of the accepted candidate
  Path path;
  std::string modulation;
  int bits_per_symbol = 0;
  int core = -1;
  int start_slot = -1;
  int data_slots = 0;
  double latency_s = 0.0;  // wall-clock route+modulation+spectrum time
};

enum class TauConvention { FromWarmupEnd, FromZero };
enum class NruDenominator { DirectedLinks, UndirectedLinks };

struct RunOptions {
  bool use_cache = true;
  bool validate_state = false;  // full invariant check after every event
  TauConvention tau = TauConvention::FromWarmupEnd;
  NruDenominator nru_denom = NruDenominator::DirectedLinks;
  ModulationTable modulation = ModulationTable::default_table();
  // Test hooks; both may be empty.
  std::function<void(const Request&, const Decision&)> on_decision;
  std::function<void(double now, const NetworkState&)> after_event;
};

// Per-run policy executor: owns the route memos and the balanced-weight
// snapshot. serve() routes one request against the live state and, on
// acceptance, allocates spectrum. Latency covers the full serve computation.
class Rmcsa {
 public:
  Rmcsa(const Topology& t, const SpectrumConfig& scfg, const PolicyConfig& pcfg,
        const RunOptions& opts);

  // Routes one request, allocating on acceptance (lightpath id = r.id,
  // expiry = arrival + holding). Refreshes load-balanced weights when due.
  Decision serve(const Request& r, NetworkState& state, bool counted = true);

  const PathCache& cache() const { return cache_; }
  PathCache& cache() { return cache_; }
  // Route-memo counters across the exclusion-keyed cache and the K-path memo.
  int64_t cache_hits() const { return cache_.hits() + ksp_hits_; }
  int64_t cache_misses() const { return cache_.misses() + ksp_misses_; }
  void reset_cache_counters();
  std::span<const double> lb_weights() const { return lb_weights_; }
  void refresh_lb_weights(const NetworkState& state);

 private:
  const Topology& topo_;
  SpectrumConfig scfg_;
  PolicyConfig pcfg_;
  ModulationTable table_;
  PathCache cache_;
  std::unordered_map<int64_t, std::vector<Path>> ksp_memo_;
  int64_t ksp_hits_ = 0;
  int64_t ksp_misses_ = 0;
  std::vector<double> lb_weights_;  // per-link balanced weights (snapshot)
  double lb_max_length_ = 0.0;
  int64_t served_count_ = 0;
  bool serve_counted_ = true;  // warm-up flag for the allocation in flight

  struct Attempt {
    bool ok = false;
    int core = -1;
    int start_slot = -1;
    int data_slots = 0;
    std::optional<ModulationEntry> mod;
  };
  Attempt try_candidate(const Path& p, double bw,
                        const NetworkState& state) const;
  Decision accept(const Request& r, NetworkState& state, const Path& p,
                  const Attempt& a, int candidate_index, bool counted);

  Decision serve_sp(const Request& r, NetworkState& state);
  Decision serve_ksp(const Request& r, NetworkState& state);
  Decision serve_kdp(const Request& r, NetworkState& state);
  Decision serve_lb(const Request& r, NetworkState& state);
  Decision serve_cala(const Request& r, NetworkState& state);

  friend class RmcsaTestAccess;
};

struct RunInputs {
  const Topology* topology;
  SpectrumConfig spectrum;
  TrafficConfig traffic;
  PolicyConfig policy;
  RunOptions options;
};

RunReport run_simulation(const RunInputs& in);

// Same, with a caller-supplied request stream (cfg.total_requests and
// warmup_requests still delimit the counted window).
RunReport run_simulation(const RunInputs& in, std::span<const Request> stream);

}  // namespace sdmsim
