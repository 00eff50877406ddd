#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdmsim {

// Raw per-run tallies over the counted (post-warm-up) window.
struct MetricsAccumulator {
  int64_t counted_requests = 0;
  int64_t accepted = 0;
  int64_t blocked = 0;
  double bw_total_gbps = 0.0;
  double bw_blocked_gbps = 0.0;
  double slot_hop_seconds = 0.0;  // sum of data_slots * hops * holding time
  double latency_sum_s = 0.0;     // wall-clock service latency, accepted only
  int64_t hops_sum = 0;

  void record_accept(double bw, int data_slots, int hops, double hold_s,
                     double latency_s);
  void record_block(double bw);
};

struct RunReport {
  // identity
  std::string policy;
  double load_erlangs = 0.0;
  int repetition = 0;
  uint64_t seed = 0;

  // raw tallies
  int64_t counted_requests = 0;
  int64_t accepted = 0;
  int64_t blocked = 0;
  double bw_total_gbps = 0.0;
  double bw_blocked_gbps = 0.0;
  double slot_hop_seconds = 0.0;
  double latency_sum_s = 0.0;
  int64_t hops_sum = 0;
  double tau_s = 0.0;             // observation window
  int64_t capacity_slot_links = 0;  // NRU denominator without tau
  int64_t cache_hits = 0;
  int64_t cache_misses = 0;

  // derived
  double rbp = 0.0;
  double bbp = 0.0;
  double nru = 0.0;
  std::optional<double> asl_us;  // absent when nothing was accepted
  std::optional<double> ahl;

  double cache_hit_rate() const {
    int64_t n = cache_hits + cache_misses;
    return n == 0 ? 0.0 : static_cast<double>(cache_hits) / n;
  }
  std::string to_json() const;
};

// Fills the derived fields from the raw ones.
void finalize(RunReport& r);

struct MetricSummary {
  double mean = 0.0;
  double ci_half_width = 0.0;  // two-sided 99%, Student-t
};

struct AggregateReport {
  std::string policy;
  double load_erlangs = 0.0;
  int n = 0;
  MetricSummary rbp, bbp, nru, asl_us, ahl;
  double cache_hit_rate = 0.0;  // mean of per-run rates
};

// Two-sided 99% Student-t quantile for n-1 degrees of freedom, 2 <= n <= 31.
double student_t99(int n);

MetricSummary summarize(std::span<const double> values);

// Repetitions of one (policy, load) cell.
AggregateReport aggregate(std::span<const RunReport> runs);

}  // namespace sdmsim
