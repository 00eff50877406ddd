#include "sdmsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sdmsim {

void MetricsAccumulator::record_accept(double bw, int data_slots, int hops,
                                       double hold_s, double latency_s) {
  ++counted_requests;
  ++accepted;
  bw_total_gbps += bw;
  slot_hop_seconds += static_cast<double>(data_slots) * hops * hold_s;
  latency_sum_s += latency_s;
  hops_sum += hops;
}

void MetricsAccumulator::record_block(double bw) {
  ++counted_requests;
  ++blocked;
  bw_total_gbps += bw;
  bw_blocked_gbps += bw;
}

void finalize(RunReport& r) {
  int64_t total = r.accepted + r.blocked;
  r.rbp = total == 0 ? 0.0 : static_cast<double>(r.blocked) / total;
  r.bbp = r.bw_total_gbps == 0.0 ? 0.0 : r.bw_blocked_gbps / r.bw_total_gbps;
  double denom = static_cast<double>(r.capacity_slot_links) * r.tau_s;
  r.nru = denom == 0.0 ? 0.0 : r.slot_hop_seconds / denom;
  if (r.accepted > 0) {
    r.asl_us = r.latency_sum_s / r.accepted * 1e6;
    r.ahl = static_cast<double>(r.hops_sum) / r.accepted;
  } else {
    r.asl_us.reset();
    r.ahl.reset();
  }
}

// Two-sided 99% Student-t quantiles, df = 1..30.
double student_t99(int n) {
  static const double table[30] = {
      63.657, 9.9248, 5.8409, 4.6041, 4.0321, 3.7074, 3.4995, 3.3554,
      3.2498, 3.1693, 3.1058, 3.0545, 3.0123, 2.9768, 2.9467, 2.9208,
      2.8982, 2.8784, 2.8609, 2.8453, 2.8314, 2.8188, 2.8073, 2.7969,
      2.7874, 2.7787, 2.7707, 2.7633, 2.7564, 2.7500};
  int df = n - 1;
  if (df < 1 || df > 30)
    throw std::out_of_range("student_t99 supports 2..31 samples");
  return table[df - 1];
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  size_t n = values.size();
  if (n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n == 1) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  s.ci_half_width = student_t99(static_cast<int>(n)) * sd /
                    std::sqrt(static_cast<double>(n));
  return s;
}

AggregateReport aggregate(std::span<const RunReport> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate of zero runs");
  AggregateReport ar;
  ar.policy = runs.front().policy;
  ar.load_erlangs = runs.front().load_erlangs;
  ar.n = static_cast<int>(runs.size());
  std::vector<double> rbp, bbp, nru, asl, ahl;
  double hit_rate = 0.0;
  for (const RunReport& r : runs) {
    rbp.push_back(r.rbp);
    bbp.push_back(r.bbp);
    nru.push_back(r.nru);
    if (r.asl_us) asl.push_back(*r.asl_us);
    if (r.ahl) ahl.push_back(*r.ahl);
    hit_rate += r.cache_hit_rate();
  }
  ar.rbp = summarize(rbp);
  ar.bbp = summarize(bbp);
  ar.nru = summarize(nru);
  ar.asl_us = summarize(asl);
  ar.ahl = summarize(ahl);
  ar.cache_hit_rate = hit_rate / static_cast<double>(runs.size());
  return ar;
}

std::string RunReport::to_json() const {
  std::ostringstream os;
  char buf[64];
  auto num = [&buf](double v) {
    snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  os << "{\"policy\":\"" << policy << "\"";
  os << ",\"load_erlangs\":" << num(load_erlangs);
  os << ",\"rep\":" << repetition;
  os << ",\"seed\":" << seed;
  os << ",\"counted_requests\":" << counted_requests;
  os << ",\"accepted\":" << accepted;
  os << ",\"blocked\":" << blocked;
  os << ",\"bw_total_gbps\":" << num(bw_total_gbps);
  os << ",\"bw_blocked_gbps\":" << num(bw_blocked_gbps);
  os << ",\"slot_hop_seconds\":" << num(slot_hop_seconds);
  os << ",\"latency_sum_s\":" << num(latency_sum_s);
  os << ",\"hops_sum\":" << hops_sum;
  os << ",\"tau_s\":" << num(tau_s);
  os << ",\"capacity_slot_links\":" << capacity_slot_links;
  os << ",\"cache_hits\":" << cache_hits;
  os << ",\"cache_misses\":" << cache_misses;
  os << ",\"rbp\":" << num(rbp);
  os << ",\"bbp\":" << num(bbp);
  os << ",\"nru\":" << num(nru);
  if (asl_us)
    os << ",\"asl_us\":" << num(*asl_us);
  else
    os << ",\"asl_us\":null";
  if (ahl)
    os << ",\"ahl\":" << num(*ahl);
  else
    os << ",\"ahl\":null";
  os << "}";
  return os.str();
}

}  // namespace sdmsim
