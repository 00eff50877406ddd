#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "sdmsim/topology.hpp"

namespace sdmsim {

// One keyed pseudo-random stream: mt19937_64 under draw routines that avoid
// std::*_distribution, so sequences are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }
  double next_unit();                  // (0, 1)
  double next_exponential(double rate);
  int next_index(int n);               // uniform over [0, n), unbiased

 private:
  std::mt19937_64 gen_;
};

struct TrafficConfig {
  double load_erlangs = 100.0;  // offered load = (lambda/mu) * |V|
  double mu = 1.0;              // holding-time rate; mean hold = 1/mu
  std::vector<double> bandwidths_gbps = {25, 50, 75, 100, 125, 150};
  int total_requests = 100000;
  int warmup_requests = 10000;
  uint64_t seed = 1;
};

struct Request {
  int64_t id;  // 0-based arrival order
  NodeId src;
  NodeId dst;
  double bandwidth_gbps;
  double arrival_time;
  double holding_time;  // > 0
};

// Aggregate Poisson arrivals at rate load*mu, uniform endpoints (src != dst),
// uniform bandwidth class, exponential holding times. Four independent
// sub-streams (inter-arrivals, endpoints, bandwidths, holding times) are
// derived from the seed, so e.g. endpoint draws do not shift when the
// bandwidth list changes.
std::vector<Request> generate_request_stream(const Topology& t,
                                             const TrafficConfig& cfg);

// One whitespace-separated record per line: id src dst bw arrival hold.
void write_stream(std::ostream& os, const std::vector<Request>& reqs);

uint64_t splitmix64(uint64_t& state);

// Deterministic sub-seed k of a base seed.
uint64_t derive_seed(uint64_t base, uint64_t k);

}  // namespace sdmsim
