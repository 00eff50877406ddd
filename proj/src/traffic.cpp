#include "sdmsim/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace sdmsim {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t k) {
  uint64_t s = base;
  uint64_t out = 0;
  for (uint64_t i = 0; i <= k; ++i) out = splitmix64(s);
  return out;
}

double RandomStream::next_unit() {
  // 53 significant bits, offset half a step to stay inside (0, 1).
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
}

double RandomStream::next_exponential(double rate) {
  return -std::log(next_unit()) / rate;
}

int RandomStream::next_index(int n) {
  if (n <= 0) throw std::invalid_argument("next_index needs n > 0");
  uint64_t un = static_cast<uint64_t>(n);
  uint64_t bound = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = gen_();
  } while (x >= bound);
  return static_cast<int>(x % un);
}

std::vector<Request> generate_request_stream(const Topology& t,
                                             const TrafficConfig& cfg) {
  if (cfg.load_erlangs <= 0.0 || cfg.mu <= 0.0)
    throw std::invalid_argument("load and mu must be positive");
  if (cfg.total_requests <= 0 || cfg.warmup_requests < 0 ||
      cfg.warmup_requests >= cfg.total_requests)
    throw std::invalid_argument("bad request counts");
  if (cfg.bandwidths_gbps.empty())
    throw std::invalid_argument("empty bandwidth set");

  // Aggregate arrival rate: load = (lambda/mu) * |V| across all nodes.
  const double arrival_rate = cfg.load_erlangs * cfg.mu;
  const int n = t.node_count();

  RandomStream arrivals(derive_seed(cfg.seed, 0));
  RandomStream endpoints(derive_seed(cfg.seed, 1));
  RandomStream bandwidths(derive_seed(cfg.seed, 2));
  RandomStream holds(derive_seed(cfg.seed, 3));

  std::vector<Request> out;
  out.reserve(static_cast<size_t>(cfg.total_requests));
  double now = 0.0;
  for (int i = 0; i < cfg.total_requests; ++i) {
    now += arrivals.next_exponential(arrival_rate);
    Request r;
    r.id = i;
    r.src = endpoints.next_index(n);
    int other = endpoints.next_index(n - 1);
    r.dst = other >= r.src ? other + 1 : other;
    r.bandwidth_gbps = cfg.bandwidths_gbps[static_cast<size_t>(
        bandwidths.next_index(static_cast<int>(cfg.bandwidths_gbps.size())))];
    r.arrival_time = now;
    r.holding_time = holds.next_exponential(cfg.mu);
    out.push_back(r);
  }
  return out;
}

void write_stream(std::ostream& os, const std::vector<Request>& reqs) {
  os << "# id src dst bandwidth_gbps arrival_time holding_time\n";
  char buf[160];
  for (const Request& r : reqs) {
    snprintf(buf, sizeof buf, "%lld %d %d %.10g %.10g %.10g\n",
             static_cast<long long>(r.id), r.src, r.dst, r.bandwidth_gbps,
             r.arrival_time, r.holding_time);
    os << buf;
  }
}

}  // namespace sdmsim
