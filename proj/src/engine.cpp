#include "sdmsim/engine.hpp"

#include <cctype>
#include <chrono>
#include <queue>
#include <stdexcept>

namespace sdmsim {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::SP: return "SP";
    case Policy::KSP: return "KSP";
    case Policy::KDP: return "KDP";
    case Policy::LB: return "LB";
    case Policy::CALA: return "CALA";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Policy p : {Policy::SP, Policy::KSP, Policy::KDP, Policy::LB,
                   Policy::CALA})
    if (upper == policy_name(p)) return p;
  return std::nullopt;
}

Rmcsa::Rmcsa(const Topology& t, const SpectrumConfig& scfg,
             const PolicyConfig& pcfg, const RunOptions& opts)
    : topo_(t),
      scfg_(scfg),
      pcfg_(pcfg),
      table_(opts.modulation),
      cache_(opts.use_cache) {
  if (pcfg_.k < 1) throw std::invalid_argument("candidate budget must be >= 1");
  for (const Link& l : t.links())
    lb_max_length_ = std::max(lb_max_length_, l.length_km);
}

void Rmcsa::reset_cache_counters() {
  cache_.reset_counters();
  ksp_hits_ = ksp_misses_ = 0;
}

void Rmcsa::refresh_lb_weights(const NetworkState& state) {
  lb_weights_.resize(static_cast<size_t>(topo_.link_count()));
  const double denom =
      2.0 * scfg_.slots_per_core * scfg_.cores;  // both directions
  for (const Link& l : topo_.links()) {
    double occupancy =
        (traffic_load(state.directed(2 * l.id)) +
         traffic_load(state.directed(2 * l.id + 1))) / denom;
    lb_weights_[static_cast<size_t>(l.id)] =
        pcfg_.lb_alpha * (l.length_km / lb_max_length_) +
        (1.0 - pcfg_.lb_alpha) * occupancy;
  }
}

Rmcsa::Attempt Rmcsa::try_candidate(const Path& p, double bw,
                                    const NetworkState& state) const {
  Attempt a;
  a.mod = table_.select(p.length_km);
  if (!a.mod) return a;  // beyond every reach
  a.data_slots = required_slots(bw, a.mod->bits_per_symbol, scfg_);
  for (int core = 0; core < scfg_.cores; ++core) {
    if (auto ssi = state.find_first_fit(p, core, a.data_slots)) {
      a.ok = true;
      a.core = core;
      a.start_slot = *ssi;
      return a;
    }
  }
  return a;
}

Decision Rmcsa::accept(const Request& r, NetworkState& state, const Path& p,
                       const Attempt& a, int candidate_index, bool counted) {
  state.allocate(p, a.core, a.start_slot, a.data_slots,
                 r.arrival_time + r.holding_time, r.id, counted);
  Decision d;
  d.accepted = true;
  d.candidate_index = candidate_index;
  d.path = p;
  d.modulation = a.mod->name;
  d.bits_per_symbol = a.mod->bits_per_symbol;
  d.core = a.core;
  d.start_slot = a.start_slot;
  d.data_slots = a.data_slots;
  return d;
}

Decision Rmcsa::serve_sp(const Request& r, NetworkState& state) {
  bool counted = serve_counted_;
  PathCacheKey key{r.src, r.dst, {}};
  auto p = cache_.lookup_or_compute(
      key, [&] { return shortest_path(topo_, r.src, r.dst); });
  if (p) {
    Attempt a = try_candidate(*p, r.bandwidth_gbps, state);
    if (a.ok) return accept(r, state, *p, a, 1, counted);
  }
  return Decision{};
}

Decision Rmcsa::serve_ksp(const Request& r, NetworkState& state) {
  bool counted = serve_counted_;
  int64_t memo_key = static_cast<int64_t>(r.src) * topo_.node_count() + r.dst;
  const std::vector<Path>* paths;
  std::vector<Path> fresh;
  if (!cache_.enabled()) {
    ++ksp_misses_;
    fresh = yen_ksp(topo_, r.src, r.dst, pcfg_.k);
    paths = &fresh;
  } else if (auto it = ksp_memo_.find(memo_key); it != ksp_memo_.end()) {
    ++ksp_hits_;
    paths = &it->second;
  } else {
    ++ksp_misses_;
    paths = &ksp_memo_
                 .emplace(memo_key, yen_ksp(topo_, r.src, r.dst, pcfg_.k))
                 .first->second;
  }
  for (size_t i = 0; i < paths->size(); ++i) {
    Attempt a = try_candidate((*paths)[i], r.bandwidth_gbps, state);
    if (a.ok)
      return accept(r, state, (*paths)[i], a, static_cast<int>(i) + 1, counted);
  }
  return Decision{};
}

Decision Rmcsa::serve_kdp(const Request& r, NetworkState& state) {
  bool counted = serve_counted_;
  ExclusionSet used;
  for (int k = 1; k <= pcfg_.k; ++k) {
    PathCacheKey key{r.src, r.dst, used};
    auto p = cache_.lookup_or_compute(
        key, [&] { return shortest_path(topo_, r.src, r.dst, key.excluded); });
    if (!p) break;
    Attempt a = try_candidate(*p, r.bandwidth_gbps, state);
    if (a.ok) return accept(r, state, *p, a, k, counted);
    used.add_all(p->links);
  }
  return Decision{};
}

Decision Rmcsa::serve_lb(const Request& r, NetworkState& state) {
  bool counted = serve_counted_;
  // Weight snapshots are periodic; no memoization applies here.
  auto p = shortest_path(topo_, r.src, r.dst, {}, lb_weights_);
  if (p) {
    Attempt a = try_candidate(*p, r.bandwidth_gbps, state);
    if (a.ok) return accept(r, state, *p, a, 1, counted);
  }
  return Decision{};
}

Decision Rmcsa::serve_cala(const Request& r, NetworkState& state) {
  bool counted = serve_counted_;
  PathCacheKey key{r.src, r.dst, {}};
  auto p1 = cache_.lookup_or_compute(
      key, [&] { return shortest_path(topo_, r.src, r.dst); });
  if (p1) {
    Attempt a = try_candidate(*p1, r.bandwidth_gbps, state);
    if (a.ok) return accept(r, state, *p1, a, 1, counted);
  }

  ExclusionSet lmax_list;
  std::optional<Path> prev = p1;
  for (int k = 2; k <= pcfg_.k; ++k) {
    std::optional<Path> pk;
    if (k < pcfg_.k) {
      if (prev) {
        CaAlternative alt = ca_alternative_path(topo_, state, r.src, r.dst,
                                                *prev, lmax_list, &cache_);
        lmax_list.add(alt.lmax);
        pk = std::move(alt.path);
      } else {
        PathCacheKey kk{r.src, r.dst, lmax_list};
        pk = cache_.lookup_or_compute(kk, [&] {
          return shortest_path(topo_, r.src, r.dst, kk.excluded);
        });
      }
    } else {
      // Final candidate: link-disjoint from the first path.
      if (prev) lmax_list.add(max_occupancy_link(state, *prev));
      if (p1) {
        pk = ca_disjoint_path(topo_, r.src, r.dst, *p1, lmax_list, &cache_);
      } else {
        PathCacheKey kk{r.src, r.dst, lmax_list};
        pk = cache_.lookup_or_compute(kk, [&] {
          return shortest_path(topo_, r.src, r.dst, kk.excluded);
        });
      }
    }
    if (pk) {
      Attempt a = try_candidate(*pk, r.bandwidth_gbps, state);
      if (a.ok) return accept(r, state, *pk, a, k, counted);
    }
    prev = std::move(pk);
  }
  return Decision{};
}

Decision Rmcsa::serve(const Request& r, NetworkState& state, bool counted) {
  if (pcfg_.policy == Policy::LB &&
      served_count_ % pcfg_.lb_update_interval == 0)
    refresh_lb_weights(state);
  ++served_count_;
  serve_counted_ = counted;

  auto t0 = std::chrono::steady_clock::now();
  Decision d;
  switch (pcfg_.policy) {
    case Policy::SP: d = serve_sp(r, state); break;
    case Policy::KSP: d = serve_ksp(r, state); break;
    case Policy::KDP: d = serve_kdp(r, state); break;
    case Policy::LB: d = serve_lb(r, state); break;
    case Policy::CALA: d = serve_cala(r, state); break;
  }
  d.latency_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return d;
}

RunReport run_simulation(const RunInputs& in, std::span<const Request> stream) {
  const Topology& t = *in.topology;
  NetworkState state(t, in.spectrum);
  Rmcsa engine(t, in.spectrum, in.policy, in.options);
  MetricsAccumulator acc;

  using Dep = std::pair<double, int64_t>;  // (expiry, lightpath id)
  std::priority_queue<Dep, std::vector<Dep>, std::greater<Dep>> departures;

  const int warmup = in.traffic.warmup_requests;
  double warmup_end_time = 0.0;
  double last_event_time = 0.0;

  for (const Request& r : stream) {
    while (!departures.empty() && departures.top().first <= r.arrival_time) {
      auto [when, id] = departures.top();
      departures.pop();
      state.release(id);
      last_event_time = when;
      if (in.options.validate_state) state.verify_invariants();
      if (in.options.after_event) in.options.after_event(when, state);
    }
    bool counted = r.id >= warmup;
    if (r.id == warmup) {
      warmup_end_time = r.arrival_time;
      engine.reset_cache_counters();
    }
    Decision d = engine.serve(r, state, counted);
    last_event_time = r.arrival_time;
    if (d.accepted)
      departures.emplace(r.arrival_time + r.holding_time, r.id);
    if (counted) {
      if (d.accepted)
        acc.record_accept(r.bandwidth_gbps, d.data_slots, d.path.hops,
                          r.holding_time, d.latency_s);
      else
        acc.record_block(r.bandwidth_gbps);
    }
    if (in.options.validate_state) state.verify_invariants();
    if (in.options.on_decision) in.options.on_decision(r, d);
    if (in.options.after_event) in.options.after_event(r.arrival_time, state);
  }

  // Lightpaths outliving the stream: their departures are discarded, and
  // their utilization contribution is truncated at the window end.
  double tau_end = last_event_time;
  for (const auto& [id, a] : state.active()) {
    if (a.counted && a.expiry_time > tau_end)
      acc.slot_hop_seconds -= static_cast<double>(a.data_slots) *
                              static_cast<double>(a.directed_links.size()) *
                              (a.expiry_time - tau_end);
  }

  RunReport rep;
  rep.policy = policy_name(in.policy.policy);
  rep.load_erlangs = in.traffic.load_erlangs;
  rep.seed = in.traffic.seed;
  rep.counted_requests = acc.counted_requests;
  rep.accepted = acc.accepted;
  rep.blocked = acc.blocked;
  rep.bw_total_gbps = acc.bw_total_gbps;
  rep.bw_blocked_gbps = acc.bw_blocked_gbps;
  rep.slot_hop_seconds = acc.slot_hop_seconds;
  rep.latency_sum_s = acc.latency_sum_s;
  rep.hops_sum = acc.hops_sum;
  rep.tau_s = tau_end - (in.options.tau == TauConvention::FromWarmupEnd
                             ? warmup_end_time
                             : 0.0);
  int64_t link_states = in.options.nru_denom == NruDenominator::DirectedLinks
                            ? 2ll * t.link_count()
                            : t.link_count();
  rep.capacity_slot_links = link_states * in.spectrum.cores *
                            in.spectrum.slots_per_core;
  rep.cache_hits = engine.cache_hits();
  rep.cache_misses = engine.cache_misses();
  finalize(rep);
  return rep;
}

RunReport run_simulation(const RunInputs& in) {
  std::vector<Request> stream = generate_request_stream(*in.topology, in.traffic);
  return run_simulation(in, stream);
}

}  // namespace sdmsim
