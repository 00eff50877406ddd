#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdmsim/engine.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace sdmsim;
using namespace testsupport;

namespace {

Request request(int64_t id, NodeId s, NodeId d, double bw, double at = 1.0,
                double hold = 10.0) {
  return Request{id, s, d, bw, at, hold};
}

PolicyConfig policy(Policy p, int k = 3) {
  PolicyConfig cfg;
  cfg.policy = p;
  cfg.k = k;
  return cfg;
}

// Raw tallies that must match between equivalent policies or repeated runs
// (latency and cache counters excluded).
struct RawTally {
  int64_t counted, accepted, blocked, hops;
  double bw_total, bw_blocked, slot_hop, tau, rbp, bbp, nru;

  explicit RawTally(const RunReport& r)
      : counted(r.counted_requests),
        accepted(r.accepted),
        blocked(r.blocked),
        hops(r.hops_sum),
        bw_total(r.bw_total_gbps),
        bw_blocked(r.bw_blocked_gbps),
        slot_hop(r.slot_hop_seconds),
        tau(r.tau_s),
        rbp(r.rbp),
        bbp(r.bbp),
        nru(r.nru) {}

  bool operator==(const RawTally&) const = default;
};

}  // namespace

TEST_CASE("a lone request takes the shortest path, first core, first slot") {
  Topology t = triangle();
  SpectrumConfig scfg;
  NetworkState state(t, scfg);
  Rmcsa engine(t, scfg, policy(Policy::SP), {});

  Request r = request(0, 0, 2, 150.0);
  Decision d = engine.serve(r, state);
  REQUIRE(d.accepted);
  CHECK(d.candidate_index == 1);
  CHECK(d.path.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(d.path.hops == 2);
  CHECK(d.modulation == "DP-64QAM");  // 200 km is within the shortest reach
  CHECK(d.bits_per_symbol == 6);
  CHECK(d.data_slots == 1);           // 150 Gbps in one slot at that format
  CHECK(d.core == 0);
  CHECK(d.start_slot == 0);
  CHECK(d.latency_s >= 0.0);

  REQUIRE(state.active().count(0) == 1);
  const Allocation& a = state.active().at(0);
  CHECK(a.expiry_time == doctest::Approx(11.0));
  CHECK(a.counted);

  // Warm-up serves mark their allocations as uncounted.
  Decision d2 = engine.serve(request(1, 0, 2, 150.0), state, false);
  REQUIRE(d2.accepted);
  CHECK_FALSE(state.active().at(1).counted);
}

TEST_CASE("requests beyond every modulation reach are blocked") {
  Topology t = single_link(8500.0);
  SpectrumConfig scfg;
  NetworkState state(t, scfg);
  Rmcsa engine(t, scfg, policy(Policy::SP), {});
  Decision d = engine.serve(request(0, 0, 1, 25.0), state);
  CHECK_FALSE(d.accepted);
  CHECK(d.candidate_index == 0);
  CHECK(state.active().empty());
}

TEST_CASE("alternate candidates rescue what the shortest path cannot carry") {
  Topology t = triangle();
  SpectrumConfig scfg;

  NetworkState state(t, scfg);
  CongestionFixture::saturate_direction(state, t, 0, 1, 1000000);

  Rmcsa sp(t, scfg, policy(Policy::SP), {});
  Decision ds = sp.serve(request(0, 0, 2, 100.0), state);
  CHECK_FALSE(ds.accepted);

  Rmcsa ksp(t, scfg, policy(Policy::KSP, 2), {});
  Decision dk = ksp.serve(request(1, 0, 2, 100.0), state);
  REQUIRE(dk.accepted);
  CHECK(dk.candidate_index == 2);
  CHECK(dk.path.nodes == std::vector<NodeId>{0, 2});

  Rmcsa kdp(t, scfg, policy(Policy::KDP, 2), {});
  Decision dd = kdp.serve(request(2, 0, 2, 100.0), state);
  REQUIRE(dd.accepted);
  CHECK(dd.candidate_index == 2);
  CHECK(dd.path.nodes == std::vector<NodeId>{0, 2});
}

TEST_CASE("the congestion-aware detour survives where candidate lists fail") {
  CongestionFixture fix;
  SpectrumConfig scfg;

  NetworkState base(fix.topo, scfg);
  fix.saturate(base);

  // Both hot links sit on every short candidate, so the plain lists block.
  {
    NetworkState state = base;
    Rmcsa ksp(fix.topo, scfg, policy(Policy::KSP, 3), {});
    CHECK_FALSE(ksp.serve(request(0, fix.src, fix.dst, 100.0), state).accepted);
  }
  {
    NetworkState state = base;
    Rmcsa kdp(fix.topo, scfg, policy(Policy::KDP, 3), {});
    CHECK_FALSE(kdp.serve(request(0, fix.src, fix.dst, 100.0), state).accepted);
  }

  NetworkState state = base;
  Rmcsa cala(fix.topo, scfg, policy(Policy::CALA, 3), {});
  Decision d = cala.serve(request(0, fix.src, fix.dst, 100.0), state);
  REQUIRE(d.accepted);
  CHECK(d.candidate_index == 3);
  CHECK(d.path.nodes == fix.p3());
  Path anchor = make_path(fix.topo, fix.p1());
  for (LinkId l : d.path.links)
    for (LinkId used : anchor.links) CHECK(l != used);

  // Replaying the same demand hits the three cached route queries.
  int64_t h0 = cala.cache_hits(), m0 = cala.cache_misses();
  CHECK(m0 == 3);
  Decision d2 = cala.serve(request(1, fix.src, fix.dst, 100.0), state);
  CHECK(cala.cache_hits() - h0 == 3);
  CHECK(cala.cache_misses() - m0 == 0);
  REQUIRE(d2.accepted);
  CHECK(d2.path.nodes == fix.p3());
  CHECK(d2.start_slot == 2);  // first fit lands after the previous window
}

TEST_CASE("a candidate budget of one degenerates to the shortest path") {
  CongestionFixture fix;
  RunInputs in;
  in.topology = &fix.topo;
  in.spectrum = SpectrumConfig{2, 16, 12.5, 1};
  in.traffic.load_erlangs = 30.0;
  in.traffic.total_requests = 2000;
  in.traffic.warmup_requests = 200;
  in.traffic.seed = 99;
  in.policy = policy(Policy::SP, 1);

  RawTally sp(run_simulation(in));
  for (Policy p : {Policy::KSP, Policy::KDP, Policy::CALA}) {
    in.policy = policy(p, 1);
    CHECK(RawTally(run_simulation(in)) == sp);
  }
}

TEST_CASE("full length weighting makes the balanced policy follow lengths") {
  CongestionFixture fix;
  RunInputs in;
  in.topology = &fix.topo;
  in.spectrum = SpectrumConfig{2, 16, 12.5, 1};
  in.traffic.load_erlangs = 30.0;
  in.traffic.total_requests = 2000;
  in.traffic.warmup_requests = 200;
  in.traffic.seed = 7;
  in.policy = policy(Policy::SP, 1);
  RawTally sp(run_simulation(in));

  in.policy = policy(Policy::LB);
  in.policy.lb_alpha = 1.0;
  in.policy.lb_update_interval = 100;
  CHECK(RawTally(run_simulation(in)) == sp);
}

TEST_CASE("pure occupancy weighting steers around hot corridors") {
  Topology t = corridor_pair();
  SpectrumConfig scfg;
  NetworkState state(t, scfg);
  CongestionFixture::saturate_direction(state, t, 0, 1, 1000000);
  CongestionFixture::saturate_direction(state, t, 1, 3, 2000000);

  PolicyConfig pcfg = policy(Policy::LB);
  pcfg.lb_alpha = 0.0;
  pcfg.lb_update_interval = 1;
  Rmcsa lb(t, scfg, pcfg, {});
  Decision d = lb.serve(request(0, 0, 3, 100.0), state);
  REQUIRE(d.accepted);
  CHECK(d.path.nodes == std::vector<NodeId>{0, 2, 3});

  // The snapshot was taken before the accept: hot links at half occupancy
  // (one direction of two), the other corridor idle.
  auto w = lb.lb_weights();
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(w[2] == 0.0);
  CHECK(w[3] == 0.0);

  // The shorter corridor would win on lengths alone.
  Rmcsa sp(t, scfg, policy(Policy::SP), {});
  CHECK_FALSE(sp.serve(request(1, 0, 3, 100.0), state).accepted);
}

TEST_CASE("balanced weights refresh only on the update interval") {
  Topology t = corridor_pair();
  SpectrumConfig scfg;
  NetworkState state(t, scfg);
  PolicyConfig pcfg = policy(Policy::LB);
  pcfg.lb_update_interval = 2;
  Rmcsa lb(t, scfg, pcfg, {});

  REQUIRE(lb.serve(request(0, 0, 3, 150.0), state).accepted);  // refresh #0
  std::vector<double> w0(lb.lb_weights().begin(), lb.lb_weights().end());
  REQUIRE(w0.size() == 4);
  CHECK(w0[0] == doctest::Approx(0.5 * 10.0 / 12.0));  // idle snapshot

  REQUIRE(lb.serve(request(1, 0, 3, 150.0), state).accepted);  // no refresh
  std::vector<double> w1(lb.lb_weights().begin(), lb.lb_weights().end());
  CHECK(w1 == w0);

  REQUIRE(lb.serve(request(2, 0, 3, 150.0), state).accepted);  // refresh #2
  std::vector<double> w2(lb.lb_weights().begin(), lb.lb_weights().end());
  CHECK(w2 != w0);  // two lightpaths now load the short corridor
}

TEST_CASE("policy names parse case-insensitively and round-trip") {
  for (Policy p : {Policy::SP, Policy::KSP, Policy::KDP, Policy::LB,
                   Policy::CALA})
    CHECK(parse_policy(policy_name(p)) == p);
  CHECK(parse_policy("sp") == Policy::SP);
  CHECK(parse_policy("CaLa") == Policy::CALA);
  CHECK(parse_policy("ksp") == Policy::KSP);
  CHECK(parse_policy("nonesuch") == std::nullopt);
  CHECK(parse_policy("") == std::nullopt);
}

TEST_CASE("a candidate budget below one is rejected") {
  Topology t = triangle();
  SpectrumConfig scfg;
  CHECK_THROWS_AS(Rmcsa(t, scfg, policy(Policy::KSP, 0), {}),
                  std::invalid_argument);
}

TEST_CASE("light offered load never blocks") {
  Topology t = triangle();
  RunInputs in;
  in.topology = &t;
  in.traffic.load_erlangs = 0.1;
  in.traffic.total_requests = 500;
  in.traffic.warmup_requests = 50;
  in.traffic.seed = 3;
  in.policy = policy(Policy::CALA);

  RunReport rep = run_simulation(in);
  CHECK(rep.counted_requests == 450);
  CHECK(rep.blocked == 0);
  CHECK(rep.rbp == 0.0);
  CHECK(rep.bbp == 0.0);
  REQUIRE(rep.asl_us);
  CHECK(*rep.asl_us > 0.0);
}

TEST_CASE("repeated runs agree on everything but wall-clock latency") {
  CongestionFixture fix;
  RunInputs in;
  in.topology = &fix.topo;
  in.spectrum = SpectrumConfig{2, 16, 12.5, 1};
  in.traffic.load_erlangs = 150.0;
  in.traffic.total_requests = 3000;
  in.traffic.warmup_requests = 300;
  in.traffic.seed = 12;
  in.policy = policy(Policy::CALA);
  in.options.validate_state = true;  // exercise invariants while at it

  RunReport a = run_simulation(in);
  RunReport b = run_simulation(in);
  CHECK(RawTally(a) == RawTally(b));
  CHECK(a.cache_hits == b.cache_hits);
  CHECK(a.cache_misses == b.cache_misses);
  CHECK(a.blocked > 0);  // the load is high enough to be interesting
}

TEST_CASE("disabling the route memo changes no decision") {
  CongestionFixture fix;
  RunInputs in;
  in.topology = &fix.topo;
  in.spectrum = SpectrumConfig{2, 16, 12.5, 1};
  in.traffic.load_erlangs = 40.0;
  in.traffic.total_requests = 1500;
  in.traffic.warmup_requests = 150;
  in.traffic.seed = 21;
  in.policy = policy(Policy::CALA);

  struct Snap {
    bool accepted;
    int candidate;
    std::vector<NodeId> nodes;
    int core;
    int start;

    bool operator==(const Snap&) const = default;
  };
  auto capture = [](std::vector<Snap>& out) {
    return [&out](const Request&, const Decision& d) {
      out.push_back({d.accepted, d.candidate_index, d.path.nodes, d.core,
                     d.start_slot});
    };
  };

  std::vector<Snap> with, without;
  in.options.on_decision = capture(with);
  RunReport cached = run_simulation(in);
  in.options.use_cache = false;
  in.options.on_decision = capture(without);
  RunReport fresh = run_simulation(in);

  CHECK(with == without);
  CHECK(RawTally(cached) == RawTally(fresh));
  CHECK(cached.cache_hit_rate() > 0.5);
  CHECK(fresh.cache_hits == 0);
}

TEST_CASE("wider searches only ever accept more, request by request") {
  CongestionFixture fix;
  SpectrumConfig scfg{2, 16, 12.5, 1};
  RandomStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkState base(fix.topo, scfg);
    randomize_occupancy(base, fix.topo, rng, 40, 1);
    NodeId s = rng.next_index(9);
    NodeId d = rng.next_index(9);
    if (s == d) continue;
    Request r = request(trial + 100, s, d, 25.0 * (1 + rng.next_index(6)));

    NetworkState s1 = base, s2 = base, s3 = base;
    Decision sp = Rmcsa(fix.topo, scfg, policy(Policy::SP), {}).serve(r, s1);
    Decision ksp =
        Rmcsa(fix.topo, scfg, policy(Policy::KSP, 3), {}).serve(r, s2);
    Decision cala =
        Rmcsa(fix.topo, scfg, policy(Policy::CALA, 3), {}).serve(r, s3);
    if (sp.accepted) {
      CHECK(ksp.accepted);
      CHECK(cala.accepted);
      CHECK(ksp.candidate_index == 1);
      CHECK(cala.candidate_index == 1);
      CHECK(ksp.path.nodes == sp.path.nodes);
      CHECK(cala.path.nodes == sp.path.nodes);
    }
  }
}

TEST_CASE("utilization matches the time integral of occupied slots") {
  Topology t("stretch3", 3, {{0, 1, 3000}, {1, 2, 3000}, {0, 2, 7000}});
  RunInputs in;
  in.topology = &t;
  in.spectrum = SpectrumConfig{1, 16, 12.5, 0};  // no guard: slots = data
  in.traffic.load_erlangs = 3.0;
  in.traffic.total_requests = 400;
  in.traffic.warmup_requests = 0;
  in.traffic.seed = 17;
  in.policy = policy(Policy::KSP, 2);

  double integral = 0.0, prev_time = 0.0;
  int64_t prev_occupied = 0;
  in.options.after_event = [&](double now, const NetworkState& state) {
    integral += static_cast<double>(prev_occupied) * (now - prev_time);
    prev_time = now;
    prev_occupied = state.total_occupied_slots();
  };

  RunReport rep = run_simulation(in);
  REQUIRE(rep.tau_s > 0.0);
  double integral_nru =
      integral / (rep.tau_s * static_cast<double>(rep.capacity_slot_links));
  CHECK(rep.nru == doctest::Approx(integral_nru).epsilon(1e-9));
  CHECK(rep.nru > 0.0);
}

TEST_CASE("window conventions shift the utilization denominator") {
  Topology t = triangle();
  RunInputs in;
  in.topology = &t;
  in.spectrum = SpectrumConfig{1, 16, 12.5, 1};
  in.traffic.load_erlangs = 4.0;
  in.traffic.total_requests = 1000;
  in.traffic.warmup_requests = 400;
  in.traffic.seed = 5;
  in.policy = policy(Policy::SP, 1);

  RunReport from_warmup = run_simulation(in);
  in.options.tau = TauConvention::FromZero;
  RunReport from_zero = run_simulation(in);
  CHECK(from_warmup.counted_requests == 600);
  CHECK(from_zero.tau_s > from_warmup.tau_s);
  CHECK(from_zero.nru < from_warmup.nru);

  in.options.nru_denom = NruDenominator::UndirectedLinks;
  RunReport undirected = run_simulation(in);
  CHECK(undirected.capacity_slot_links * 2 == from_zero.capacity_slot_links);
  CHECK(undirected.nru == doctest::Approx(2.0 * from_zero.nru));
}

TEST_CASE("single-fiber blocking follows the loss formula") {
  Topology t = single_link(100.0);
  RunInputs in;
  in.topology = &t;
  in.spectrum = SpectrumConfig{1, 16, 12.5, 0};
  in.traffic.load_erlangs = 16.0;  // 8 erlangs per direction
  in.traffic.bandwidths_gbps = {25.0};  // one slot per lightpath
  in.traffic.total_requests = 20000;
  in.traffic.warmup_requests = 2000;
  in.policy = policy(Policy::SP, 1);

  const double expected = erlang_b(8.0, 16);
  const int reps = 6;
  std::vector<double> rbps;
  for (int rep = 0; rep < reps; ++rep) {
    in.traffic.seed = derive_seed(777, static_cast<uint64_t>(rep));
    rbps.push_back(run_simulation(in).rbp);
  }
  double mean = 0.0;
  for (double v : rbps) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : rbps) var += (v - mean) * (v - mean);
  var /= reps - 1;
  double sample_se = std::sqrt(var / reps);
  double binom_se = std::sqrt(expected * (1.0 - expected) /
                              (static_cast<double>(reps) * 18000.0));
  double tol = 3.0 * std::max(sample_se, binom_se) + 1e-9;
  CHECK(std::abs(mean - expected) < tol);
}
