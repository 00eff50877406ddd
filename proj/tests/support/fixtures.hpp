#pragma once

// Hand-built graphs and states shared by the unit and acceptance tests.

#include <optional>
#include <vector>

#include "sdmsim/routing.hpp"
#include "sdmsim/spectrum.hpp"
#include "sdmsim/topology.hpp"

namespace testsupport {

using namespace sdmsim;

// Rebuilds a Path from a node sequence (links, length, hops recomputed).
inline Path make_path(const Topology& t, std::vector<NodeId> nodes) {
  Path p;
  p.nodes = std::move(nodes);
  for (size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    LinkId l = t.link_between(p.nodes[i], p.nodes[i + 1]);
    p.links.push_back(l);
    p.length_km += t.link(l).length_km;
  }
  p.hops = static_cast<int>(p.links.size());
  return p;
}

// A-B 100, B-C 100, A-C 250 (A=0, B=1, C=2). Link ids 0, 1, 2 in that order.
inline Topology triangle() {
  return Topology("triangle", 3,
                  {{0, 1, 100}, {1, 2, 100}, {0, 2, 250}});
}

// 0-1-2 with equal lengths; endpoints have degree 1.
inline Topology chain3(std::vector<std::string>* warnings = nullptr) {
  return Topology("chain3", 3, {{0, 1, 100}, {1, 2, 100}}, warnings);
}

// Center 0, leaves 1..3, equal lengths.
inline Topology star4(std::vector<std::string>* warnings = nullptr) {
  return Topology("star4", 4, {{0, 1, 100}, {0, 2, 100}, {0, 3, 100}},
                  warnings);
}

// Two parallel 2-hop corridors 0-1-3 (10+10) and 0-2-3 (12+12).
// Link ids: 0=(0,1), 1=(1,3), 2=(0,2), 3=(2,3).
inline Topology corridor_pair() {
  return Topology("corridor_pair", 4,
                  {{0, 1, 10}, {1, 3, 10}, {0, 2, 12}, {2, 3, 12}});
}

// Two nodes joined by one link; both endpoints warn about degree 1.
inline Topology single_link(double length_km = 100.0) {
  std::vector<std::string> warnings;
  return Topology("single_link", 2, {{0, 1, length_km}}, &warnings);
}

// Congestion-replay graph: two hot links on the central corridor force the
// plain candidate lists into the same bottleneck while one detour stays free.
//
//        1 --- 2 --- 3          long northern arc (100 each)
//       /              \
//  0 - 4 ---e1--- 5 --- 8       main corridor (10 each)
//   \            /|    /
//    \      e2  / |   /
//     \        /  |  /
//      6 -----    7            (0,6)=20 (5,6)=5 (5,7)=5 (7,8)=10 (6,7)=25
//
// Shortest 0->8 is 0-4-5-8 through e1=(4,5). With e1 excluded the next
// choice 0-6-5-8 runs through e2=(5,6). Avoiding both leaves 0-6-7-8,
// which shares no link with the first path.
struct CongestionFixture {
  Topology topo;
  LinkId e1;  // (4,5)
  LinkId e2;  // (5,6)
  NodeId src = 0;
  NodeId dst = 8;

  CongestionFixture()
      : topo("congestion9", 9,
             {{0, 4, 10},   // 0
              {4, 5, 10},   // 1  e1
              {5, 8, 10},   // 2
              {0, 6, 20},   // 3
              {5, 6, 5},    // 4  e2
              {5, 7, 5},    // 5
              {7, 8, 10},   // 6
              {6, 7, 25},   // 7
              {1, 4, 100},  // 8
              {1, 2, 100},  // 9
              {2, 3, 100},  // 10
              {3, 8, 100}}),
        e1(1),
        e2(4) {}

  std::vector<NodeId> p1() const { return {0, 4, 5, 8}; }
  std::vector<NodeId> p2() const { return {0, 6, 5, 8}; }  // avoids e1, hits e2
  std::vector<NodeId> p3() const { return {0, 6, 7, 8}; }  // avoids both

  // Fills every slot of every core on e1 in the 4->5 direction and e2 in the
  // 6->5 direction (the directions a 0->8 lightpath would occupy). Returns
  // the next free lightpath id.
  int64_t saturate(NetworkState& state, int64_t first_id = 1000000) const {
    int64_t id = first_id;
    id = saturate_direction(state, topo, 4, 5, id);
    id = saturate_direction(state, topo, 6, 5, id);
    return id;
  }

  static int64_t saturate_direction(NetworkState& state, const Topology& t,
                                    NodeId from, NodeId to, int64_t first_id) {
    Path hop = make_path(t, {from, to});
    const SpectrumConfig& cfg = state.config();
    int64_t id = first_id;
    for (int core = 0; core < cfg.cores; ++core)
      state.allocate(hop, core, 0, cfg.slots_per_core, 1e18, id++, false);
    return id;
  }
};

}  // namespace testsupport
