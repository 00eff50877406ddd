#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sdmsim/spectrum.hpp"
#include "sdmsim/topology.hpp"

namespace sdmsim {

struct Path {
  std::vector<NodeId> nodes;  // s ... d
  std::vector<LinkId> links;  // nodes.size() - 1 entries
  double length_km = 0.0;     // physical length, independent of search weights
  int hops = 0;

  bool operator==(const Path& o) const { return nodes == o.nodes; }
};

// Canonical (sorted, deduplicated) set of excluded links.
class ExclusionSet {
 public:
  ExclusionSet() = default;
  explicit ExclusionSet(std::vector<LinkId> links);

  void add(LinkId l);
  void add_all(std::span<const LinkId> ls);
  bool contains(LinkId l) const;
  bool empty() const { return links_.empty(); }
  size_t size() const { return links_.size(); }
  std::span<const LinkId> links() const { return links_; }

  bool operator==(const ExclusionSet&) const = default;

 private:
  std::vector<LinkId> links_;
};

struct PathCacheKey {
  NodeId s;
  NodeId d;
  ExclusionSet excluded;

  bool operator==(const PathCacheKey&) const = default;
};

struct PathCacheKeyHash {
  size_t operator()(const PathCacheKey& k) const;
};

// Memo for exclusion-keyed shortest-path queries. "No path" results are
// cached like any other. Can be disabled, in which case every lookup
// recomputes (and counts as a miss).
class PathCache {
 public:
  explicit PathCache(bool enabled = true) : enabled_(enabled) {}

  std::optional<Path> lookup_or_compute(
      const PathCacheKey& key,
      const std::function<std::optional<Path>()>& compute);

  int64_t hits() const { return hits_; }
  int64_t misses() const { return misses_; }
  size_t size() const { return map_.size(); }
  bool enabled() const { return enabled_; }
  void reset_counters() { hits_ = misses_ = 0; }

 private:
  bool enabled_;
  int64_t hits_ = 0;
  int64_t misses_ = 0;
  std::unordered_map<PathCacheKey, std::optional<Path>, PathCacheKeyHash> map_;
};

// Minimum-weight path from s to d avoiding `excluded`. `weights` holds one
// value per link; empty means physical lengths. Among equal-weight paths the
// lexicographically smallest node sequence is returned, making every router
// deterministic. Returns nullopt when s and d are disconnected after
// exclusion.
std::optional<Path> shortest_path(const Topology& t, NodeId s, NodeId d,
                                  const ExclusionSet& excluded = {},
                                  std::span<const double> weights = {});

// K shortest loop-free paths in (length, node-sequence) order. May return
// fewer than K when the graph runs out of simple paths.
std::vector<Path> yen_ksp(const Topology& t, NodeId s, NodeId d, int k);

// Greedy successive shortest paths, each excluding all links used by the
// previous ones. Stops early when no further disjoint path exists.
std::vector<Path> k_disjoint_paths(const Topology& t, NodeId s, NodeId d,
                                   int k);

// Link of `p` with the highest occupancy ratio, read on the directed state
// the lightpath would occupy; the earliest link along the path wins ties.
LinkId max_occupancy_link(const NetworkState& state, const Path& p);

struct CaAlternative {
  std::optional<Path> path;
  LinkId lmax;  // highest-occupancy link of prev_path (earliest on ties)
};

// Congestion-aware alternative: finds the most occupied link of prev_path
// (occupancy read on the directed state the lightpath would use), then
// returns the shortest path avoiding prev_lmax plus that link. The
// shortest-path query goes through `cache` when provided; the occupancy scan
// itself is never cached.
CaAlternative ca_alternative_path(const Topology& t, const NetworkState& state,
                                  NodeId s, NodeId d, const Path& prev_path,
                                  const ExclusionSet& prev_lmax,
                                  PathCache* cache = nullptr);

// Final candidate: shortest path avoiding every link of p1 plus lmax_list,
// hence link-disjoint from p1 by construction.
std::optional<Path> ca_disjoint_path(const Topology& t, NodeId s, NodeId d,
                                     const Path& p1,
                                     const ExclusionSet& lmax_list,
                                     PathCache* cache = nullptr);

}  // namespace sdmsim
