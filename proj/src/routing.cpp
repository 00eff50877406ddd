#include "sdmsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace sdmsim {

namespace {

bool nearly_equal(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// (weight, node-sequence) total order with tolerance on weight ties.
bool path_less(double wa, const std::vector<NodeId>& na, double wb,
               const std::vector<NodeId>& nb) {
  if (!nearly_equal(wa, wb)) return wa < wb;
  return std::lexicographical_compare(na.begin(), na.end(), nb.begin(),
                                      nb.end());
}

Path make_path(const Topology& t, std::vector<NodeId> nodes) {
  Path p;
  p.nodes = std::move(nodes);
  p.links.reserve(p.nodes.size() - 1);
  for (size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    LinkId l = t.link_between(p.nodes[i], p.nodes[i + 1]);
    p.links.push_back(l);
    p.length_km += t.link(l).length_km;
  }
  p.hops = static_cast<int>(p.links.size());
  return p;
}

// Dijkstra under arbitrary per-link weights with excluded links/nodes.
// Among minimum-weight paths the lexicographically smallest node sequence is
// chosen by a second pass over the shortest-path DAG in settle order.
std::optional<Path> dijkstra_lex(const Topology& t, NodeId s, NodeId d,
                                 const std::vector<char>& link_excluded,
                                 const std::vector<char>& node_excluded,
                                 std::span<const double> weights) {
  const double inf = std::numeric_limits<double>::infinity();
  const size_t n = static_cast<size_t>(t.node_count());
  if (node_excluded[static_cast<size_t>(s)] ||
      node_excluded[static_cast<size_t>(d)])
    return std::nullopt;

  auto wt = [&](LinkId l) {
    return weights.empty() ? t.link(l).length_km
                           : weights[static_cast<size_t>(l)];
  };

  std::vector<double> dist(n, inf);
  std::vector<char> settled(n, 0);
  std::vector<NodeId> order;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[static_cast<size_t>(s)] = 0.0;
  pq.emplace(0.0, s);
  while (!pq.empty()) {
    auto [dd, v] = pq.top();
    pq.pop();
    if (settled[static_cast<size_t>(v)]) continue;
    settled[static_cast<size_t>(v)] = 1;
    order.push_back(v);
    for (const Adjacency& adj : t.neighbors(v)) {
      if (link_excluded[static_cast<size_t>(adj.link)] ||
          node_excluded[static_cast<size_t>(adj.neighbor)])
        continue;
      double nd = dd + wt(adj.link);
      double& cur = dist[static_cast<size_t>(adj.neighbor)];
      if (nd < cur && !nearly_equal(nd, cur)) {
        cur = nd;
        pq.emplace(nd, adj.neighbor);
      }
    }
  }
  if (!settled[static_cast<size_t>(d)]) return std::nullopt;

  // Lexicographic reconstruction over the equal-distance relation. Full
  // candidate sequences are compared (a predecessor chain that is a prefix
  // of another must not win on prefix order alone), and sweeps repeat until
  // stable: under tied weights a node's best predecessor may settle later,
  // so one pass in settle order is not enough. Sequences only ever shrink
  // lexicographically, and the best tree is at most n deep, so n sweeps
  // suffice; tie-free queries exit after the second sweep.
  std::vector<std::vector<NodeId>> lex(n);
  lex[static_cast<size_t>(s)] = {s};
  for (size_t sweep = 0; sweep < n; ++sweep) {
    bool changed = false;
    for (NodeId v : order) {
      if (v == s) continue;
      std::vector<NodeId>& cur = lex[static_cast<size_t>(v)];
      for (const Adjacency& adj : t.neighbors(v)) {
        NodeId u = adj.neighbor;
        const std::vector<NodeId>& pred = lex[static_cast<size_t>(u)];
        if (link_excluded[static_cast<size_t>(adj.link)] ||
            node_excluded[static_cast<size_t>(u)] || pred.empty())
          continue;
        if (!nearly_equal(dist[static_cast<size_t>(u)] + wt(adj.link),
                          dist[static_cast<size_t>(v)]))
          continue;
        if (std::find(pred.begin(), pred.end(), v) != pred.end())
          continue;  // would close a zero-weight loop
        std::vector<NodeId> cand = pred;
        cand.push_back(v);
        if (cur.empty() ||
            std::lexicographical_compare(cand.begin(), cand.end(),
                                         cur.begin(), cur.end())) {
          cur = std::move(cand);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  if (lex[static_cast<size_t>(d)].empty()) return std::nullopt;
  return make_path(t, lex[static_cast<size_t>(d)]);
}

}  // namespace

ExclusionSet::ExclusionSet(std::vector<LinkId> links) : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

void ExclusionSet::add(LinkId l) {
  auto it = std::lower_bound(links_.begin(), links_.end(), l);
  if (it == links_.end() || *it != l) links_.insert(it, l);
}

void ExclusionSet::add_all(std::span<const LinkId> ls) {
  for (LinkId l : ls) add(l);
}

bool ExclusionSet::contains(LinkId l) const {
  return std::binary_search(links_.begin(), links_.end(), l);
}

size_t PathCacheKeyHash::operator()(const PathCacheKey& k) const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<uint64_t>(k.s));
  mix(static_cast<uint64_t>(k.d) << 20);
  for (LinkId l : k.excluded.links()) mix(static_cast<uint64_t>(l) + 0x9e37);
  return static_cast<size_t>(h);
}

std::optional<Path> PathCache::lookup_or_compute(
    const PathCacheKey& key,
    const std::function<std::optional<Path>()>& compute) {
  if (!enabled_) {
    ++misses_;
    return compute();
  }
  auto it = map_.find(key);
  if (it != map_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  auto val = compute();
  map_.emplace(key, val);
  return val;
}

std::optional<Path> shortest_path(const Topology& t, NodeId s, NodeId d,
                                  const ExclusionSet& excluded,
                                  std::span<const double> weights) {
  std::vector<char> link_ex(static_cast<size_t>(t.link_count()), 0);
  for (LinkId l : excluded.links()) link_ex[static_cast<size_t>(l)] = 1;
  std::vector<char> node_ex(static_cast<size_t>(t.node_count()), 0);
  return dijkstra_lex(t, s, d, link_ex, node_ex, weights);
}

std::vector<Path> yen_ksp(const Topology& t, NodeId s, NodeId d, int k) {
  std::vector<Path> a;
  if (k <= 0) return a;
  std::vector<char> no_links(static_cast<size_t>(t.link_count()), 0);
  std::vector<char> no_nodes(static_cast<size_t>(t.node_count()), 0);
  auto first = dijkstra_lex(t, s, d, no_links, no_nodes, {});
  if (!first) return a;
  a.push_back(std::move(*first));

  // Candidate pool keyed by node sequence.
  std::map<std::vector<NodeId>, Path> b;
  while (static_cast<int>(a.size()) < k) {
    const Path prev = a.back();
    for (size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      NodeId spur = prev.nodes[i];
      std::vector<NodeId> root(prev.nodes.begin(),
                               prev.nodes.begin() + static_cast<long>(i) + 1);

      std::vector<char> link_ex(static_cast<size_t>(t.link_count()), 0);
      for (const Path& p : a) {
        if (p.nodes.size() > i &&
            std::equal(root.begin(), root.end(), p.nodes.begin()))
          if (p.links.size() > i) link_ex[static_cast<size_t>(p.links[i])] = 1;
      }
      std::vector<char> node_ex(static_cast<size_t>(t.node_count()), 0);
      for (size_t r = 0; r < i; ++r)
        node_ex[static_cast<size_t>(prev.nodes[r])] = 1;

      auto spur_path = dijkstra_lex(t, spur, d, link_ex, node_ex, {});
      if (!spur_path) continue;
      std::vector<NodeId> full = root;
      full.insert(full.end(), spur_path->nodes.begin() + 1,
                  spur_path->nodes.end());
      bool in_a = false;
      for (const Path& p : a)
        if (p.nodes == full) {
          in_a = true;
          break;
        }
      if (in_a || b.count(full)) continue;
      Path cand = make_path(t, full);
      b.emplace(std::move(full), std::move(cand));
    }
    if (b.empty()) break;
    auto best = b.begin();
    for (auto it = std::next(b.begin()); it != b.end(); ++it)
      if (path_less(it->second.length_km, it->second.nodes,
                    best->second.length_km, best->second.nodes))
        best = it;
    a.push_back(std::move(best->second));
    b.erase(best);
  }
  return a;
}

std::vector<Path> k_disjoint_paths(const Topology& t, NodeId s, NodeId d,
                                   int k) {
  std::vector<Path> out;
  ExclusionSet used;
  for (int i = 0; i < k; ++i) {
    auto p = shortest_path(t, s, d, used);
    if (!p) break;
    used.add_all(p->links);
    out.push_back(std::move(*p));
  }
  return out;
}

namespace {

std::optional<Path> cached_shortest(const Topology& t, NodeId s, NodeId d,
                                    ExclusionSet excl, PathCache* cache) {
  if (!cache) return shortest_path(t, s, d, excl);
  PathCacheKey key{s, d, std::move(excl)};
  return cache->lookup_or_compute(
      key, [&] { return shortest_path(t, s, d, key.excluded); });
}

}  // namespace

LinkId max_occupancy_link(const NetworkState& state, const Path& p) {
  double best_sor = -1.0;
  LinkId lmax = p.links.front();
  for (size_t i = 0; i < p.links.size(); ++i) {
    int idx = state.directed_index(p.links[i], p.nodes[i]);
    double v = sor(state.directed(idx), state.config());
    if (v > best_sor) {
      best_sor = v;
      lmax = p.links[i];
    }
  }
  return lmax;
}

CaAlternative ca_alternative_path(const Topology& t, const NetworkState& state,
                                  NodeId s, NodeId d, const Path& prev_path,
                                  const ExclusionSet& prev_lmax,
                                  PathCache* cache) {
  LinkId lmax = max_occupancy_link(state, prev_path);
  ExclusionSet excl = prev_lmax;
  excl.add(lmax);
  return CaAlternative{cached_shortest(t, s, d, std::move(excl), cache), lmax};
}

std::optional<Path> ca_disjoint_path(const Topology& t, NodeId s, NodeId d,
                                     const Path& p1,
                                     const ExclusionSet& lmax_list,
                                     PathCache* cache) {
  ExclusionSet excl = lmax_list;
  excl.add_all(p1.links);
  return cached_shortest(t, s, d, std::move(excl), cache);
}

}  // namespace sdmsim
