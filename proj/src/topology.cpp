#include "sdmsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace sdmsim {

namespace {

bool nearly_equal(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

Topology::Topology(std::string name, int node_count,
                   const std::vector<LinkDef>& links,
                   std::vector<std::string>* warnings)
    : name_(std::move(name)), node_count_(node_count) {
  if (node_count_ < 2) throw TopologyError("need at least 2 nodes");
  adjacency_.resize(static_cast<size_t>(node_count_));
  std::map<std::pair<NodeId, NodeId>, LinkId> seen;
  for (const LinkDef& def : links) {
    NodeId a = std::min(def.u, def.v), b = std::max(def.u, def.v);
    if (def.u < 0 || def.v < 0 || def.u >= node_count_ || def.v >= node_count_)
      throw TopologyError("link endpoint out of range: " + std::to_string(def.u) +
                          "-" + std::to_string(def.v));
    if (a == b)
      throw TopologyError("self-loop on node " + std::to_string(a));
    if (!(def.length_km > 0.0))
      throw TopologyError("non-positive length on link " + std::to_string(a) +
                          "-" + std::to_string(b));
    if (!seen.emplace(std::make_pair(a, b), 0).second)
      throw TopologyError("duplicate link " + std::to_string(a) + "-" +
                          std::to_string(b));
    LinkId id = static_cast<LinkId>(links_.size());
    links_.push_back(Link{id, a, b, def.length_km});
    adjacency_[static_cast<size_t>(a)].push_back(Adjacency{b, id});
    adjacency_[static_cast<size_t>(b)].push_back(Adjacency{a, id});
  }
  if (links_.empty()) throw TopologyError("no links");

  // Connectivity via BFS from node 0.
  std::vector<char> visited(static_cast<size_t>(node_count_), 0);
  std::queue<NodeId> q;
  q.push(0);
  visited[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop();
    for (const Adjacency& adj : adjacency_[static_cast<size_t>(n)]) {
      if (!visited[static_cast<size_t>(adj.neighbor)]) {
        visited[static_cast<size_t>(adj.neighbor)] = 1;
        ++reached;
        q.push(adj.neighbor);
      }
    }
  }
  if (reached != node_count_)
    throw TopologyError("graph is not connected (" + std::to_string(reached) +
                        " of " + std::to_string(node_count_) + " reachable)");

  if (warnings) {
    for (NodeId n = 0; n < node_count_; ++n) {
      if (adjacency_[static_cast<size_t>(n)].size() < 2)
        warnings->push_back("node " + std::to_string(n) + " has degree " +
                            std::to_string(adjacency_[static_cast<size_t>(n)].size()));
    }
  }
}

LinkId Topology::link_between(NodeId a, NodeId b) const {
  for (const Adjacency& adj : adjacency_[static_cast<size_t>(a)])
    if (adj.neighbor == b) return adj.link;
  return -1;
}

Topology Topology::parse_json(const std::string& text,
                              std::vector<std::string>* warnings) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("topology parse error: ") + e.what());
  }
  try {
    std::string name = j.value("name", "unnamed");
    int nodes;
    if (j.at("nodes").is_array())
      nodes = static_cast<int>(j.at("nodes").size());
    else
      nodes = j.at("nodes").get<int>();
    std::vector<LinkDef> defs;
    for (const auto& l : j.at("links"))
      defs.push_back(LinkDef{l.at("u").get<int>(), l.at("v").get<int>(),
                             l.at("length_km").get<double>()});
    return Topology(std::move(name), nodes, defs, warnings);
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("topology schema error: ") + e.what());
  }
}

Topology Topology::load_json_file(const std::string& path,
                                  std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open topology file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), warnings);
}

TopologyMetrics summary(const Topology& t) {
  TopologyMetrics m;
  m.d_avg = 2.0 * t.link_count() / t.node_count();
  double total = 0.0;
  for (const Link& l : t.links()) total += l.length_km;
  m.l_avg_km = total / t.link_count();
  return m;
}

namespace {

// Single-source shortest distances plus path multiplicities.
void sssp_counts(const Topology& t, NodeId s, std::vector<double>& dist,
                 std::vector<double>& cnt) {
  const double inf = std::numeric_limits<double>::infinity();
  dist.assign(static_cast<size_t>(t.node_count()), inf);
  cnt.assign(static_cast<size_t>(t.node_count()), 0.0);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[static_cast<size_t>(s)] = 0.0;
  pq.emplace(0.0, s);
  std::vector<char> settled(static_cast<size_t>(t.node_count()), 0);
  std::vector<NodeId> order;
  while (!pq.empty()) {
    auto [d, n] = pq.top();
    pq.pop();
    if (settled[static_cast<size_t>(n)]) continue;
    settled[static_cast<size_t>(n)] = 1;
    order.push_back(n);
    for (const Adjacency& adj : t.neighbors(n)) {
      double nd = d + t.link(adj.link).length_km;
      if (nd < dist[static_cast<size_t>(adj.neighbor)] &&
          !nearly_equal(nd, dist[static_cast<size_t>(adj.neighbor)])) {
        dist[static_cast<size_t>(adj.neighbor)] = nd;
        pq.emplace(nd, adj.neighbor);
      }
    }
  }
  // Multiplicities over the shortest-path DAG, in distance order.
  cnt[static_cast<size_t>(s)] = 1.0;
  for (NodeId v : order) {
    if (v == s) continue;
    double acc = 0.0;
    for (const Adjacency& adj : t.neighbors(v)) {
      NodeId u = adj.neighbor;
      if (nearly_equal(dist[static_cast<size_t>(u)] + t.link(adj.link).length_km,
                       dist[static_cast<size_t>(v)]))
        acc += cnt[static_cast<size_t>(u)];
    }
    cnt[static_cast<size_t>(v)] = acc;
  }
}

}  // namespace

TopologyMetrics compute_lbc(const Topology& t) {
  TopologyMetrics m = summary(t);
  int n = t.node_count();
  std::vector<std::vector<double>> dist(static_cast<size_t>(n));
  std::vector<std::vector<double>> cnt(static_cast<size_t>(n));
  for (NodeId s = 0; s < n; ++s)
    sssp_counts(t, s, dist[static_cast<size_t>(s)], cnt[static_cast<size_t>(s)]);

  double sigma = 0.0;
  for (NodeId s = 0; s < n; ++s)
    for (NodeId d = s + 1; d < n; ++d)
      sigma += cnt[static_cast<size_t>(s)][static_cast<size_t>(d)];

  m.lbc.assign(static_cast<size_t>(t.link_count()), 0.0);
  for (const Link& l : t.links()) {
    double through = 0.0;
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId d = s + 1; d < n; ++d) {
        double sd = dist[static_cast<size_t>(s)][static_cast<size_t>(d)];
        // l traversed u->v or v->u on some shortest s-d path
        if (nearly_equal(dist[static_cast<size_t>(s)][static_cast<size_t>(l.u)] +
                             l.length_km +
                             dist[static_cast<size_t>(d)][static_cast<size_t>(l.v)],
                         sd))
          through += cnt[static_cast<size_t>(s)][static_cast<size_t>(l.u)] *
                     cnt[static_cast<size_t>(d)][static_cast<size_t>(l.v)];
        if (nearly_equal(dist[static_cast<size_t>(s)][static_cast<size_t>(l.v)] +
                             l.length_km +
                             dist[static_cast<size_t>(d)][static_cast<size_t>(l.u)],
                         sd))
          through += cnt[static_cast<size_t>(s)][static_cast<size_t>(l.v)] *
                     cnt[static_cast<size_t>(d)][static_cast<size_t>(l.u)];
      }
    }
    m.lbc[static_cast<size_t>(l.id)] = through / sigma;
  }

  double mean = 0.0;
  for (double v : m.lbc) mean += v;
  mean /= m.lbc.size();
  double var = 0.0;
  for (double v : m.lbc) var += (v - mean) * (v - mean);
  m.sigma_lbc = std::sqrt(var / m.lbc.size());
  return m;
}

}  // namespace sdmsim
