#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdmsim {

using NodeId = int;
using LinkId = int;

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LinkDef {
  NodeId u;
  NodeId v;
  double length_km;
};

struct Link {
  LinkId id;
  NodeId u;  // always u < v
  NodeId v;
  double length_km;

  NodeId other(NodeId n) const { return n == u ? v : u; }
};

struct Adjacency {
  NodeId neighbor;
  LinkId link;
};

// Undirected weighted graph. Construction validates: node ids in range,
// no self-loops, at most one link per node pair, positive lengths,
// connectivity. Degree-1 nodes are legal but reported as warnings.
class Topology {
 public:
  Topology(std::string name, int node_count, const std::vector<LinkDef>& links,
           std::vector<std::string>* warnings = nullptr);

  static Topology load_json_file(const std::string& path,
                                 std::vector<std::string>* warnings = nullptr);
  static Topology parse_json(const std::string& text,
                             std::vector<std::string>* warnings = nullptr);

  const std::string& name() const { return name_; }
  int node_count() const { return node_count_; }
  int link_count() const { return static_cast<int>(links_.size()); }
  const Link& link(LinkId id) const { return links_[static_cast<size_t>(id)]; }
  std::span<const Link> links() const { return links_; }
  std::span<const Adjacency> neighbors(NodeId n) const {
    return adjacency_[static_cast<size_t>(n)];
  }
  // -1 when the pair is not directly connected.
  LinkId link_between(NodeId a, NodeId b) const;

 private:
  std::string name_;
  int node_count_;
  std::vector<Link> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
};

struct TopologyMetrics {
  double d_avg = 0.0;    // mean nodal degree, 2|E|/|V|
  double l_avg_km = 0.0; // mean link length
  std::vector<double> lbc;  // per-link betweenness share, empty unless computed
  double sigma_lbc = 0.0;   // population std dev of lbc
};

// Degree and length aggregates only (lbc left empty).
TopologyMetrics summary(const Topology& t);

// Shortest-path link betweenness: lbc[l] = sigma_l / sigma, where sigma counts
// all shortest paths over unordered node pairs (with multiplicity on ties) and
// sigma_l counts those traversing link l.
TopologyMetrics compute_lbc(const Topology& t);

}  // namespace sdmsim
