#ifndef PATHPRICE_TOPOLOGY_HPP
#define PATHPRICE_TOPOLOGY_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "pathprice/errors.hpp"

namespace pathprice {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  EdgeId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  double capacity = 0.0;
};

struct LineKind {};
struct TreeKind {
  int depth = 0;
  int branching = 2;
};
using NetworkKind = std::variant<LineKind, TreeKind>;

struct UniformCapacity {
  double capacity = 0.0;
};
struct ExplicitCapacity {
  std::vector<double> capacities;
};
/// Level-i edges (i >= 1, counted from the root) carry top / b^(i-1).
struct ExpDecayCapacity {
  double top = 0.0;
};
using CapacityProfile = std::variant<UniformCapacity, ExplicitCapacity, ExpDecayCapacity>;

struct Path {
  std::vector<EdgeId> edge_ids;

  int length() const { return static_cast<int>(edge_ids.size()); }
  bool operator==(const Path&) const = default;
};

/// Immutable directed network. Lines number nodes left to right; trees use
/// heap order (root 0, children of u are b*u+1 .. b*u+b) and edge k enters
/// node k+1.
class Network {
 public:
  Network(int node_count, std::vector<Edge> edges, NetworkKind kind, CapacityProfile profile);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  const NetworkKind& kind() const { return kind_; }
  const CapacityProfile& profile() const { return profile_; }
  const Eigen::VectorXd& capacities() const { return capacities_; }

  bool is_line() const { return std::holds_alternative<LineKind>(kind_); }
  bool is_tree() const { return std::holds_alternative<TreeKind>(kind_); }
  const TreeKind& tree() const;

  /// Tree helpers. Depth of the root is 0; an edge's level is the depth of its head.
  int node_depth(NodeId v) const;
  NodeId parent(NodeId v) const;
  int edge_level(EdgeId e) const;
  std::vector<NodeId> nodes_at_depth(int depth) const;
  std::vector<NodeId> children(NodeId v) const;

  double min_capacity() const { return capacities_.minCoeff(); }
  double max_capacity() const { return capacities_.maxCoeff(); }

 private:
  int node_count_;
  std::vector<Edge> edges_;
  NetworkKind kind_;
  CapacityProfile profile_;
  Eigen::VectorXd capacities_;
  std::vector<int> depth_;
};

/// A line profile is UniformCapacity or ExplicitCapacity (one entry per edge).
Network build_line(int node_count, const CapacityProfile& capacities);

/// A tree profile is UniformCapacity or ExpDecayCapacity.
Network build_tree(int depth, int branching, const CapacityProfile& profile);

/// The unique directed path from s to t. Throws NoPathError when t is not
/// reachable from s (or s == t).
Path path_between(const Network& net, NodeId s, NodeId t);

/// True when the edges chain head-to-tail and are in range.
bool is_contiguous(const Network& net, const Path& path);

/// Largest over smallest edge capacity.
double capacity_ratio_beta(const Network& net);

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

}  // namespace pathprice

#endif  // PATHPRICE_TOPOLOGY_HPP
