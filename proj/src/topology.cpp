#include "pathprice/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pathprice {

namespace {

constexpr long long kMaxNodes = 1LL << 26;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Network::Network(int node_count, std::vector<Edge> edges, NetworkKind kind,
                 CapacityProfile profile)
    : node_count_(node_count),
      edges_(std::move(edges)),
      kind_(std::move(kind)),
      profile_(std::move(profile)),
      capacities_(static_cast<Eigen::Index>(edges_.size())) {
  if (edges_.empty()) throw ValidationError("network needs at least one edge");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id != static_cast<EdgeId>(i)) throw ValidationError("edge ids must be 0..n-1 in order");
    if (e.tail < 0 || e.tail >= node_count_ || e.head < 0 || e.head >= node_count_)
      throw ValidationError("edge " + std::to_string(i) + " has an endpoint out of range");
    if (!(e.capacity > 0.0) || !std::isfinite(e.capacity))
      throw ValidationError("edge " + std::to_string(i) + " has nonpositive capacity");
    capacities_[static_cast<Eigen::Index>(i)] = e.capacity;
  }
  if (is_tree()) {
    depth_.assign(static_cast<std::size_t>(node_count_), 0);
    const int b = tree().branching;
    for (NodeId v = 1; v < node_count_; ++v) depth_[v] = depth_[(v - 1) / b] + 1;
  }
}

const TreeKind& Network::tree() const {
  const auto* t = std::get_if<TreeKind>(&kind_);
  if (t == nullptr) throw ValidationError("network is not a tree");
  return *t;
}

int Network::node_depth(NodeId v) const {
  if (is_line()) return v;
  return depth_.at(static_cast<std::size_t>(v));
}

NodeId Network::parent(NodeId v) const {
  if (v <= 0 || v >= node_count_) throw ValidationError("node has no parent");
  if (is_line()) return v - 1;
  return (v - 1) / tree().branching;
}

int Network::edge_level(EdgeId e) const { return node_depth(edge(e).head); }

std::vector<NodeId> Network::nodes_at_depth(int depth) const {
  std::vector<NodeId> out;
  if (is_line()) {
    if (depth >= 0 && depth < node_count_) out.push_back(depth);
    return out;
  }
  const int b = tree().branching;
  if (depth < 0 || depth > tree().depth) return out;
  long long first = 0;
  long long width = 1;
  for (int d = 0; d < depth; ++d) {
    first += width;
    width *= b;
  }
  out.reserve(static_cast<std::size_t>(width));
  for (long long k = 0; k < width; ++k) out.push_back(static_cast<NodeId>(first + k));
  return out;
}

std::vector<NodeId> Network::children(NodeId v) const {
  std::vector<NodeId> out;
  if (is_line()) {
    if (v + 1 < node_count_) out.push_back(v + 1);
    return out;
  }
  const int b = tree().branching;
  for (int k = 1; k <= b; ++k) {
    const long long c = static_cast<long long>(b) * v + k;
    if (c < node_count_) out.push_back(static_cast<NodeId>(c));
  }
  return out;
}

Network build_line(int node_count, const CapacityProfile& capacities) {
  if (node_count < 2) throw ValidationError("a line needs at least 2 nodes");
  if (node_count > kMaxNodes) throw ValidationError("line too large");
  const std::size_t n_edges = static_cast<std::size_t>(node_count - 1);
  std::vector<double> caps = std::visit(
      Overloaded{
          [&](const UniformCapacity& u) { return std::vector<double>(n_edges, u.capacity); },
          [&](const ExplicitCapacity& x) {
            if (x.capacities.size() != n_edges)
              throw ValidationError("explicit capacity list must have node_count - 1 entries");
            return x.capacities;
          },
          [](const ExpDecayCapacity&) -> std::vector<double> {
            throw ValidationError("exp-decay capacities apply to trees only");
          }},
      capacities);
  std::vector<Edge> edges(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) {
    const auto id = static_cast<EdgeId>(i);
    edges[i] = Edge{id, id, id + 1, caps[i]};
  }
  return Network(node_count, std::move(edges), LineKind{}, capacities);
}

Network build_tree(int depth, int branching, const CapacityProfile& profile) {
  if (depth < 1) throw ValidationError("tree depth must be >= 1");
  if (branching < 2) throw ValidationError("tree branching must be >= 2");
  long long nodes = 1;
  long long width = 1;
  for (int d = 1; d <= depth; ++d) {
    width *= branching;
    nodes += width;
    if (nodes > kMaxNodes) throw ValidationError("tree too large");
  }
  if (std::holds_alternative<ExplicitCapacity>(profile))
    throw ValidationError("explicit capacity lists apply to lines only");

  const auto n = static_cast<int>(nodes);
  std::vector<Edge> edges(static_cast<std::size_t>(n - 1));
  std::vector<int> node_depth(static_cast<std::size_t>(n), 0);
  for (NodeId v = 1; v < n; ++v) {
    const NodeId p = (v - 1) / branching;
    node_depth[v] = node_depth[p] + 1;
    double cap = 0.0;
    if (const auto* u = std::get_if<UniformCapacity>(&profile)) {
      cap = u->capacity;
    } else {
      const auto& x = std::get<ExpDecayCapacity>(profile);
      cap = x.top / std::pow(static_cast<double>(branching), node_depth[v] - 1);
    }
    edges[static_cast<std::size_t>(v - 1)] = Edge{v - 1, p, v, cap};
  }
  return Network(n, std::move(edges), TreeKind{depth, branching}, profile);
}

Path path_between(const Network& net, NodeId s, NodeId t) {
  const int n = net.node_count();
  if (s < 0 || s >= n || t < 0 || t >= n) throw ValidationError("node id out of range");
  if (s == t) throw NoPathError("source equals destination");
  Path p;
  if (net.is_line()) {
    if (t < s) throw NoPathError("lines are directed left to right");
    for (NodeId v = s; v < t; ++v) p.edge_ids.push_back(v);
    return p;
  }
  const int ds = net.node_depth(s);
  NodeId v = t;
  while (net.node_depth(v) > ds) {
    p.edge_ids.push_back(v - 1);
    v = net.parent(v);
  }
  if (v != s) throw NoPathError("destination is not a descendant of the source");
  std::reverse(p.edge_ids.begin(), p.edge_ids.end());
  return p;
}

bool is_contiguous(const Network& net, const Path& path) {
  if (path.edge_ids.empty()) return false;
  for (std::size_t k = 0; k < path.edge_ids.size(); ++k) {
    const EdgeId e = path.edge_ids[k];
    if (e < 0 || e >= net.edge_count()) return false;
    if (k > 0 && net.edge(path.edge_ids[k - 1]).head != net.edge(e).tail) return false;
  }
  return true;
}

double capacity_ratio_beta(const Network& net) { return net.max_capacity() / net.min_capacity(); }

nlohmann::json to_json(const Network& net) {
  nlohmann::json doc;
  doc["nodes"] = net.node_count();
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : net.edges()) edges.push_back({e.tail, e.head, e.capacity});
  doc["edges"] = std::move(edges);
  if (net.is_line()) {
    doc["kind"] = {{"type", "line"}};
  } else {
    doc["kind"] = {{"type", "tree"}, {"depth", net.tree().depth}, {"branching", net.tree().branching}};
  }
  std::visit(Overloaded{[&](const UniformCapacity& u) {
                          doc["profile"] = {{"type", "uniform"}, {"capacity", u.capacity}};
                        },
                        [&](const ExplicitCapacity& x) {
                          doc["profile"] = {{"type", "explicit"}, {"capacities", x.capacities}};
                        },
                        [&](const ExpDecayCapacity& x) {
                          doc["profile"] = {{"type", "exp_decay"}, {"top", x.top}};
                        }},
             net.profile());
  return doc;
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    const auto& prof = doc.at("profile");
    const std::string ptype = prof.at("type").get<std::string>();
    CapacityProfile profile;
    if (ptype == "uniform") {
      profile = UniformCapacity{prof.at("capacity").get<double>()};
    } else if (ptype == "explicit") {
      profile = ExplicitCapacity{prof.at("capacities").get<std::vector<double>>()};
    } else if (ptype == "exp_decay") {
      profile = ExpDecayCapacity{prof.at("top").get<double>()};
    } else {
      throw ValidationError("unknown capacity profile '" + ptype + "'");
    }
    const auto& kind = doc.at("kind");
    const std::string ktype = kind.at("type").get<std::string>();
    Network net = ktype == "line"
                      ? build_line(doc.at("nodes").get<int>(), profile)
                      : build_tree(kind.at("depth").get<int>(), kind.at("branching").get<int>(), profile);
    if (doc.contains("edges") && doc.at("edges").size() != static_cast<std::size_t>(net.edge_count()))
      throw ValidationError("edge list does not match the declared topology");
    return net;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed network document: ") + ex.what());
  }
}

}  // namespace pathprice
