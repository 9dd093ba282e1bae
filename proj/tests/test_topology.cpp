#include <gtest/gtest.h>

#include "pathprice/topology.hpp"

using namespace pathprice;

TEST(BuildLine, UniformHundredEdges) {
  const Network net = build_line(101, UniformCapacity{100});
  ASSERT_EQ(net.edge_count(), 100);
  for (const Edge& e : net.edges()) {
    EXPECT_EQ(e.head, e.tail + 1);
    EXPECT_EQ(e.capacity, 100.0);
  }
  EXPECT_TRUE(net.is_line());
}

TEST(BuildLine, SmallestLine) {
  const Network net = build_line(2, UniformCapacity{1});
  ASSERT_EQ(net.edge_count(), 1);
  EXPECT_EQ(net.edge(0).tail, 0);
  EXPECT_EQ(net.edge(0).head, 1);
  EXPECT_EQ(net.edge(0).capacity, 1.0);
}

TEST(BuildLine, ExplicitCapacitiesGiveBeta) {
  const Network net = build_line(4, ExplicitCapacity{{1, 2, 4}});
  EXPECT_DOUBLE_EQ(capacity_ratio_beta(net), 4.0);
}

TEST(BuildLine, RejectsBadInput) {
  EXPECT_THROW(build_line(1, UniformCapacity{1}), ValidationError);
  EXPECT_THROW(build_line(3, UniformCapacity{0}), ValidationError);
  EXPECT_THROW(build_line(3, UniformCapacity{-2}), ValidationError);
  EXPECT_THROW(build_line(4, ExplicitCapacity{{1, 2}}), ValidationError);
  EXPECT_THROW(build_line(3, ExplicitCapacity{{1, 0}}), ValidationError);
}

TEST(BuildTree, ExpDecayTopLevels) {
  const Network net = build_tree(8, 2, ExpDecayCapacity{2560});
  EXPECT_EQ(net.node_count(), 511);
  EXPECT_EQ(net.edge_count(), 510);
  for (const Edge& e : net.edges()) {
    const int level = net.edge_level(e.id);
    EXPECT_EQ(e.capacity, 2560.0 / std::pow(2.0, level - 1)) << "edge " << e.id;
    if (level == 1) EXPECT_EQ(e.capacity, 2560.0);
    if (level == 2) EXPECT_EQ(e.capacity, 1280.0);
  }
  EXPECT_DOUBLE_EQ(capacity_ratio_beta(net), 128.0);
}

TEST(BuildTree, DepthOne) {
  const Network net = build_tree(1, 2, UniformCapacity{5});
  EXPECT_EQ(net.node_count(), 3);
  EXPECT_EQ(net.edge_count(), 2);
  for (const Edge& e : net.edges()) EXPECT_EQ(e.capacity, 5.0);
}

TEST(BuildTree, LevelThreeOfDecay) {
  const Network net = build_tree(3, 2, ExpDecayCapacity{8});
  for (NodeId v : net.nodes_at_depth(3)) EXPECT_EQ(net.edge(v - 1).capacity, 2.0);
}

TEST(BuildTree, BranchingThreeIsFull) {
  const Network net = build_tree(3, 3, UniformCapacity{1});
  EXPECT_EQ(net.node_count(), (27 * 3 - 1) / 2);
  EXPECT_EQ(net.edge_count(), net.node_count() - 1);
  for (int d = 0; d < 3; ++d)
    for (NodeId v : net.nodes_at_depth(d)) EXPECT_EQ(net.children(v).size(), 3u);
  for (NodeId v : net.nodes_at_depth(3)) EXPECT_TRUE(net.children(v).empty());
}

TEST(BuildTree, RejectsBadShape) {
  EXPECT_THROW(build_tree(0, 2, UniformCapacity{1}), ValidationError);
  EXPECT_THROW(build_tree(2, 1, UniformCapacity{1}), ValidationError);
  EXPECT_THROW(build_tree(2, 2, UniformCapacity{0}), ValidationError);
  EXPECT_THROW(build_tree(2, 2, ExplicitCapacity{{1, 1}}), ValidationError);
}

TEST(PathBetween, LineSegment) {
  const Network net = build_line(5, UniformCapacity{1});
  const Path p = path_between(net, 1, 4);
  EXPECT_EQ(p.edge_ids, (std::vector<EdgeId>{1, 2, 3}));
  EXPECT_EQ(p.length(), 3);
}

TEST(PathBetween, RootToLeftmostLeaf) {
  const Network net = build_tree(2, 2, UniformCapacity{1});
  const NodeId leaf = net.nodes_at_depth(2).front();
  const Path p = path_between(net, 0, leaf);
  EXPECT_EQ(p.length(), 2);
  EXPECT_EQ(net.edge(p.edge_ids.front()).tail, 0);
  EXPECT_EQ(net.edge(p.edge_ids.back()).head, leaf);
}

TEST(PathBetween, NoPathIsDistinctFromValidation) {
  const Network line = build_line(5, UniformCapacity{1});
  EXPECT_THROW(path_between(line, 3, 1), NoPathError);
  EXPECT_THROW(path_between(line, 2, 2), NoPathError);
  EXPECT_THROW(path_between(line, 0, 9), ValidationError);
  const Network tree = build_tree(2, 2, UniformCapacity{1});
  EXPECT_THROW(path_between(tree, 1, 2), NoPathError);  // siblings
  EXPECT_THROW(path_between(tree, 3, 0), NoPathError);  // upward
}

TEST(PathBetween, ContiguousAndDeterministicEverywhere) {
  const Network tree = build_tree(4, 2, UniformCapacity{1});
  for (NodeId t = 1; t < tree.node_count(); ++t) {
    NodeId s = tree.parent(t);
    while (true) {
      const Path a = path_between(tree, s, t);
      EXPECT_TRUE(is_contiguous(tree, a));
      EXPECT_EQ(tree.edge(a.edge_ids.front()).tail, s);
      EXPECT_EQ(tree.edge(a.edge_ids.back()).head, t);
      EXPECT_EQ(a, path_between(tree, s, t));
      if (s == 0) break;
      s = tree.parent(s);
    }
  }
  const Network line = build_line(12, UniformCapacity{3});
  for (NodeId s = 0; s < 12; ++s)
    for (NodeId t = s + 1; t < 12; ++t) {
      const Path a = path_between(line, s, t);
      EXPECT_TRUE(is_contiguous(line, a));
      EXPECT_EQ(a.length(), t - s);
    }
}

TEST(Network, ConstructorValidatesEdges) {
  EXPECT_THROW(Network(2, {{0, 0, 5, 1.0}}, LineKind{}, UniformCapacity{1}), ValidationError);
  EXPECT_THROW(Network(2, {{0, 0, 1, 0.0}}, LineKind{}, UniformCapacity{1}), ValidationError);
}

TEST(Network, JsonRoundTrip) {
  for (const Network& net : {build_line(6, ExplicitCapacity{{1, 2, 3, 4, 5}}),
                             build_tree(3, 2, ExpDecayCapacity{16}), build_tree(2, 3, UniformCapacity{7})}) {
    const Network back = network_from_json(to_json(net));
    ASSERT_EQ(back.edge_count(), net.edge_count());
    EXPECT_EQ(back.node_count(), net.node_count());
    EXPECT_EQ(back.is_tree(), net.is_tree());
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      EXPECT_EQ(back.edge(e).tail, net.edge(e).tail);
      EXPECT_EQ(back.edge(e).head, net.edge(e).head);
      EXPECT_EQ(back.edge(e).capacity, net.edge(e).capacity);
    }
  }
}
