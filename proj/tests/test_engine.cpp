#include <sstream>

#include <gtest/gtest.h>

#include "qperc/engine.hpp"
#include "support/oracle.hpp"

using namespace qperc;

namespace {

SpatialNetwork edges(const std::string& rows) {
  std::istringstream in("u,v,length_km\n" + rows);
  return SpatialNetwork::from_edges(parse_edge_list(in));
}

/// r0 = (4/3) eps d0 with m = 1.
RangeModel model_with_r0(double r0, double alpha = kAlphaStar) {
  RangeModel m;
  m.channel = ChannelModel(1.0, 0.75 * r0);
  m.distill = DistillationParams(1.0, alpha);
  return m;
}

const std::vector<ReductionMode> kBackends{ReductionMode::ExplicitShortcuts, ReductionMode::ShortestPath};

RunOptions with(ReductionMode mode) {
  RunOptions o;
  o.reduction = mode;
  o.audit = true;
  return o;
}

}  // namespace

TEST(Engine, TwoNodesBelowThresholdConnect) {
  const auto net = SpatialNetwork::from_edges(load_edge_list(std::string(QPERC_TEST_DATA) + "/two_node.csv"));
  for (auto mode : kBackends) {
    EXPECT_DOUBLE_EQ(percolate(net, model_with_r0(0.6), with(mode)).giant_fraction, 1.0);
    EXPECT_DOUBLE_EQ(percolate(net, model_with_r0(0.4), with(mode)).giant_fraction, 0.5);
  }
}

TEST(Engine, ConnectionCriterionIsStrict) {
  const auto m = model_with_r0(0.3);
  const auto net = edges("a,b," + detail::format_double(m.base()) + "\n");
  PercolationState s(net, m);
  EXPECT_FALSE(s.connection_ok(0, 1));
  EXPECT_TRUE(s.is_isolated(0));
  for (auto mode : kBackends) EXPECT_DOUBLE_EQ(percolate(net, m, with(mode)).giant_fraction, 0.5);
}

TEST(Engine, ConnectionUsesTheSmallerRange) {
  // a+b grows its range to 0.3 * 2^alpha ~ 0.45 while c stays at 0.3.
  const auto net = edges("a,b,0.1\nb,c,0.4\n");
  PercolationState s(net, model_with_r0(0.3));
  const auto ab = s.merge(0, 1);
  EXPECT_GT(s.component(ab).range, 0.4);
  EXPECT_FALSE(s.connection_ok(ab, 2));
  EXPECT_TRUE(s.is_isolated(2));
  EXPECT_FALSE(s.is_isolated(ab));
}

TEST(Engine, MergeTakesMinimumDistances) {
  const auto net = edges("a,b,0.1\na,c,0.5\nb,c,0.3\na,d,0.9\n");
  PercolationState s(net, model_with_r0(0.2));
  const auto ab = s.merge(0, 1);
  EXPECT_EQ(s.component(ab).size(), 2u);
  EXPECT_DOUBLE_EQ(s.component(ab).range, model_with_r0(0.2).range(2));
  EXPECT_DOUBLE_EQ(s.distance(ab, 2), 0.3);
  EXPECT_DOUBLE_EQ(s.distance(ab, 3), 0.9);
  EXPECT_FALSE(s.is_active(0));
  EXPECT_THROW(s.distance(0, 2), UsageError);
}

TEST(Engine, ReductionAddsRelayShortcuts) {
  const auto net = edges("b,a,0.5\na,c,0.6\nb,c,2.0\nc,d,0.7\n");
  PercolationState s(net, model_with_r0(0.3));
  const auto shortcuts = s.reduce_and_remove(1);
  ASSERT_EQ(shortcuts.size(), 1u);
  EXPECT_DOUBLE_EQ(shortcuts[0].before, 2.0);
  EXPECT_DOUBLE_EQ(shortcuts[0].after, 1.1);
  EXPECT_DOUBLE_EQ(s.distance(0, 2), 1.1);
  EXPECT_FALSE(s.is_active(1));
  EXPECT_EQ(s.counts().shortcuts, 1u);
}

TEST(Engine, ReductionNeverRaisesDistances) {
  const auto net = edges("b,a,0.5\na,c,0.6\nb,c,0.8\n");
  PercolationState s(net, model_with_r0(0.3));
  EXPECT_TRUE(s.reduce_and_remove(1).empty());
  EXPECT_DOUBLE_EQ(s.distance(0, 2), 0.8);
}

TEST(Engine, RuleMisuseIsRejected) {
  const auto net = edges("a,b,0.1\nb,c,0.9\n");
  PercolationState s(net, model_with_r0(0.2));
  EXPECT_THROW(s.reduce_and_remove(0), UsageError);
  EXPECT_THROW(s.merge(1, 2), UsageError);
  EXPECT_THROW(s.connection_ok(0, 0), UsageError);
  s.reduce_and_remove(2);
  EXPECT_THROW(s.reduce_and_remove(2), UsageError);
  EXPECT_THROW(s.merge(0, 2), UsageError);
}

TEST(Engine, SingleNode) {
  const auto net = SpatialNetwork::from_points(PointCloud{{{0.5, 0.5}}, 1.0, 0});
  for (auto mode : kBackends) {
    const auto r = percolate(net, model_with_r0(0.1), with(mode));
    EXPECT_DOUBLE_EQ(r.giant_fraction, 1.0);
    EXPECT_EQ(r.partition.size(), 1u);
  }
}

TEST(Engine, CoincidentPointsAreRejected) {
  const auto net = SpatialNetwork::from_points(PointCloud{{{0.5, 0.5}, {0.5, 0.5}}, 1.0, 0});
  EXPECT_THROW(PercolationState(net, model_with_r0(0.1)), ValidationError);
}

TEST(Engine, TinyAndHugeRanges) {
  const auto cloud = generate_uniform_points(60, 1.0, 5);
  const auto net = SpatialNetwork::from_points(cloud);
  for (auto mode : kBackends) {
    EXPECT_DOUBLE_EQ(percolate(net, model_with_r0(1e-6), with(mode)).giant_fraction, 1.0 / 60.0);
    EXPECT_DOUBLE_EQ(percolate(net, model_with_r0(1.3), with(mode)).giant_fraction, 1.0);
  }
}

TEST(Engine, EventLogMatchesCounts) {
  const auto net = SpatialNetwork::from_points(generate_uniform_points(80, 1.0, 2));
  for (auto mode : kBackends) {
    const auto r = percolate(net, model_with_r0(0.12), with(mode));
    std::size_t merges = 0, reduces = 0;
    for (const auto& e : r.events) (std::holds_alternative<MergeEvent>(e) ? merges : reduces)++;
    EXPECT_EQ(merges, r.counts.merges);
    EXPECT_EQ(reduces, r.counts.reductions);
    EXPECT_EQ(merges + r.partition.size(), 80u);
    EXPECT_EQ(reduces, r.partition.size());
    auto quiet = with(mode);
    quiet.record_events = false;
    const auto q = percolate(net, model_with_r0(0.12), quiet);
    EXPECT_TRUE(q.events.empty());
    EXPECT_EQ(q.partition, r.partition);
  }
}

TEST(Engine, MergedRangeFollowsSize) {
  const auto net = SpatialNetwork::from_points(generate_uniform_points(80, 1.0, 3));
  const auto m = model_with_r0(0.1);
  for (auto mode : kBackends) {
    for (const auto& e : percolate(net, m, with(mode)).events) {
      if (const auto* me = std::get_if<MergeEvent>(&e)) {
        EXPECT_DOUBLE_EQ(me->range, m.range(me->size));
      }
    }
  }
}

TEST(Engine, PolicyParsing) {
  EXPECT_EQ(parse_reduction_mode("explicit"), ReductionMode::ExplicitShortcuts);
  EXPECT_EQ(parse_reduction_mode("shortest-path"), ReductionMode::ShortestPath);
  EXPECT_EQ(parse_selection_policy("random"), SelectionPolicy::Random);
  EXPECT_THROW(parse_reduction_mode("lazy"), DomainError);
  EXPECT_THROW(parse_selection_policy("fifo"), DomainError);
}

TEST(Engine, GiantFraction) {
  EXPECT_DOUBLE_EQ(giant_fraction(Partition{{0, 1, 2}, {3}}, 4), 0.75);
  EXPECT_THROW(giant_fraction(Partition{}, 0), DomainError);
}

// Frozen 20-node cable network: blocks {n0,n1,n12,n14} and {n8,n10,n11,n13}
// are joined only through the isolated relay n6.
class Hopping : public ::testing::Test {
 protected:
  SpatialNetwork net = SpatialNetwork::from_edges(load_edge_list(std::string(QPERC_TEST_DATA) + "/hopping20.csv"));
  RangeModel model = [] {
    RangeModel m;
    m.channel = ChannelModel(1.0, 0.3);
    m.distill = DistillationParams(1.0, 0.585);
    return m;
  }();

  std::vector<std::vector<std::string>> labelled(const Partition& p) const {
    std::vector<std::vector<std::string>> out;
    for (const auto& b : p) {
      std::vector<std::string> l;
      for (auto n : b) l.push_back(net.label(n));
      std::sort(l.begin(), l.end());
      out.push_back(l);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static std::vector<std::vector<std::string>> golden(bool joined) {
    std::vector<std::vector<std::string>> p{{"n15"}, {"n16"}, {"n17", "n19"}, {"n18"}, {"n2"}, {"n3"},
                                            {"n4"},  {"n5"},  {"n6"},         {"n7"},  {"n9"}};
    if (joined) {
      p.push_back({"n0", "n1", "n10", "n11", "n12", "n13", "n14", "n8"});
    } else {
      p.push_back({"n0", "n1", "n12", "n14"});
      p.push_back({"n10", "n11", "n13", "n8"});
    }
    std::sort(p.begin(), p.end());
    return p;
  }
};

TEST_F(Hopping, JoinsThroughShortcutWithMemory) {
  for (auto mode : kBackends) {
    const auto r = percolate(net, model, with(mode));
    EXPECT_EQ(labelled(r.partition), golden(true));
    std::size_t hops = 0;
    for (const auto& e : r.events)
      if (const auto* me = std::get_if<MergeEvent>(&e); me && me->via_shortcut) {
        ++hops;
        EXPECT_EQ(me->size, 8u);
        EXPECT_NEAR(me->distance, 0.4194623770770235 + 0.420068379659155, 1e-15);
      }
    EXPECT_EQ(hops, 1u);
  }
}

TEST_F(Hopping, StaysSplitWithoutMemoryOrReduction) {
  auto classical = model;
  classical.distill = DistillationParams(1.0, 0.0);
  for (auto mode : kBackends) EXPECT_EQ(labelled(percolate(net, classical, with(mode)).partition), golden(false));
  EXPECT_EQ(labelled(qperc::testing::brute_force(net, model, false)), golden(false));
}
