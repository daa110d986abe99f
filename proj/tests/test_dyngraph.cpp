#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dg2pix/dyngraph.hpp"

using namespace dg2pix;

namespace {

DynamicGraph parse(const std::string& text, IngestConfig cfg = {}) {
  std::istringstream in(text);
  return ingest_edge_list(in, cfg);
}

std::vector<EdgeKey> keys(const Snapshot& s) {
  std::vector<EdgeKey> out;
  for (const auto& e : s.edges) out.push_back(e.key);
  return out;
}

DynamicGraph random_graph(std::size_t steps, std::size_t nodes, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<Edge> edges;
    for (NodeId a = 0; a < nodes; ++a)
      for (NodeId b = a + 1; b < nodes; ++b)
        if (rng.bernoulli(p)) edges.push_back({{a, b}});
    snaps.push_back(Snapshot::build(t, std::move(edges)));
  }
  return make_dynamic_graph(std::move(snaps));
}

}  // namespace

TEST(Ingest, IndexedBucketing) {
  const auto g = parse("0,1,2\n0,2,3\n1,1,2\n");
  ASSERT_EQ(g.steps(), 2u);
  EXPECT_EQ(keys(g.snapshots[0]), (std::vector<EdgeKey>{{1, 2}, {2, 3}}));
  EXPECT_EQ(keys(g.snapshots[1]), (std::vector<EdgeKey>{{1, 2}}));
  EXPECT_EQ(g.node_universe, (std::vector<NodeId>{1, 2, 3}));
}

TEST(Ingest, SelfLoopRetained) {
  const auto g = parse("0,1,1\n");
  ASSERT_EQ(g.steps(), 1u);
  EXPECT_EQ(keys(g.snapshots[0]), (std::vector<EdgeKey>{{1, 1}}));
  EXPECT_EQ(g.snapshots[0].nodes, (std::vector<NodeId>{1}));
}

TEST(Ingest, TimedBoundary) {
  IngestConfig cfg;
  cfg.mode = IngestConfig::Mode::timed;
  cfg.bucket_seconds = 3600;
  const auto g = parse("0,1,2\n3599,2,3\n3600,3,4\n", cfg);
  ASSERT_EQ(g.steps(), 2u);
  EXPECT_EQ(g.snapshots[0].edges.size(), 2u);
  EXPECT_EQ(g.snapshots[1].edges.size(), 1u);
}

TEST(Ingest, EmptyBucketsBecomeEmptySnapshots) {
  const auto g = parse("0,1,2\n3,2,3\n");
  ASSERT_EQ(g.steps(), 4u);
  EXPECT_TRUE(g.snapshots[1].edges.empty());
  EXPECT_TRUE(g.snapshots[2].edges.empty());
}

TEST(Ingest, CommentsWeightsSigns) {
  const auto g = parse("# header\n0,2,1,2.5,-1\n0,1,2,0.5\n\n");
  ASSERT_EQ(g.snapshots[0].edges.size(), 1u);
  const auto& e = g.snapshots[0].edges[0];
  EXPECT_EQ(e.key, (EdgeKey{1, 2}));
  EXPECT_DOUBLE_EQ(e.weight, 3.0);
  EXPECT_EQ(e.sign, -1);
}

TEST(Ingest, ErrorsCarryLineNumbers) {
  try {
    parse("0,1,2\n0,x,3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("0,1\n"), ParseError);
  EXPECT_THROW(parse("-1,1,2\n"), ParseError);
  EXPECT_THROW(parse("# nothing\n"), Error);
}

TEST(Ingest, ExportRoundTrip) {
  const auto g = random_graph(7, 12, 0.3, 5);
  std::ostringstream out;
  export_edge_list(out, g);
  const auto back = parse(out.str());
  ASSERT_EQ(back.steps(), g.steps());
  for (std::size_t t = 0; t < g.steps(); ++t) EXPECT_EQ(keys(back.snapshots[t]), keys(g.snapshots[t]));
}

TEST(Intervals, LevelCounts) {
  EXPECT_EQ(top_level(1000), 10u);
  const std::vector<std::uint64_t> expected{1000, 500, 250, 125, 63, 32, 16, 8, 4, 2, 1};
  for (std::uint32_t l = 0; l <= 10; ++l) EXPECT_EQ(level_count(1000, l), expected[l]);
  EXPECT_EQ(total_supergraphs(1000), 2001u);
  EXPECT_EQ(top_level(1), 0u);
  EXPECT_EQ(total_supergraphs(1), 1u);
  EXPECT_EQ(top_level(8), 3u);
  EXPECT_EQ(total_supergraphs(8), 15u);
}

TEST(Intervals, Children) {
  EXPECT_EQ(children({1, 0}, 4), (std::vector<IntervalId>{{0, 0}, {0, 1}}));
  const auto clipped = children({2, 0}, 3);
  EXPECT_EQ(clipped, (std::vector<IntervalId>{{1, 0}, {1, 1}}));
  EXPECT_EQ(clipped[1].span(3), 1u);
  EXPECT_EQ(children({1, 1}, 3), (std::vector<IntervalId>{{0, 2}}));
  try {
    children({0, 0}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("finest granularity"), std::string::npos);
  }
  EXPECT_EQ(parent({0, 3}, 4), (IntervalId{1, 1}));
  EXPECT_FALSE(parent({2, 0}, 4).has_value());
}

TEST(Supergraph, Examples) {
  std::vector<Snapshot> same{Snapshot::build(0, {{{1, 2}}, {{2, 3}}}), Snapshot::build(1, {{{1, 2}}, {{2, 3}}})};
  const auto g = make_dynamic_graph(same);
  const auto sg = supergraph(g, {1, 0});
  EXPECT_EQ(sg.span, 2u);
  for (const auto& n : sg.nodes) EXPECT_EQ(n.count, 2u);
  for (const auto& e : sg.edges) EXPECT_EQ(e.count, 2u);

  const auto h = make_dynamic_graph({Snapshot::build(0, {{{0, 1}}}), Snapshot::build(1, {{{1, 2}}})});
  const auto u = supergraph(h, {1, 0});
  EXPECT_EQ(u.edges, (std::vector<Counted<EdgeKey>>{{{0, 1}, 1}, {{1, 2}, 1}}));
  EXPECT_EQ(u.nodes, (std::vector<Counted<NodeId>>{{0, 1}, {1, 2}, {2, 1}}));

  const auto leaf = supergraph(h, {0, 1});
  EXPECT_EQ(leaf.edges, (std::vector<Counted<EdgeKey>>{{{1, 2}, 1}}));
  EXPECT_THROW(supergraph(h, {0, 2}), Error);
}

TEST(Hierarchy, T1000Counts) {
  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < 1000; ++t) snaps.push_back(Snapshot::build(t, {{{t % 7, t % 7 + 1}}}));
  const auto h = build_hierarchy(make_dynamic_graph(std::move(snaps)));
  EXPECT_EQ(h.top_level(), 10u);
  EXPECT_EQ(h.total_count(), 2001u);
  const std::vector<std::size_t> expected{1000, 500, 250, 125, 63, 32, 16, 8, 4, 2, 1};
  for (std::uint32_t l = 0; l <= 10; ++l) EXPECT_EQ(h.level(l).size(), expected[l]);
}

// Every supergraph equals the direct union of its level-0 descendants.
TEST(Hierarchy, ExhaustiveReconstructionUpTo64) {
  for (std::size_t T = 1; T <= 64; ++T) {
    const auto g = random_graph(T, 8, 0.25, 100 + T);
    const auto fast = build_hierarchy(g, Exec::parallel);
    const auto serial = build_hierarchy(g, Exec::serial);
    const auto ref = build_hierarchy_reference(g);
    ASSERT_EQ(fast.total_count(), total_supergraphs(T)) << "T=" << T;
    ASSERT_EQ(fast.levels(), ref.levels()) << "T=" << T;
    ASSERT_EQ(serial.levels(), ref.levels()) << "T=" << T;
    for (std::size_t t = 0; t < T; ++t) {
      const auto& sg = fast.at({0, t});
      ASSERT_EQ(sg.nodes.size(), g.snapshots[t].nodes.size());
      ASSERT_EQ(sg.edges.size(), g.snapshots[t].edges.size());
    }
  }
}

TEST(Hierarchy, ParentCountsAreChildSums) {
  const auto g = random_graph(13, 10, 0.3, 9);
  const auto h = build_hierarchy(g);
  for (std::uint32_t l = 1; l <= h.top_level(); ++l)
    for (const auto& sg : h.level(l)) {
      std::map<EdgeKey, std::uint32_t> sum;
      for (const auto& c : children(sg.interval, g.steps()))
        for (const auto& e : h.at(c).edges) sum[e.id] += e.count;
      std::map<EdgeKey, std::uint32_t> got;
      for (const auto& e : sg.edges) got[e.id] = e.count;
      EXPECT_EQ(got, sum);
    }
}

TEST(Hierarchy, KeysAndOrdinal) {
  const auto h = build_hierarchy(random_graph(5, 6, 0.4, 3));
  const auto k = h.keys();
  ASSERT_EQ(k.size(), h.total_count());
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(h.ordinal(k[i]), i);
  EXPECT_THROW(h.at({0, 5}), NotFound);
}

TEST(Hierarchy, BinaryRoundTrip) {
  const auto h = build_hierarchy(random_graph(11, 9, 0.3, 4));
  std::stringstream buf;
  write_hierarchy(buf, h);
  const auto bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 7), std::string("DG2PIX\0", 7));
  const auto back = read_hierarchy(buf);
  EXPECT_EQ(back.steps(), h.steps());
  EXPECT_EQ(back.levels(), h.levels());

  std::stringstream bad(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(read_hierarchy(bad), Error);
}
