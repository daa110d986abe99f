#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dg2pix/analytics.hpp"
#include "dg2pix/embed.hpp"

using namespace dg2pix;

namespace {

struct Matrix {
  std::vector<std::vector<double>> cols;
  std::vector<std::span<const double>> spans() const {
    return {cols.begin(), cols.end()};
  }
};

struct Fixture {
  std::size_t n = 0, mcs = 0, ms = 0;
  std::vector<double> distances;
  std::vector<int> labels;
};

Fixture load_fixture(const std::string& name) {
  std::ifstream in(std::string(DG2PIX_TEST_DATA) + "/" + name);
  EXPECT_TRUE(in) << name;
  std::string comment;
  std::getline(in, comment);
  Fixture f;
  in >> f.n >> f.mcs >> f.ms;
  f.distances.resize(f.n * f.n);
  for (auto& d : f.distances) in >> d;
  f.labels.resize(f.n);
  for (auto& l : f.labels) in >> l;
  return f;
}

// Equal up to a renaming of non-noise labels; noise must match exactly.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it, fresh] = fwd.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh2] = back.emplace(b[i], a[i]);
    if (!fresh2 && jt->second != a[i]) return false;
  }
  return true;
}

std::vector<double> unit(std::vector<double> v) { return l2_normalize(v); }

std::vector<double> jitter(const std::vector<double>& base, double eps, Rng& rng) {
  auto v = base;
  for (auto& x : v) x += rng.uniform(-eps, eps);
  return unit(v);
}

std::vector<double> random_unit(std::size_t d, Rng& rng) {
  std::vector<double> v(d);
  for (auto& x : v) x = std::sqrt(-2 * std::log(1 - rng.uniform())) * std::cos(2 * M_PI * rng.uniform());
  return unit(v);
}

Supergraph sg(std::vector<Counted<NodeId>> nodes, std::vector<Counted<EdgeKey>> edges, IntervalId iv = {0, 0}) {
  Supergraph s;
  s.interval = iv;
  s.span = iv.span(1u << 20);
  s.nodes = std::move(nodes);
  s.edges = std::move(edges);
  return s;
}

}  // namespace

TEST(RowOrder, MedianExample) {
  Matrix m{{{2, 0, 5}, {2, 0, 5}, {2, 0, 5}}};
  const auto c = m.spans();
  EXPECT_EQ(row_order(c, RowStat::median), (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(row_order(c, RowStat::none), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RowOrder, ConstantRowsKeepIndexOrder) {
  Matrix m{{{1, 7, 3}, {1, 7, 3}}};
  EXPECT_EQ(row_order(m.spans(), RowStat::stddev), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RowOrder, Statistics) {
  Matrix m{{{1}, {4}, {2}, {9}}};
  const auto c = m.spans();
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::median), 3.0);
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::mean), 4.0);
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::min), 1.0);
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::max), 9.0);
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::variance), 9.5);
  EXPECT_DOUBLE_EQ(row_statistic(c, 0, RowStat::stddev), std::sqrt(9.5));
  EXPECT_EQ(parse_row_stat(to_string(RowStat::variance)), RowStat::variance);
  EXPECT_THROW(parse_row_stat("mode"), Error);
}

TEST(ColOrder, SimilarityExample) {
  // c0 . q = 0.9, c1 . q = 0.1
  const std::vector<double> q{1, 0}, c0{0.9, std::sqrt(1 - 0.81)}, c1{0.1, std::sqrt(1 - 0.01)};
  const std::vector<Column> cols{{{0, 0}, c0}, {{0, 1}, c1}, {{0, 2}, q}};
  const auto o = col_order(cols, ColMode::similarity, nullptr, IntervalId{0, 2});
  EXPECT_EQ(o.order, (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_THROW(col_order(cols, ColMode::similarity), Error);
}

TEST(ColOrder, ClustersByMedianTime) {
  const std::vector<double> v{1.0};
  std::vector<Column> cols;
  for (std::uint64_t t : {3, 5, 10, 12}) cols.push_back({{0, t}, v});
  ClusterResult cr;
  cr.labels = {1, 1, 0, 0};  // A = {10, 12}, B = {3, 5}
  cr.n_clusters = 2;
  const auto o = col_order(cols, ColMode::cluster, &cr);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{0, 1, 2, 3}));
  ASSERT_EQ(o.groups.size(), 2u);
  EXPECT_EQ(o.groups[0].label, 1);

  cr.labels = {0, -1, 1, -1};
  const auto n = col_order(cols, ColMode::cluster, &cr);
  EXPECT_EQ(n.order, (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(n.groups.front().label, -1);
  EXPECT_EQ(n.groups.front().end, 2u);
}

TEST(ColOrder, TimeIsLevelMajorTieBreak) {
  const std::vector<double> v{1.0};
  const std::vector<Column> cols{{{1, 1}, v}, {{0, 0}, v}, {{2, 0}, v}, {{0, 1}, v}};
  const auto o = col_order(cols, ColMode::time);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{1, 2, 3, 0}));
  EXPECT_TRUE(is_permutation_of_range(o.order, 4));
  const std::vector<std::size_t> bad{0, 0, 2};
  EXPECT_FALSE(is_permutation_of_range(bad, 3));
}

TEST(Ari, SklearnValues) {
  auto ari = [](std::vector<int> a, std::vector<int> b) { return adjusted_rand_index(a, b); };
  EXPECT_NEAR(ari({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0, 1e-12);
  EXPECT_NEAR(ari({0, 0, 1, 1}, {0, 1, 0, 1}), -0.5, 1e-12);
  EXPECT_NEAR(ari({0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 2, 2}), 0.24242424242424243, 1e-12);
  EXPECT_NEAR(ari({-1, 0, 0, 1, 1, -1, 2}, {0, 0, 0, 1, 1, 1, 2}), 0.3137254901960784, 1e-12);
  EXPECT_NEAR(ari({0, 1, 2, 3}, {0, 0, 0, 0}), 0.0, 1e-12);
}

class HdbscanFixture : public ::testing::TestWithParam<const char*> {};

TEST_P(HdbscanFixture, MatchesSklearn) {
  const auto f = load_fixture(GetParam());
  HdbscanParams p;
  p.min_cluster_size = f.mcs;
  p.min_samples = f.ms;
  for (auto exec : {Exec::serial, Exec::parallel}) {
    p.exec = exec;
    const auto r = hdbscan_precomputed(f.distances, f.n, p);
    EXPECT_TRUE(same_partition(r.labels, f.labels));
  }
}

INSTANTIATE_TEST_SUITE_P(Sklearn, HdbscanFixture,
                         ::testing::Values("hdbscan_blobs3.txt", "hdbscan_blobs4.txt", "hdbscan_blobs2_ms3.txt",
                                           "hdbscan_noisy.txt"));

TEST(Hdbscan, TwoTightBlobs) {
  Rng rng(4);
  const auto a = random_unit(64, rng), b = random_unit(64, rng);
  Matrix m;
  for (int i = 0; i < 10; ++i) m.cols.push_back(jitter(a, 1e-3, rng));
  for (int i = 0; i < 10; ++i) m.cols.push_back(jitter(b, 1e-3, rng));
  const auto r = hdbscan(m.spans());
  EXPECT_EQ(r.n_clusters, 2);
  EXPECT_EQ(std::count(r.labels.begin(), r.labels.end(), -1), 0);
  EXPECT_NE(r.labels[0], r.labels[10]);
}

// Seed 2 yields two clusters with 9 noise points; sklearn agrees on the
// same distances, so the property is checked over the seed ensemble.
TEST(Hdbscan, UniformSphereHasNoFineStructure) {
  int structured = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Matrix m;
    for (int i = 0; i < 20; ++i) m.cols.push_back(random_unit(128, rng));
    const auto r = hdbscan(m.spans());
    const auto noise = std::count(r.labels.begin(), r.labels.end(), -1);
    structured += !(r.n_clusters <= 1 || 2 * noise > 20);
  }
  EXPECT_LE(structured, 1);
}

TEST(Hdbscan, IdenticalColumnsFormOneCluster) {
  Matrix m;
  for (int i = 0; i < 12; ++i) m.cols.push_back({0.6, 0.8});
  const auto r = hdbscan(m.spans());
  EXPECT_EQ(r.n_clusters, 1);
  EXPECT_EQ(r.labels, std::vector<int>(12, 0));
}

TEST(Hdbscan, TooFewPointsAreNoise) {
  Matrix m;
  for (int i = 0; i < 4; ++i) m.cols.push_back({1.0, 0.0});
  const auto r = hdbscan(m.spans());
  EXPECT_EQ(r.n_clusters, 0);
  EXPECT_EQ(r.labels, std::vector<int>(4, -1));
}

TEST(Distances, SerialMatchesParallel) {
  Rng rng(2);
  Matrix m;
  for (int i = 0; i < 40; ++i) m.cols.push_back(random_unit(16, rng));
  const auto s = cosine_distance_matrix(m.spans(), Exec::serial);
  EXPECT_EQ(s, cosine_distance_matrix(m.spans(), Exec::parallel));
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_NEAR(s[i * 40 + i], 0.0, 1e-12);
    for (std::size_t j = 0; j < 40; ++j) {
      EXPECT_EQ(s[i * 40 + j], s[j * 40 + i]);
      EXPECT_GE(s[i * 40 + j], 0.0);
      EXPECT_LE(s[i * 40 + j], 2.0);
    }
  }
}

TEST(Compare, StepsIntersectionAndDisjoint) {
  std::vector<Snapshot> snaps{Snapshot::build(0, {{{1, 2}}, {{2, 3}}}), Snapshot::build(1, {{{1, 2}}, {{3, 4}}})};
  const auto g = make_dynamic_graph(std::move(snaps));
  const std::vector<std::size_t> both{1, 0};
  const auto c = compare_steps(g, both);
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{0, 1}));
  ASSERT_EQ(c.union_graph.edges.size(), 3u);
  EXPECT_EQ(c.intersection_edges, 1u);
  EXPECT_EQ(c.disjoint_edges, 2u);
  EXPECT_EQ(c.edge_class[0], SetClass::intersection);
  EXPECT_EQ(c.intersection_nodes + c.disjoint_nodes, c.union_graph.nodes.size());
  EXPECT_EQ(c.intersection_nodes, 3u);  // 1, 2 and 3
}

TEST(Compare, SupergraphsSumPresence) {
  const auto a = sg({{1, 2}, {2, 2}}, {{{1, 2}, 2}}, {1, 0});
  const auto b = sg({{1, 1}, {3, 1}}, {{{1, 3}, 1}}, {0, 2});
  const Supergraph* gs[] = {&a, &b};
  const auto c = compare_supergraphs(gs, 3);
  EXPECT_EQ(c.steps, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(c.union_graph.nodes, (std::vector<Counted<NodeId>>{{1, 3}, {2, 2}, {3, 1}}));
  EXPECT_EQ(c.intersection_nodes, 1u);
  EXPECT_EQ(c.disjoint_edges, 2u);
}

TEST(Layout, DeterministicAndInsideUnitSquare) {
  std::vector<Counted<NodeId>> nodes;
  std::vector<Counted<EdgeKey>> edges;
  for (NodeId i = 0; i < 30; ++i) {
    nodes.push_back({i, 1});
    edges.push_back({{i, static_cast<NodeId>((i + 1) % 30)}, 1});
  }
  std::sort(edges.begin(), edges.end(), [](auto& x, auto& y) { return x.id < y.id; });
  const auto g = sg(nodes, edges);
  LayoutParams p;
  p.iterations = 100;
  const auto a = fr_layout(g, p), b = fr_layout(g, p);
  EXPECT_EQ(a.positions, b.positions);
  p.exec = Exec::serial;
  const auto s = fr_layout(g, p);
  ASSERT_EQ(s.positions.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_NEAR(s.positions[i][0], a.positions[i][0], 1e-9);
    for (double x : s.positions[i]) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
  EXPECT_TRUE(a.position(29).has_value());
  EXPECT_FALSE(a.position(99).has_value());
}

TEST(Layout, SingleNodeCentered) {
  const auto l = fr_layout(sg({{7, 1}}, {}));
  ASSERT_EQ(l.positions.size(), 1u);
  EXPECT_DOUBLE_EQ(l.positions[0][0], 0.5);
  EXPECT_DOUBLE_EQ(l.positions[0][1], 0.5);
  EXPECT_THROW(fr_layout(Supergraph{}), Error);
}

// Random matrices: orderings are permutations and only move values.
TEST(Reordering, PreservesValueMultiset) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(30), d = 1 + rng.below(12);
    Matrix m;
    std::vector<Column> cols;
    for (std::size_t i = 0; i < n; ++i) m.cols.push_back(random_unit(d, rng));
    for (std::size_t i = 0; i < n; ++i) cols.push_back({{0, i}, m.cols[i]});
    const auto rs = static_cast<RowStat>(rng.below(7));
    const auto rows = row_order(m.spans(), rs);
    ASSERT_TRUE(is_permutation_of_range(rows, d));
    const auto clusters = hdbscan(m.spans(), {std::min<std::size_t>(5, std::max<std::size_t>(2, n)), {}, Exec::serial});
    for (auto mode : {ColMode::time, ColMode::cluster, ColMode::similarity}) {
      const auto o = col_order(cols, mode, mode == ColMode::cluster ? &clusters : nullptr,
                               mode == ColMode::similarity ? std::optional<IntervalId>{{0, rng.below(n)}}
                                                           : std::nullopt);
      ASSERT_TRUE(is_permutation_of_range(o.order, n));
      std::vector<double> before, after;
      for (const auto& c : m.cols) before.insert(before.end(), c.begin(), c.end());
      for (auto ci : o.order)
        for (auto r : rows) after.push_back(m.cols[ci][r]);
      std::sort(before.begin(), before.end());
      std::sort(after.begin(), after.end());
      ASSERT_EQ(before, after);
    }
  }
}
