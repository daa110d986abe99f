#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dg2pix/common.hpp"
#include "dg2pix/dyngraph.hpp"

namespace dg2pix {

// ---------------------------------------------------------------------------
// Orderings

enum class RowStat { none, median, mean, min, max, variance, stddev };
enum class ColMode { time, cluster, similarity };

std::string to_string(RowStat s);
RowStat parse_row_stat(std::string_view name);
std::string to_string(ColMode m);
ColMode parse_col_mode(std::string_view name);

struct OrderingSpec {
  RowStat row_stat = RowStat::none;
  ColMode col_mode = ColMode::time;
  std::optional<IntervalId> similarity_query;  // present iff col_mode == similarity

  void validate() const;
  bool operator==(const OrderingSpec&) const = default;
};

/// A displayed matrix: each column is one embedding of d values.
using Columns = std::span<const std::span<const double>>;

/// Statistic of dimension `row` across all columns. Variance is the
/// population variance; the median of an even count averages the middle pair.
double row_statistic(Columns columns, std::size_t row, RowStat stat);

/// Ascending stable sort of the d dimensions by `stat` (raw values).
/// Returns order[position] = dimension.
std::vector<std::size_t> row_order(Columns columns, RowStat stat);

// ---------------------------------------------------------------------------
// HDBSCAN over cosine distance

struct HdbscanParams {
  std::size_t min_cluster_size = 5;
  std::optional<std::size_t> min_samples;  // defaults to min_cluster_size
  Exec exec = Exec::parallel;
};

struct ClusterResult {
  std::vector<int> labels;  // -1 = noise
  int n_clusters = 0;
  std::vector<double> stability;  // per cluster label
  std::size_t min_cluster_size = 0;
  std::size_t min_samples = 0;
};

/// 1 - a.b clamped into [0, 2]; inputs are unit (or zero) vectors.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Row-major n x n cosine distances. The parallel path splits rows.
std::vector<double> cosine_distance_matrix(Columns normalized, Exec exec = Exec::parallel);

/// Core distances (k = min_samples, counting the point itself), mutual
/// reachability, Prim MST, single-linkage tree, condensation with
/// min_cluster_size and excess-of-mass selection. When the condensed tree has
/// no split at all, the root is reported as a single cluster.
ClusterResult hdbscan_precomputed(std::span<const double> distances, std::size_t n, const HdbscanParams& params = {});
ClusterResult hdbscan(Columns normalized, const HdbscanParams& params = {});

/// Chance-corrected agreement; each distinct label (including -1) is a class.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

// ---------------------------------------------------------------------------
// Column ordering

struct Column {
  IntervalId key;
  std::span<const double> normalized;
};

/// A contiguous run of positions in the ordered display.
struct ColumnGroup {
  std::size_t begin = 0;
  std::size_t end = 0;
  int label = -1;  // cluster label, -1 for the noise group
};

struct ColumnOrder {
  std::vector<std::size_t> order;  // order[position] = column index
  std::vector<ColumnGroup> groups;  // cluster mode only
};

/// time: by first covered step, then level. cluster: noise first, then
/// clusters by median member time, members by time. similarity: query first,
/// then descending cosine similarity, ties by time.
ColumnOrder col_order(std::span<const Column> columns, ColMode mode, const ClusterResult* clusters = nullptr,
                      std::optional<IntervalId> query = std::nullopt);

/// True iff `order` is a permutation of 0..n-1.
bool is_permutation_of_range(std::span<const std::size_t> order, std::size_t n);

// ---------------------------------------------------------------------------
// Graph comparison

enum class SetClass { intersection, disjoint };

std::string to_string(SetClass c);

struct GraphComparison {
  std::vector<std::size_t> steps;  // sorted, unique
  Supergraph union_graph;
  std::vector<SetClass> node_class;  // parallel to union_graph.nodes
  std::vector<SetClass> edge_class;  // parallel to union_graph.edges
  std::size_t intersection_nodes = 0;
  std::size_t disjoint_nodes = 0;
  std::size_t intersection_edges = 0;
  std::size_t disjoint_edges = 0;
};

/// Elements present in every selected step are intersection, the rest disjoint.
GraphComparison compare_steps(const DynamicGraph& g, std::span<const std::size_t> steps);
/// Same classification over whole supergraphs (one per selected bar); counts
/// in union_graph are summed presence counts.
GraphComparison compare_supergraphs(std::span<const Supergraph* const> graphs, std::uint64_t total_steps);

// ---------------------------------------------------------------------------
// Fruchterman-Reingold layout

struct LayoutParams {
  std::uint64_t seed = 42;
  int iterations = 500;
  Exec exec = Exec::parallel;
};

struct Layout {
  std::vector<NodeId> nodes;                       // sorted
  std::vector<std::array<double, 2>> positions;  // parallel to nodes, inside [0,1]^2
  std::uint64_t seed = 0;
  int iterations = 0;

  std::optional<std::array<double, 2>> position(NodeId id) const;
};

/// Force-directed layout with k = sqrt(area / |V|) and a linearly cooling
/// temperature; the result is centered and uniformly scaled into the unit square.
Layout fr_layout(const Supergraph& global, const LayoutParams& params = {});

}  // namespace dg2pix
