#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dg2pix/common.hpp"

namespace dg2pix {

using NodeId = std::uint64_t;

/// Undirected edge in canonical orientation (u <= v).
struct EdgeKey {
  NodeId u = 0;
  NodeId v = 0;

  static EdgeKey canonical(NodeId a, NodeId b) { return a <= b ? EdgeKey{a, b} : EdgeKey{b, a}; }
  bool self_loop() const { return u == v; }
  auto operator<=>(const EdgeKey&) const = default;
};

struct Edge {
  EdgeKey key;
  double weight = 1.0;
  std::optional<int> sign;  // +1 / -1 sentiment, carried but not embedded

  bool operator==(const Edge&) const = default;
};

/// One time step. Nodes and edges are sorted and unique.
struct Snapshot {
  std::size_t index = 0;
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  std::optional<std::int64_t> wall_time;

  /// Canonicalizes and deduplicates edges (parallel edges sum their weight,
  /// the last seen sign wins) and adds every endpoint plus `extra_nodes`.
  static Snapshot build(std::size_t index, std::vector<Edge> edges,
                        std::vector<NodeId> extra_nodes = {});
};

struct DynamicGraph {
  std::vector<Snapshot> snapshots;
  std::vector<NodeId> node_universe;  // sorted
  std::map<NodeId, std::string> labels;

  std::size_t steps() const { return snapshots.size(); }

  /// Throws Error if any structural invariant is broken.
  void validate() const;
};

/// Reindexes snapshots 0..T-1 and computes the node universe.
DynamicGraph make_dynamic_graph(std::vector<Snapshot> snapshots);

// ---------------------------------------------------------------------------
// Dyadic intervals. Level L covers steps [start * 2^L, min((start+1) * 2^L, T)).

struct IntervalId {
  std::uint32_t level = 0;
  std::uint64_t start = 0;

  std::uint64_t first_step() const { return start << level; }
  std::uint64_t end_step(std::uint64_t steps) const;
  std::uint64_t span(std::uint64_t steps) const { return end_step(steps) - first_step(); }
  bool valid(std::uint64_t steps) const;

  auto operator<=>(const IntervalId&) const = default;
};

std::string to_string(IntervalId iv);

/// ceil(log2 T); 0 when T == 1.
std::uint32_t top_level(std::uint64_t steps);
/// ceil(T / 2^L).
std::uint64_t level_count(std::uint64_t steps, std::uint32_t level);
/// Sum of level_count over all levels.
std::uint64_t total_supergraphs(std::uint64_t steps);

/// The one or two intervals one level down covering the same steps.
std::vector<IntervalId> children(IntervalId iv, std::uint64_t steps);
/// Enclosing interval one level up; nullopt at the top level.
std::optional<IntervalId> parent(IntervalId iv, std::uint64_t steps);

template <class Key>
struct Counted {
  Key id{};
  std::uint32_t count = 0;
  bool operator==(const Counted&) const = default;
};

/// Union of nodes and edges over the steps of one interval, with the number
/// of covered steps each element is present in.
struct Supergraph {
  IntervalId interval;
  std::uint64_t span = 0;
  std::vector<Counted<NodeId>> nodes;   // sorted by id
  std::vector<Counted<EdgeKey>> edges;  // sorted by key

  bool operator==(const Supergraph&) const = default;
};

Supergraph supergraph(const DynamicGraph& g, IntervalId iv);
/// Union over an arbitrary set of steps (used for comparisons).
Supergraph supergraph_of_steps(const DynamicGraph& g, std::span<const std::size_t> steps);
/// Sorted merge of two disjoint-interval supergraphs, summing counts.
Supergraph merge(const Supergraph& a, const Supergraph& b, IntervalId result_interval);

class MultiscaleHierarchy {
 public:
  MultiscaleHierarchy() = default;
  MultiscaleHierarchy(std::uint64_t steps, std::vector<std::vector<Supergraph>> levels);

  std::uint64_t steps() const { return steps_; }
  std::uint32_t top_level() const { return static_cast<std::uint32_t>(levels_.size() - 1); }
  std::size_t total_count() const;
  const std::vector<std::vector<Supergraph>>& levels() const { return levels_; }
  const std::vector<Supergraph>& level(std::uint32_t l) const { return levels_.at(l); }
  const Supergraph& at(IntervalId iv) const;

  /// All interval ids, level-major then by start.
  std::vector<IntervalId> keys() const;
  /// Position of `iv` in keys() order.
  std::size_t ordinal(IntervalId iv) const;

 private:
  std::uint64_t steps_ = 0;
  std::vector<std::vector<Supergraph>> levels_;
  std::vector<std::size_t> level_offset_;
};

/// Bottom-up construction: level L is merged pairwise from level L-1.
/// The parallel path merges each level's supergraphs concurrently.
MultiscaleHierarchy build_hierarchy(const DynamicGraph& g, Exec exec = Exec::parallel);

/// Serial reference: every supergraph is recomputed directly from its snapshots.
MultiscaleHierarchy build_hierarchy_reference(const DynamicGraph& g);

// ---------------------------------------------------------------------------
// Edge-list ingestion / export, hierarchy binary format.

struct IngestConfig {
  enum class Mode { indexed, timed };
  Mode mode = Mode::indexed;
  std::int64_t bucket_seconds = 3600;  // timed mode only
};

/// Lines `t,src,dst[,weight[,sign]]`; `#` starts a comment.
DynamicGraph ingest_edge_list(std::istream& in, const IngestConfig& config = {});
DynamicGraph ingest_edge_list_file(const std::string& path, const IngestConfig& config = {});

/// Writes one line per canonical edge with t = snapshot index.
void export_edge_list(std::ostream& out, const DynamicGraph& g);

inline constexpr std::uint16_t kHierarchyFormatVersion = 1;

void write_hierarchy(std::ostream& out, const MultiscaleHierarchy& h);
MultiscaleHierarchy read_hierarchy(std::istream& in);

}  // namespace dg2pix
