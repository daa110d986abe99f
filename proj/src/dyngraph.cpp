#include "dg2pix/dyngraph.hpp"

#include <algorithm>
#include <bit>
#include <omp.h>

namespace dg2pix {

Snapshot Snapshot::build(std::size_t index, std::vector<Edge> edges, std::vector<NodeId> extra_nodes) {
  Snapshot s;
  s.index = index;
  for (auto& e : edges) e.key = EdgeKey::canonical(e.key.u, e.key.v);
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.key < b.key; });

  s.edges.reserve(edges.size());
  for (const auto& e : edges) {
    if (!s.edges.empty() && s.edges.back().key == e.key) {
      s.edges.back().weight += e.weight;
      if (e.sign) s.edges.back().sign = e.sign;
    } else {
      s.edges.push_back(e);
    }
  }

  s.nodes = std::move(extra_nodes);
  s.nodes.reserve(s.nodes.size() + 2 * s.edges.size());
  for (const auto& e : s.edges) {
    s.nodes.push_back(e.key.u);
    s.nodes.push_back(e.key.v);
  }
  std::sort(s.nodes.begin(), s.nodes.end());
  s.nodes.erase(std::unique(s.nodes.begin(), s.nodes.end()), s.nodes.end());
  return s;
}

void DynamicGraph::validate() const {
  if (snapshots.empty()) throw Error("dynamic graph has no snapshots");
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& s = snapshots[i];
    if (s.index != i) throw Error("snapshot indices are not consecutive at " + std::to_string(i));
    if (!std::is_sorted(s.nodes.begin(), s.nodes.end()) ||
        std::adjacent_find(s.nodes.begin(), s.nodes.end()) != s.nodes.end())
      throw Error("snapshot " + std::to_string(i) + " node set is not sorted/unique");
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
      const auto& key = s.edges[k].key;
      if (key.u > key.v) throw Error("non-canonical edge in snapshot " + std::to_string(i));
      if (k > 0 && !(s.edges[k - 1].key < key))
        throw Error("duplicate or unsorted edge in snapshot " + std::to_string(i));
      if (!std::binary_search(s.nodes.begin(), s.nodes.end(), key.u) ||
          !std::binary_search(s.nodes.begin(), s.nodes.end(), key.v))
        throw Error("edge endpoint missing from snapshot " + std::to_string(i));
    }
    if (!std::includes(node_universe.begin(), node_universe.end(), s.nodes.begin(), s.nodes.end()))
      throw Error("node universe does not cover snapshot " + std::to_string(i));
  }
}

DynamicGraph make_dynamic_graph(std::vector<Snapshot> snapshots) {
  DynamicGraph g;
  g.snapshots = std::move(snapshots);
  for (std::size_t i = 0; i < g.snapshots.size(); ++i) {
    g.snapshots[i].index = i;
    g.node_universe.insert(g.node_universe.end(), g.snapshots[i].nodes.begin(), g.snapshots[i].nodes.end());
  }
  std::sort(g.node_universe.begin(), g.node_universe.end());
  g.node_universe.erase(std::unique(g.node_universe.begin(), g.node_universe.end()), g.node_universe.end());
  return g;
}

// ---------------------------------------------------------------------------

std::uint64_t IntervalId::end_step(std::uint64_t steps) const {
  return std::min((start + 1) << level, steps);
}

bool IntervalId::valid(std::uint64_t steps) const {
  return level <= top_level(steps) && first_step() < steps;
}

std::string to_string(IntervalId iv) {
  return "(L=" + std::to_string(iv.level) + ",s=" + std::to_string(iv.start) + ")";
}

std::uint32_t top_level(std::uint64_t steps) {
  if (steps <= 1) return 0;
  return static_cast<std::uint32_t>(std::bit_width(steps - 1));
}

std::uint64_t level_count(std::uint64_t steps, std::uint32_t level) {
  return (steps + (std::uint64_t{1} << level) - 1) >> level;
}

std::uint64_t total_supergraphs(std::uint64_t steps) {
  std::uint64_t total = 0;
  for (std::uint32_t l = 0; l <= top_level(steps); ++l) total += level_count(steps, l);
  return total;
}

std::vector<IntervalId> children(IntervalId iv, std::uint64_t steps) {
  if (!iv.valid(steps)) throw Error("interval " + to_string(iv) + " out of range");
  if (iv.level == 0) throw Error("already finest granularity");
  std::vector<IntervalId> out;
  for (std::uint64_t s : {2 * iv.start, 2 * iv.start + 1}) {
    IntervalId c{iv.level - 1, s};
    if (c.first_step() < steps) out.push_back(c);
  }
  return out;
}

std::optional<IntervalId> parent(IntervalId iv, std::uint64_t steps) {
  if (iv.level >= top_level(steps)) return std::nullopt;
  return IntervalId{iv.level + 1, iv.start / 2};
}

// ---------------------------------------------------------------------------

namespace {

template <class Key>
std::vector<Counted<Key>> merge_counted(const std::vector<Counted<Key>>& a, const std::vector<Counted<Key>>& b) {
  std::vector<Counted<Key>> out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->id < j->id) {
      out.push_back(*i++);
    } else if (j->id < i->id) {
      out.push_back(*j++);
    } else {
      out.push_back({i->id, i->count + j->count});
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), i, a.end());
  out.insert(out.end(), j, b.end());
  return out;
}

Supergraph from_snapshot(const Snapshot& s) {
  Supergraph sg;
  sg.interval = {0, s.index};
  sg.span = 1;
  sg.nodes.reserve(s.nodes.size());
  for (NodeId n : s.nodes) sg.nodes.push_back({n, 1});
  sg.edges.reserve(s.edges.size());
  for (const auto& e : s.edges) sg.edges.push_back({e.key, 1});
  return sg;
}

// Accumulates via sort-and-count so this path shares no code with merge().
Supergraph union_of(const DynamicGraph& g, std::span<const std::size_t> steps) {
  std::vector<NodeId> nodes;
  std::vector<EdgeKey> edges;
  for (std::size_t t : steps) {
    const auto& s = g.snapshots.at(t);
    nodes.insert(nodes.end(), s.nodes.begin(), s.nodes.end());
    for (const auto& e : s.edges) edges.push_back(e.key);
  }
  std::sort(nodes.begin(), nodes.end());
  std::sort(edges.begin(), edges.end());
  Supergraph sg;
  sg.span = steps.size();
  for (std::size_t i = 0; i < nodes.size();) {
    std::size_t j = i;
    while (j < nodes.size() && nodes[j] == nodes[i]) ++j;
    sg.nodes.push_back({nodes[i], static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    sg.edges.push_back({edges[i], static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  return sg;
}

}  // namespace

Supergraph supergraph(const DynamicGraph& g, IntervalId iv) {
  if (!iv.valid(g.steps())) throw Error("interval " + to_string(iv) + " out of range");
  std::vector<std::size_t> steps;
  for (auto t = iv.first_step(); t < iv.end_step(g.steps()); ++t) steps.push_back(t);
  Supergraph sg = union_of(g, steps);
  sg.interval = iv;
  return sg;
}

Supergraph supergraph_of_steps(const DynamicGraph& g, std::span<const std::size_t> steps) {
  for (auto t : steps)
    if (t >= g.steps()) throw Error("step " + std::to_string(t) + " out of range");
  std::vector<std::size_t> unique(steps.begin(), steps.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  return union_of(g, unique);
}

Supergraph merge(const Supergraph& a, const Supergraph& b, IntervalId result_interval) {
  Supergraph sg;
  sg.interval = result_interval;
  sg.span = a.span + b.span;
  sg.nodes = merge_counted(a.nodes, b.nodes);
  sg.edges = merge_counted(a.edges, b.edges);
  return sg;
}

// ---------------------------------------------------------------------------

MultiscaleHierarchy::MultiscaleHierarchy(std::uint64_t steps, std::vector<std::vector<Supergraph>> levels)
    : steps_(steps), levels_(std::move(levels)) {
  if (levels_.size() != dg2pix::top_level(steps_) + 1) throw Error("hierarchy level count mismatch");
  std::size_t offset = 0;
  for (std::uint32_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].size() != level_count(steps_, l))
      throw Error("hierarchy level " + std::to_string(l) + " has wrong supergraph count");
    level_offset_.push_back(offset);
    offset += levels_[l].size();
  }
}

std::size_t MultiscaleHierarchy::total_count() const {
  return level_offset_.empty() ? 0 : level_offset_.back() + levels_.back().size();
}

const Supergraph& MultiscaleHierarchy::at(IntervalId iv) const {
  if (!iv.valid(steps_)) throw NotFound("interval " + to_string(iv) + " not in hierarchy");
  return levels_[iv.level][iv.start];
}

std::vector<IntervalId> MultiscaleHierarchy::keys() const {
  std::vector<IntervalId> out;
  out.reserve(total_count());
  for (const auto& level : levels_)
    for (const auto& sg : level) out.push_back(sg.interval);
  return out;
}

std::size_t MultiscaleHierarchy::ordinal(IntervalId iv) const {
  if (!iv.valid(steps_)) throw NotFound("interval " + to_string(iv) + " not in hierarchy");
  return level_offset_[iv.level] + iv.start;
}

MultiscaleHierarchy build_hierarchy(const DynamicGraph& g, Exec exec) {
  const std::uint64_t T = g.steps();
  if (T == 0) throw Error("dynamic graph has no snapshots");
  const std::uint32_t top = top_level(T);
  std::vector<std::vector<Supergraph>> levels(top + 1);

  levels[0].resize(T);
  const auto n0 = static_cast<std::int64_t>(T);
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
  for (std::int64_t t = 0; t < n0; ++t) levels[0][t] = from_snapshot(g.snapshots[t]);

  for (std::uint32_t l = 1; l <= top; ++l) {
    const auto& below = levels[l - 1];
    auto& here = levels[l];
    here.resize(level_count(T, l));
    const auto n = static_cast<std::int64_t>(here.size());
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (std::int64_t s = 0; s < n; ++s) {
      const IntervalId iv{l, static_cast<std::uint64_t>(s)};
      const auto left = static_cast<std::size_t>(2 * s);
      if (left + 1 < below.size()) {
        here[s] = merge(below[left], below[left + 1], iv);
      } else {
        here[s] = below[left];
        here[s].interval = iv;
      }
    }
  }
  return MultiscaleHierarchy(T, std::move(levels));
}

MultiscaleHierarchy build_hierarchy_reference(const DynamicGraph& g) {
  const std::uint64_t T = g.steps();
  if (T == 0) throw Error("dynamic graph has no snapshots");
  std::vector<std::vector<Supergraph>> levels(top_level(T) + 1);
  for (std::uint32_t l = 0; l < levels.size(); ++l)
    for (std::uint64_t s = 0; s < level_count(T, l); ++s) levels[l].push_back(supergraph(g, {l, s}));
  return MultiscaleHierarchy(T, std::move(levels));
}

}  // namespace dg2pix
