#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dg2pix/analytics.hpp"

namespace dg2pix {

std::string to_string(RowStat s) {
  switch (s) {
    case RowStat::none: return "none";
    case RowStat::median: return "median";
    case RowStat::mean: return "mean";
    case RowStat::min: return "min";
    case RowStat::max: return "max";
    case RowStat::variance: return "variance";
    case RowStat::stddev: return "std";
  }
  return "none";
}

RowStat parse_row_stat(std::string_view name) {
  for (auto s : {RowStat::none, RowStat::median, RowStat::mean, RowStat::min, RowStat::max, RowStat::variance,
                 RowStat::stddev})
    if (to_string(s) == name) return s;
  throw Error("unknown row statistic '" + std::string(name) + "'");
}

std::string to_string(ColMode m) {
  switch (m) {
    case ColMode::time: return "time";
    case ColMode::cluster: return "cluster";
    case ColMode::similarity: return "similarity";
  }
  return "time";
}

ColMode parse_col_mode(std::string_view name) {
  for (auto m : {ColMode::time, ColMode::cluster, ColMode::similarity})
    if (to_string(m) == name) return m;
  throw Error("unknown column mode '" + std::string(name) + "'");
}

void OrderingSpec::validate() const {
  if ((col_mode == ColMode::similarity) != similarity_query.has_value())
    throw Error("a similarity query is required exactly when col_mode is similarity");
}

double row_statistic(Columns columns, std::size_t row, RowStat stat) {
  if (columns.empty()) throw Error("row statistic of an empty matrix");
  std::vector<double> v;
  v.reserve(columns.size());
  for (const auto& c : columns) v.push_back(c[row]);
  const auto n = static_cast<double>(v.size());
  switch (stat) {
    case RowStat::none: return 0.0;
    case RowStat::min: return *std::min_element(v.begin(), v.end());
    case RowStat::max: return *std::max_element(v.begin(), v.end());
    case RowStat::median: {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size() / 2;
      return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    }
    case RowStat::mean: return std::accumulate(v.begin(), v.end(), 0.0) / n;
    case RowStat::variance:
    case RowStat::stddev: {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double var = ss / n;
      return stat == RowStat::variance ? var : std::sqrt(var);
    }
  }
  return 0.0;
}

std::vector<std::size_t> row_order(Columns columns, RowStat stat) {
  if (columns.empty()) throw Error("row ordering needs at least one column");
  const std::size_t d = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != d) throw Error("columns have different dimensions");
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  if (stat == RowStat::none) return order;
  std::vector<double> key(d);
  for (std::size_t r = 0; r < d; ++r) key[r] = row_statistic(columns, r, stat);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return order;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::clamp(1.0 - s, 0.0, 2.0);
}

std::vector<double> cosine_distance_matrix(Columns normalized, Exec exec) {
  const std::size_t n = normalized.size();
  std::vector<double> dist(n * n, 0.0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dist[static_cast<std::size_t>(i) * n + j] =
          static_cast<std::size_t>(i) == j ? 0.0 : cosine_distance(normalized[i], normalized[j]);
  return dist;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("label vectors differ in length");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ca;
  std::map<int, double> cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [k, c] : joint) index += pairs(c);
  for (const auto& [k, c] : ca) sum_a += pairs(c);
  for (const auto& [k, c] : cb) sum_b += pairs(c);
  const double expected = sum_a * sum_b / pairs(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

// ---------------------------------------------------------------------------

namespace {

bool time_less(IntervalId a, IntervalId b) {
  if (a.first_step() != b.first_step()) return a.first_step() < b.first_step();
  return a.level < b.level;
}

void sort_by_time(std::vector<std::size_t>& idx, std::span<const Column> columns) {
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return time_less(columns[x].key, columns[y].key); });
}

}  // namespace

bool is_permutation_of_range(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (auto i : order) {
    if (i >= n || seen[i]) return false;
    seen[i] = 1;
  }
  return true;
}

ColumnOrder col_order(std::span<const Column> columns, ColMode mode, const ClusterResult* clusters,
                      std::optional<IntervalId> query) {
  ColumnOrder out;
  std::vector<std::size_t> all(columns.size());
  std::iota(all.begin(), all.end(), 0);

  switch (mode) {
    case ColMode::time: {
      sort_by_time(all, columns);
      out.order = std::move(all);
      break;
    }
    case ColMode::cluster: {
      if (!clusters) throw Error("cluster ordering requires a clustering result");
      if (clusters->labels.size() != columns.size()) throw Error("clustering result does not match the columns");
      std::map<int, std::vector<std::size_t>> members;
      for (std::size_t i = 0; i < columns.size(); ++i) members[clusters->labels[i]].push_back(i);
      for (auto& [label, idx] : members) sort_by_time(idx, columns);

      auto median_time = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> t;
        for (auto i : idx) t.push_back(static_cast<double>(columns[i].key.first_step()));
        std::sort(t.begin(), t.end());
        const std::size_t m = t.size() / 2;
        return t.size() % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
      };
      std::vector<std::pair<double, int>> cluster_keys;
      for (const auto& [label, idx] : members)
        if (label >= 0) cluster_keys.emplace_back(median_time(idx), label);
      std::sort(cluster_keys.begin(), cluster_keys.end());

      auto append = [&](int label) {
        const auto& idx = members[label];
        out.groups.push_back({out.order.size(), out.order.size() + idx.size(), label});
        out.order.insert(out.order.end(), idx.begin(), idx.end());
      };
      if (members.count(-1)) append(-1);
      for (const auto& [t, label] : cluster_keys) append(label);
      break;
    }
    case ColMode::similarity: {
      if (!query) throw Error("similarity ordering requires a query embedding");
      auto q = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.key == *query; });
      if (q == columns.end()) throw Error("query " + to_string(*query) + " is not among the displayed columns");
      const auto qi = static_cast<std::size_t>(q - columns.begin());
      std::vector<double> sim(columns.size());
      for (std::size_t i = 0; i < columns.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < columns[i].normalized.size(); ++k) s += columns[i].normalized[k] * q->normalized[k];
        sim[i] = s;
      }
      std::vector<std::size_t> rest;
      for (auto i : all)
        if (i != qi) rest.push_back(i);
      sort_by_time(rest, columns);
      std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
      out.order.push_back(qi);
      out.order.insert(out.order.end(), rest.begin(), rest.end());
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(SetClass c) { return c == SetClass::intersection ? "intersection" : "disjoint"; }

GraphComparison compare_steps(const DynamicGraph& g, std::span<const std::size_t> steps) {
  if (steps.empty()) throw Error("graph comparison needs at least one selected step");
  GraphComparison cmp;
  cmp.steps.assign(steps.begin(), steps.end());
  std::sort(cmp.steps.begin(), cmp.steps.end());
  cmp.steps.erase(std::unique(cmp.steps.begin(), cmp.steps.end()), cmp.steps.end());
  cmp.union_graph = supergraph_of_steps(g, cmp.steps);
  const auto all = static_cast<std::uint32_t>(cmp.steps.size());
  for (const auto& n : cmp.union_graph.nodes) {
    const bool in_all = n.count == all;
    cmp.node_class.push_back(in_all ? SetClass::intersection : SetClass::disjoint);
    ++(in_all ? cmp.intersection_nodes : cmp.disjoint_nodes);
  }
  for (const auto& e : cmp.union_graph.edges) {
    const bool in_all = e.count == all;
    cmp.edge_class.push_back(in_all ? SetClass::intersection : SetClass::disjoint);
    ++(in_all ? cmp.intersection_edges : cmp.disjoint_edges);
  }
  return cmp;
}

GraphComparison compare_supergraphs(std::span<const Supergraph* const> graphs, std::uint64_t total_steps) {
  if (graphs.empty()) throw Error("graph comparison needs at least one selected bar");
  std::map<NodeId, std::pair<std::uint32_t, std::uint32_t>> nodes;  // id -> (presence sum, bars)
  std::map<EdgeKey, std::pair<std::uint32_t, std::uint32_t>> edges;
  GraphComparison cmp;
  for (const auto* sg : graphs) {
    for (auto s = sg->interval.first_step(); s < sg->interval.end_step(total_steps); ++s) cmp.steps.push_back(s);
    for (const auto& n : sg->nodes) {
      auto& e = nodes[n.id];
      e.first += n.count;
      ++e.second;
    }
    for (const auto& x : sg->edges) {
      auto& e = edges[x.id];
      e.first += x.count;
      ++e.second;
    }
  }
  std::sort(cmp.steps.begin(), cmp.steps.end());
  cmp.steps.erase(std::unique(cmp.steps.begin(), cmp.steps.end()), cmp.steps.end());
  cmp.union_graph.interval = graphs.front()->interval;
  cmp.union_graph.span = cmp.steps.size();
  const auto all = static_cast<std::uint32_t>(graphs.size());
  for (const auto& [id, c] : nodes) {
    cmp.union_graph.nodes.push_back({id, c.first});
    const bool in_all = c.second == all;
    cmp.node_class.push_back(in_all ? SetClass::intersection : SetClass::disjoint);
    ++(in_all ? cmp.intersection_nodes : cmp.disjoint_nodes);
  }
  for (const auto& [id, c] : edges) {
    cmp.union_graph.edges.push_back({id, c.first});
    const bool in_all = c.second == all;
    cmp.edge_class.push_back(in_all ? SetClass::intersection : SetClass::disjoint);
    ++(in_all ? cmp.intersection_edges : cmp.disjoint_edges);
  }
  return cmp;
}

}  // namespace dg2pix
