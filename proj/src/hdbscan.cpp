#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "dg2pix/analytics.hpp"

namespace dg2pix {

namespace {

// Zero distances (duplicate points) would give infinite lambda; cap it.
constexpr double kMinDistance = 1e-12;

struct MergeRow {
  std::size_t left;
  std::size_t right;
  double distance;
  std::size_t size;
};

struct CondensedRow {
  std::size_t parent;
  std::size_t child;
  double lambda;
  std::size_t size;
};

std::vector<double> core_distances(std::span<const double> dist, std::size_t n, std::size_t k) {
  std::vector<double> core(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(dist.begin() + i * n, dist.begin() + (i + 1) * n, row.begin());
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    core[i] = row[k - 1];
  }
  return core;
}

// Prim on the dense mutual-reachability graph; ties go to the lowest index.
std::vector<MergeRow> minimum_spanning_tree(std::span<const double> dist, std::span<const double> core, std::size_t n) {
  std::vector<MergeRow> edges;
  edges.reserve(n - 1);
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    double next_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double mr = std::max({dist[current * n + j], core[current], core[j]});
      if (mr < best[j]) {
        best[j] = mr;
        from[j] = current;
      }
      if (best[j] < next_d || next == n) {
        next_d = best[j];
        next = j;
      }
    }
    in_tree[next] = 1;
    edges.push_back({from[next], next, next_d, 0});
    current = next;
  }
  return edges;
}

// Kruskal-order union-find producing the single-linkage dendrogram; new
// clusters are numbered n, n+1, ...
std::vector<MergeRow> single_linkage(std::vector<MergeRow> mst, std::size_t n) {
  std::stable_sort(mst.begin(), mst.end(), [](const MergeRow& a, const MergeRow& b) { return a.distance < b.distance; });
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> size(2 * n - 1, 1);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<MergeRow> rows;
  rows.reserve(n - 1);
  std::size_t next = n;
  for (const auto& e : mst) {
    const auto a = find(e.left);
    const auto b = find(e.right);
    size[next] = size[a] + size[b];
    rows.push_back({a, b, e.distance, size[next]});
    parent[a] = next;
    parent[b] = next;
    ++next;
  }
  return rows;
}

std::vector<CondensedRow> condense(const std::vector<MergeRow>& tree, std::size_t n, std::size_t min_cluster_size) {
  const std::size_t root = 2 * n - 2;
  auto size_of = [&](std::size_t node) { return node < n ? std::size_t{1} : tree[node - n].size; };
  auto leaves_under = [&](std::size_t node, std::vector<std::size_t>& out, std::vector<char>& ignore) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      ignore[x] = 1;
      if (x < n) {
        out.push_back(x);
      } else {
        stack.push_back(tree[x - n].left);
        stack.push_back(tree[x - n].right);
      }
    }
  };

  std::vector<std::size_t> relabel(2 * n - 1, 0);
  std::vector<char> ignore(2 * n - 1, 0);
  relabel[root] = n;
  std::size_t next_label = n + 1;
  std::vector<CondensedRow> out;

  std::deque<std::size_t> queue{root};
  std::vector<std::size_t> leaves;
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    if (node < n || ignore[node]) continue;
    const auto& row = tree[node - n];
    const double lambda = 1.0 / std::max(row.distance, kMinDistance);
    const auto left = row.left;
    const auto right = row.right;
    const auto lc = size_of(left);
    const auto rc = size_of(right);
    queue.push_back(left);
    queue.push_back(right);

    if (lc >= min_cluster_size && rc >= min_cluster_size) {
      relabel[left] = next_label++;
      out.push_back({relabel[node], relabel[left], lambda, lc});
      relabel[right] = next_label++;
      out.push_back({relabel[node], relabel[right], lambda, rc});
    } else if (lc < min_cluster_size && rc < min_cluster_size) {
      for (auto side : {left, right}) {
        leaves.clear();
        leaves_under(side, leaves, ignore);
        std::sort(leaves.begin(), leaves.end());
        for (auto p : leaves) out.push_back({relabel[node], p, lambda, 1});
      }
    } else {
      const bool left_small = lc < min_cluster_size;
      const auto small = left_small ? left : right;
      const auto big = left_small ? right : left;
      relabel[big] = relabel[node];
      leaves.clear();
      leaves_under(small, leaves, ignore);
      std::sort(leaves.begin(), leaves.end());
      for (auto p : leaves) out.push_back({relabel[node], p, lambda, 1});
    }
  }
  return out;
}

}  // namespace

ClusterResult hdbscan_precomputed(std::span<const double> distances, std::size_t n, const HdbscanParams& params) {
  if (distances.size() != n * n) throw Error("distance matrix is not n x n");
  if (params.min_cluster_size < 2) throw Error("min_cluster_size must be at least 2");
  ClusterResult result;
  result.min_cluster_size = params.min_cluster_size;
  result.min_samples = params.min_samples.value_or(params.min_cluster_size);
  if (result.min_samples < 1) throw Error("min_samples must be at least 1");
  result.labels.assign(n, -1);
  if (n < 2 || n < params.min_cluster_size) return result;

  const std::size_t k = std::min(result.min_samples, n);
  const auto core = core_distances(distances, n, k);
  const auto tree = single_linkage(minimum_spanning_tree(distances, core, n), n);
  const auto rows = condense(tree, n, params.min_cluster_size);

  const std::size_t root = n;
  std::size_t max_id = root;
  for (const auto& r : rows) max_id = std::max(max_id, r.child);
  const std::size_t ids = max_id + 1;

  std::vector<double> birth(ids, 0.0);
  std::vector<std::size_t> parent_of(ids, ids);
  std::vector<double> point_lambda(n, 0.0);
  std::vector<std::vector<std::size_t>> cluster_children(ids);
  for (const auto& r : rows) {
    parent_of[r.child] = r.parent;
    if (r.child < n) {
      point_lambda[r.child] = r.lambda;
    } else {
      birth[r.child] = r.lambda;
      cluster_children[r.parent].push_back(r.child);
    }
  }
  std::vector<double> stability(ids, 0.0);
  for (const auto& r : rows) stability[r.parent] += (r.lambda - birth[r.parent]) * static_cast<double>(r.size);
  const std::vector<double> own_stability = stability;

  // Excess of mass, children (higher ids) before parents; root never selectable.
  std::vector<char> selected(ids, 0);
  for (std::size_t c = root + 1; c < ids; ++c) selected[c] = 1;
  for (std::size_t c = ids; c-- > root + 1;) {
    double subtree = 0.0;
    for (auto child : cluster_children[c]) subtree += stability[child];
    if (!cluster_children[c].empty() && subtree > stability[c]) {
      selected[c] = 0;
      stability[c] = subtree;
    } else {
      std::vector<std::size_t> stack(cluster_children[c].begin(), cluster_children[c].end());
      while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        selected[x] = 0;
        stack.insert(stack.end(), cluster_children[x].begin(), cluster_children[x].end());
      }
    }
  }

  std::vector<int> label_of(ids, -1);
  for (std::size_t c = root + 1; c < ids; ++c) {
    if (!selected[c]) continue;
    label_of[c] = result.n_clusters++;
    result.stability.push_back(own_stability[c]);
  }

  if (result.n_clusters == 0) {
    // No split anywhere: the root is the only candidate. Points that stay
    // until the root's final lambda form the single cluster.
    double threshold = 0.0;
    for (const auto& r : rows)
      if (r.parent == root) threshold = std::max(threshold, r.lambda);
    for (std::size_t i = 0; i < n; ++i)
      if (point_lambda[i] >= threshold) result.labels[i] = 0;
    const auto members = static_cast<std::size_t>(std::count(result.labels.begin(), result.labels.end(), 0));
    if (members > 0) {
      result.n_clusters = 1;
      result.stability.push_back(own_stability[root]);
    }
    return result;
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = parent_of[i];
    while (c != root && c < ids && !selected[c]) c = parent_of[c];
    result.labels[i] = (c < ids && c != root) ? label_of[c] : -1;
  }
  return result;
}

ClusterResult hdbscan(Columns normalized, const HdbscanParams& params) {
  const auto dist = cosine_distance_matrix(normalized, params.exec);
  return hdbscan_precomputed(dist, normalized.size(), params);
}

}  // namespace dg2pix
