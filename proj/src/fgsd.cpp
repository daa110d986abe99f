#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <omp.h>

#include "dg2pix/embed.hpp"

namespace dg2pix {

namespace {

std::vector<std::vector<std::uint32_t>> connected_components(const SimpleGraph& g) {
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<char> seen(g.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    comps.emplace_back();
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (auto u : g.adjacency[v])
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

// Pseudoinverse of a connected component's Laplacian via eigendecomposition,
// keeping 1/lambda for the non-null part (harmonic filter).
Eigen::MatrixXd laplacian_pinv(const SimpleGraph& g, const std::vector<std::uint32_t>& comp) {
  const auto m = static_cast<Eigen::Index>(comp.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  auto local = [&](std::uint32_t v) {
    return static_cast<Eigen::Index>(std::lower_bound(comp.begin(), comp.end(), v) - comp.begin());
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    for (auto u : g.adjacency[comp[i]]) {
      if (u == comp[i]) continue;  // self-loops cancel in D - A
      lap(i, local(u)) -= 1.0;
      lap(i, i) += 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  const auto& values = eig.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff());
  Eigen::VectorXd inv(m);
  for (Eigen::Index i = 0; i < m; ++i) inv(i) = values(i) > tol ? 1.0 / values(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

std::vector<double> spectral_distances(const SimpleGraph& g, double cross_component) {
  const std::size_t n = g.size();
  std::vector<double> dist(n * n, cross_component);
  for (const auto& comp : connected_components(g)) {
    const Eigen::MatrixXd pinv = laplacian_pinv(g, comp);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (std::size_t j = 0; j < comp.size(); ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double s = i == j ? 0.0 : pinv(ii, ii) + pinv(jj, jj) - 2.0 * pinv(ii, jj);
        dist[comp[i] * n + comp[j]] = std::max(0.0, s);
      }
    }
  }
  return dist;
}

std::vector<std::uint64_t> fgsd_histogram(const SimpleGraph& g, int bins, double range_max) {
  if (bins < 1) throw Error("FGSD needs at least one bin");
  if (!(range_max > 0.0)) throw Error("FGSD histogram range must be positive");
  if (g.size() == 0) throw Error("FGSD of an empty graph");
  const double width = range_max / bins;
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(bins), 0);
  for (double s : spectral_distances(g, range_max)) {
    // Values that sit on a bin edge up to rounding go to the upper bin, so the
    // counts do not depend on the eigensolver's node order.
    const double pos = s / width + 1e-7;
    const auto bin = pos >= bins ? bins - 1 : static_cast<int>(std::floor(pos));
    ++hist[static_cast<std::size_t>(bin)];
  }
  return hist;
}

Embedding fgsd(const Supergraph& sg, int bins, double range_max) {
  Embedding e;
  e.key = sg.interval;
  const auto hist = fgsd_histogram(to_simple_graph(sg), bins, range_max);
  e.raw.assign(hist.begin(), hist.end());
  e.normalized = l2_normalize(e.raw, &e.degenerate);
  return e;
}

EmbeddingMatrix fgsd(std::span<const Supergraph* const> graphs, const FgsdParams& params) {
  if (params.bins < 1) throw Error("FGSD needs at least one bin");
  if (!(params.range_max > 0.0)) throw Error("FGSD histogram range must be positive");
  EmbeddingMatrix m;
  m.method = Method::fgsd;
  m.dimensions = static_cast<std::size_t>(params.bins);
  m.hyperparameters.bins = params.bins;
  m.hyperparameters.range_max = params.range_max;
  m.rows.resize(graphs.size());
  const auto n = static_cast<std::int64_t>(graphs.size());
#pragma omp parallel for schedule(dynamic, 1) if (params.exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Supergraph& sg = *graphs[i];
    if (sg.nodes.empty()) {
      m.rows[i].key = sg.interval;
      m.rows[i].raw.assign(m.dimensions, 0.0);
      m.rows[i].normalized.assign(m.dimensions, 0.0);
      m.rows[i].degenerate = true;
    } else {
      m.rows[i] = fgsd(sg, params.bins, params.range_max);
    }
  }
  return m;
}

EmbeddingMatrix fgsd(const MultiscaleHierarchy& h, const FgsdParams& params) {
  const auto graphs = flatten(h);
  return fgsd(std::span<const Supergraph* const>(graphs), params);
}

}  // namespace dg2pix
