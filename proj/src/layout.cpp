#include <algorithm>
#include <cmath>

#include "dg2pix/analytics.hpp"
#include "dg2pix/embed.hpp"

namespace dg2pix {

std::optional<std::array<double, 2>> Layout::position(NodeId id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return std::nullopt;
  return positions[static_cast<std::size_t>(it - nodes.begin())];
}

Layout fr_layout(const Supergraph& global, const LayoutParams& params) {
  if (global.nodes.empty()) throw Error("layout of an empty graph");
  if (params.iterations < 0) throw Error("iterations must be non-negative");
  Layout layout;
  layout.seed = params.seed;
  layout.iterations = params.iterations;
  for (const auto& n : global.nodes) layout.nodes.push_back(n.id);
  const std::size_t n = layout.nodes.size();
  if (n == 1) {
    layout.positions = {{0.5, 0.5}};
    return layout;
  }

  const SimpleGraph g = to_simple_graph(global);
  std::vector<std::array<double, 2>> pos(n);
  Rng rng(params.seed);
  for (auto& p : pos) p = {rng.uniform(), rng.uniform()};

  const double k = std::sqrt(1.0 / static_cast<double>(n));
  double temperature = 0.1;
  const double cooling = temperature / (params.iterations + 1);
  std::vector<std::array<double, 2>> next(n);
  const auto rows = static_cast<std::int64_t>(n);

  for (int it = 0; it < params.iterations; ++it) {
#pragma omp parallel for schedule(static) if (params.exec == Exec::parallel)
    for (std::int64_t ii = 0; ii < rows; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double dx = 0.0, dy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double ex = pos[i][0] - pos[j][0];
        const double ey = pos[i][1] - pos[j][1];
        const double dist = std::max(std::hypot(ex, ey), 0.01);
        const double repulse = k * k / (dist * dist);
        dx += ex * repulse;
        dy += ey * repulse;
      }
      for (auto j : g.adjacency[i]) {
        if (j == i) continue;
        const double ex = pos[i][0] - pos[j][0];
        const double ey = pos[i][1] - pos[j][1];
        const double attract = std::max(std::hypot(ex, ey), 0.01) / k;
        dx -= ex * attract;
        dy -= ey * attract;
      }
      const double length = std::max(std::hypot(dx, dy), 0.01);
      next[i] = {pos[i][0] + dx * temperature / length, pos[i][1] + dy * temperature / length};
    }
    pos.swap(next);
    temperature -= cooling;
  }

  double lo_x = pos[0][0], hi_x = pos[0][0], lo_y = pos[0][1], hi_y = pos[0][1];
  for (const auto& p : pos) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  const double extent = std::max(hi_x - lo_x, hi_y - lo_y);
  const double margin = 0.05;
  const double scale = extent > 0 ? (1.0 - 2 * margin) / extent : 0.0;
  const double cx = 0.5 * (lo_x + hi_x);
  const double cy = 0.5 * (lo_y + hi_y);
  layout.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    layout.positions[i] = {0.5 + (pos[i][0] - cx) * scale, 0.5 + (pos[i][1] - cy) * scale};
  return layout;
}

}  // namespace dg2pix
