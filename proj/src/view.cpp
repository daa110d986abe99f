#include <algorithm>

#include "dg2pix/view.hpp"

namespace dg2pix {

namespace {

std::string range(std::uint64_t a, std::uint64_t b) {
  return "[" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

void check_cap(std::size_t bars, std::size_t cap) {
  if (bars > cap)
    throw Conflict(std::to_string(bars) + " bars exceed the screen width of " + std::to_string(cap) +
                   " px; coarsen temporal intervals");
}

}  // namespace

void validate_cover(const ViewCut& view) {
  if (view.steps == 0) throw Error("view over an empty timeline");
  if (view.bars.empty()) throw Error("view has no bars");
  if (view.bars.size() > view.screen_width_px) throw Error("view exceeds its screen cap");
  std::uint64_t next = 0;
  for (const auto& iv : view.bars) {
    if (!iv.valid(view.steps)) throw Error("bar " + to_string(iv) + " is outside the timeline");
    if (iv.first_step() != next)
      throw Error("bar " + to_string(iv) + " starts at " + std::to_string(iv.first_step()) + ", expected " +
                  std::to_string(next));
    next = iv.end_step(view.steps);
  }
  if (next != view.steps) throw Error("view ends at " + std::to_string(next) + " of " + std::to_string(view.steps));
}

ViewCut uniform_view(std::uint64_t steps, std::uint32_t level, std::size_t screen_width_px) {
  if (steps == 0) throw Error("view over an empty timeline");
  if (level > top_level(steps)) throw Error("level " + std::to_string(level) + " does not exist");
  const auto count = level_count(steps, level);
  check_cap(count, screen_width_px);
  ViewCut v;
  v.steps = steps;
  v.screen_width_px = screen_width_px;
  for (std::uint64_t s = 0; s < count; ++s) v.bars.push_back({level, s});
  return v;
}

std::uint32_t default_level(std::uint64_t steps, std::size_t screen_width_px) {
  if (steps == 0) throw Error("view over an empty timeline");
  if (screen_width_px == 0) throw Error("screen width must be positive");
  const auto top = top_level(steps);
  if (steps <= screen_width_px) return (top + 1) / 2;
  std::uint32_t level = 0;
  while (level_count(steps, level) > screen_width_px) ++level;
  return level;
}

ViewCut default_view(std::uint64_t steps, std::size_t screen_width_px) {
  return uniform_view(steps, default_level(steps, screen_width_px), screen_width_px);
}

ViewCut drill(const ViewCut& view, std::size_t position) {
  if (position >= view.bars.size()) throw Conflict("bar " + std::to_string(position) + " does not exist");
  const auto iv = view.bars[position];
  if (iv.level == 0) throw Conflict("bar " + std::to_string(position) + " is already at the finest granularity");
  const auto kids = children(iv, view.steps);
  check_cap(view.bars.size() - 1 + kids.size(), view.screen_width_px);
  ViewCut out = view;
  out.bars.erase(out.bars.begin() + static_cast<std::ptrdiff_t>(position));
  out.bars.insert(out.bars.begin() + static_cast<std::ptrdiff_t>(position), kids.begin(), kids.end());
  return out;
}

ViewCut rollup(const ViewCut& view, std::span<const std::size_t> positions) {
  if (positions.empty()) throw Conflict("rollup needs at least one bar");
  std::vector<std::size_t> run(positions.begin(), positions.end());
  std::sort(run.begin(), run.end());
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (run[i] >= view.bars.size()) throw Conflict("bar " + std::to_string(run[i]) + " does not exist");
    if (i > 0 && run[i] != run[i - 1] + 1) throw Conflict("rollup bars must be a contiguous run");
  }
  const auto first = run.front();
  const auto last = run.back();
  const auto a = view.bars[first].first_step();
  const auto b = view.bars[last].end_step(view.steps);
  std::uint32_t finest = 0;
  for (auto p : run) finest = std::max(finest, view.bars[p].level);

  const auto top = top_level(view.steps);
  for (std::uint32_t level = finest + 1; level <= top; ++level) {
    const IntervalId candidate{level, a >> level};
    if (candidate.first_step() != a) break;
    const auto end = candidate.end_step(view.steps);
    if (end == b) {
      ViewCut out = view;
      out.bars.erase(out.bars.begin() + static_cast<std::ptrdiff_t>(first),
                     out.bars.begin() + static_cast<std::ptrdiff_t>(last + 1));
      out.bars.insert(out.bars.begin() + static_cast<std::ptrdiff_t>(first), candidate);
      return out;
    }
    if (end > b) break;
  }
  if (finest >= top) throw Conflict("bars already cover the coarsest interval");
  const IntervalId nearest{finest + 1, a >> (finest + 1)};
  throw Conflict("bars covering " + range(a, b) + " are not aligned to a parent interval; nearest parent " +
                 to_string(nearest) + " covers " + range(nearest.first_step(), nearest.end_step(view.steps)));
}

ViewCut set_window(const ViewCut& view, std::uint64_t t0, std::uint64_t t1) {
  if (t0 >= t1 || t1 > view.steps)
    throw Conflict("window " + range(t0, t1) + " is not inside " + range(0, view.steps));
  ViewCut out = view;
  out.window = std::make_pair(t0, t1);
  return out;
}

ViewCut clear_window(const ViewCut& view) {
  ViewCut out = view;
  out.window.reset();
  return out;
}

std::vector<std::size_t> visible_positions(const ViewCut& view) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < view.bars.size(); ++p) {
    const auto& iv = view.bars[p];
    if (!view.window || (iv.first_step() < view.window->second && iv.end_step(view.steps) > view.window->first))
      out.push_back(p);
  }
  return out;
}

}  // namespace dg2pix
