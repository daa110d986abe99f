#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dg2pix/dyngraph.hpp"

namespace dg2pix {

inline constexpr std::size_t kDefaultBarCap = 400;
inline constexpr std::size_t kMaxBarCap = 1920;

/// Mixed-granularity cover of [0, T) shown as pixel-bars, plus an optional
/// display window [t0, t1) that hides bars without changing the cut.
struct ViewCut {
  std::uint64_t steps = 0;
  std::vector<IntervalId> bars;  // chronological
  std::size_t screen_width_px = kDefaultBarCap;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> window;

  bool operator==(const ViewCut&) const = default;
};

/// Throws Error unless bars are valid, chronological and cover [0, T)
/// exactly once within the screen cap.
void validate_cover(const ViewCut& view);

ViewCut uniform_view(std::uint64_t steps, std::uint32_t level, std::size_t screen_width_px);

/// The medium level ceil(Lmax/2) when every step fits on screen, otherwise
/// the finest level whose bar count fits.
std::uint32_t default_level(std::uint64_t steps, std::size_t screen_width_px);
ViewCut default_view(std::uint64_t steps, std::size_t screen_width_px = kDefaultBarCap);

/// Replaces bar `position` by its children. Conflict at level 0 or when
/// the result would exceed the screen cap.
ViewCut drill(const ViewCut& view, std::size_t position);

/// Replaces a contiguous run of bars by the interval that covers exactly
/// their steps. Conflict when no such interval exists.
ViewCut rollup(const ViewCut& view, std::span<const std::size_t> positions);

/// Conflict unless 0 <= t0 < t1 <= T.
ViewCut set_window(const ViewCut& view, std::uint64_t t0, std::uint64_t t1);
ViewCut clear_window(const ViewCut& view);

/// Positions of bars overlapping the window (all bars without one).
std::vector<std::size_t> visible_positions(const ViewCut& view);

}  // namespace dg2pix
