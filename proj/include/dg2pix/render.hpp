#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dg2pix/analytics.hpp"
#include "dg2pix/dyngraph.hpp"

namespace dg2pix {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  std::string hex() const;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kFrameGrey{128, 128, 128};

/// Diverging red/blue classes over the symmetric domain [-domain_max, +domain_max].
/// Classes 0..S-1 are red (0 most negative), S..2S-1 blue (2S-1 most
/// positive), and 2S is the neutral class used when domain_max is 0.
struct ColorSpec {
  int segments_per_side = 1;
  double domain_max = 1.0;
};

int class_count(const ColorSpec& spec);
int neutral_class(const ColorSpec& spec);

/// Zero maps to the innermost blue class; out-of-domain values clamp.
int colorize(double value, const ColorSpec& spec);

/// 2S + 1 colors from the ColorBrewer RdBu ramp, neutral last.
std::vector<Rgb> palette(int segments_per_side);

/// Largest |value| over all displayed columns.
double global_domain(Columns raw);

inline constexpr std::size_t kDefaultScreenWidth = 1920;

struct RenderOptions {
  int segments_per_side = 1;
  std::size_t screen_width_px = kDefaultScreenWidth;
  std::size_t cell_height_px = 2;
};

struct PixelImage {
  std::size_t columns = 0;
  std::size_t dimensions = 0;
  std::size_t bar_width_px = 1;
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  double domain_max = 0.0;
  int segments_per_side = 1;
  std::vector<int> classes;          // classes[position * d + row_position]
  std::vector<ColumnGroup> frames;   // cluster outlines, in column positions
  std::vector<Rgb> palette;
  std::vector<std::uint8_t> rgb;     // width x height x 3
  std::vector<std::uint8_t> png;

  int class_at(std::size_t position, std::size_t row_position) const {
    return classes[position * dimensions + row_position];
  }
};

/// Column `col_order[p]` is drawn at position p with its dimensions in
/// `row_order`. Frames are drawn as 1-px grey outlines. Throws Conflict
/// when the columns do not fit the screen width.
PixelImage render_pixels(Columns raw, std::span<const std::size_t> row_order, std::span<const std::size_t> col_order,
                         std::span<const ColumnGroup> frames, const RenderOptions& options = {});

/// {columns, d, classes:[[...] per column], palette:[hex...], frames:[...]}.
std::string class_matrix_json(const PixelImage& image);

/// Deterministic 8-bit RGB PNG (fixed compression, no timestamps).
std::vector<std::uint8_t> encode_png(std::size_t width, std::size_t height, std::span<const std::uint8_t> rgb);

struct ZoomRect {
  IntervalId interval;
  std::uint64_t first_step = 0;
  std::uint64_t span = 0;
  std::size_t x = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  double relative_height = 0.0;  // (level + 1) / (Lmax + 1)
};

struct ZoomBar {
  std::vector<ZoomRect> rects;  // chronological
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  std::vector<std::uint8_t> png;
};

/// One rectangle per interval, in time order regardless of input order,
/// with height proportional to (level + 1) / (Lmax + 1).
ZoomBar render_zoom_bar(std::span<const IntervalId> intervals, std::uint64_t steps, std::size_t bar_width_px,
                        std::size_t max_height_px = 32);

std::string zoom_bar_json(const ZoomBar& bar);

}  // namespace dg2pix
