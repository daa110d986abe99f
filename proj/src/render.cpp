#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "dg2pix/render.hpp"

namespace dg2pix {

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

int class_count(const ColorSpec& spec) { return 2 * spec.segments_per_side + 1; }
int neutral_class(const ColorSpec& spec) { return 2 * spec.segments_per_side; }

int colorize(double value, const ColorSpec& spec) {
  if (spec.segments_per_side < 1) throw Error("segments_per_side must be at least 1");
  if (!std::isfinite(value)) throw Error("cannot colorize a non-finite value");
  if (!(spec.domain_max > 0.0)) return neutral_class(spec);
  const int s = spec.segments_per_side;
  const double scaled = std::abs(value) / spec.domain_max * s;
  const int segment = scaled >= s ? s - 1 : static_cast<int>(std::floor(scaled));
  return value < 0 ? s - 1 - segment : s + segment;
}

namespace {

// RdBu anchors from the neutral midpoint outwards.
constexpr std::array<Rgb, 6> kRedRamp = {Rgb{0xf7, 0xf7, 0xf7}, Rgb{0xfd, 0xdb, 0xc7}, Rgb{0xf4, 0xa5, 0x82},
                                         Rgb{0xd6, 0x60, 0x4d}, Rgb{0xb2, 0x18, 0x2b}, Rgb{0x67, 0x00, 0x1f}};
constexpr std::array<Rgb, 6> kBlueRamp = {Rgb{0xf7, 0xf7, 0xf7}, Rgb{0xd1, 0xe5, 0xf0}, Rgb{0x92, 0xc5, 0xde},
                                          Rgb{0x43, 0x93, 0xc3}, Rgb{0x21, 0x66, 0xac}, Rgb{0x05, 0x30, 0x61}};

Rgb ramp_at(const std::array<Rgb, 6>& ramp, double t) {
  const double pos = std::clamp(t, 0.0, 1.0) * (ramp.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), ramp.size() - 2);
  const double f = pos - static_cast<double>(i);
  auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * f));
  };
  return {mix(ramp[i].r, ramp[i + 1].r), mix(ramp[i].g, ramp[i + 1].g), mix(ramp[i].b, ramp[i + 1].b)};
}

}  // namespace

std::vector<Rgb> palette(int segments_per_side) {
  if (segments_per_side < 1) throw Error("segments_per_side must be at least 1");
  const int s = segments_per_side;
  std::vector<Rgb> out(static_cast<std::size_t>(2 * s + 1));
  for (int seg = 0; seg < s; ++seg) {
    const double t = 0.8 * (seg + 1) / s;
    out[static_cast<std::size_t>(s - 1 - seg)] = ramp_at(kRedRamp, t);
    out[static_cast<std::size_t>(s + seg)] = ramp_at(kBlueRamp, t);
  }
  out.back() = kRedRamp[0];
  return out;
}

double global_domain(Columns raw) {
  double m = 0.0;
  for (const auto& c : raw)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

PixelImage render_pixels(Columns raw, std::span<const std::size_t> row_order, std::span<const std::size_t> col_order,
                         std::span<const ColumnGroup> frames, const RenderOptions& options) {
  if (raw.empty()) throw Error("nothing to render");
  if (raw.size() > options.screen_width_px)
    throw Conflict(std::to_string(raw.size()) + " pixel-bars exceed the screen width of " +
                   std::to_string(options.screen_width_px) + " px; coarsen temporal intervals");
  const std::size_t d = raw.front().size();
  for (const auto& c : raw)
    if (c.size() != d) throw Error("columns have different dimensions");
  if (!is_permutation_of_range(row_order, d)) throw Error("row order is not a permutation of the dimensions");
  if (!is_permutation_of_range(col_order, raw.size())) throw Error("column order is not a permutation of the columns");
  if (options.cell_height_px == 0) throw Error("cell height must be positive");

  PixelImage img;
  img.columns = raw.size();
  img.dimensions = d;
  img.segments_per_side = options.segments_per_side;
  img.domain_max = global_domain(raw);
  img.bar_width_px = std::max<std::size_t>(1, options.screen_width_px / img.columns);
  img.width_px = img.columns * img.bar_width_px;
  img.height_px = d * options.cell_height_px;
  img.palette = palette(options.segments_per_side);
  img.frames.assign(frames.begin(), frames.end());

  const ColorSpec spec{options.segments_per_side, img.domain_max};
  img.classes.resize(img.columns * d);
  for (std::size_t p = 0; p < img.columns; ++p)
    for (std::size_t r = 0; r < d; ++r) img.classes[p * d + r] = colorize(raw[col_order[p]][row_order[r]], spec);

  img.rgb.resize(img.width_px * img.height_px * 3);
  auto put = [&](std::size_t x, std::size_t y, Rgb c) {
    auto* px = img.rgb.data() + (y * img.width_px + x) * 3;
    px[0] = c.r;
    px[1] = c.g;
    px[2] = c.b;
  };
  for (std::size_t p = 0; p < img.columns; ++p)
    for (std::size_t r = 0; r < d; ++r) {
      const Rgb c = img.palette[static_cast<std::size_t>(img.class_at(p, r))];
      for (std::size_t y = r * options.cell_height_px; y < (r + 1) * options.cell_height_px; ++y)
        for (std::size_t x = p * img.bar_width_px; x < (p + 1) * img.bar_width_px; ++x) put(x, y, c);
    }
  for (const auto& f : img.frames) {
    if (f.label < 0 || f.begin >= f.end || f.end > img.columns) continue;
    const std::size_t x0 = f.begin * img.bar_width_px;
    const std::size_t x1 = f.end * img.bar_width_px - 1;
    for (std::size_t x = x0; x <= x1; ++x) {
      put(x, 0, kFrameGrey);
      put(x, img.height_px - 1, kFrameGrey);
    }
    for (std::size_t y = 0; y < img.height_px; ++y) {
      put(x0, y, kFrameGrey);
      put(x1, y, kFrameGrey);
    }
  }
  img.png = encode_png(img.width_px, img.height_px, img.rgb);
  return img;
}

std::string class_matrix_json(const PixelImage& image) {
  nlohmann::json j;
  j["columns"] = image.columns;
  j["d"] = image.dimensions;
  j["bar_width_px"] = image.bar_width_px;
  j["domain_max"] = image.domain_max;
  j["segments_per_side"] = image.segments_per_side;
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t p = 0; p < image.columns; ++p) {
    auto first = image.classes.begin() + static_cast<std::ptrdiff_t>(p * image.dimensions);
    classes.push_back(std::vector<int>(first, first + static_cast<std::ptrdiff_t>(image.dimensions)));
  }
  j["classes"] = std::move(classes);
  nlohmann::json pal = nlohmann::json::array();
  for (const auto& c : image.palette) pal.push_back(c.hex());
  j["palette"] = std::move(pal);
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : image.frames)
    if (f.label >= 0) frames.push_back({{"begin", f.begin}, {"end", f.end}, {"label", f.label}, {"color", kFrameGrey.hex()}});
  j["frames"] = std::move(frames);
  return j.dump();
}

ZoomBar render_zoom_bar(std::span<const IntervalId> intervals, std::uint64_t steps, std::size_t bar_width_px,
                        std::size_t max_height_px) {
  if (intervals.empty()) throw Error("zoom bar needs at least one interval");
  if (bar_width_px == 0 || max_height_px == 0) throw Error("zoom bar dimensions must be positive");
  const std::uint32_t top = top_level(steps);
  std::vector<IntervalId> sorted(intervals.begin(), intervals.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](IntervalId a, IntervalId b) {
    return a.first_step() != b.first_step() ? a.first_step() < b.first_step() : a.level < b.level;
  });

  ZoomBar bar;
  bar.width_px = sorted.size() * bar_width_px;
  bar.height_px = max_height_px;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto iv = sorted[i];
    if (!iv.valid(steps)) throw Error("interval " + to_string(iv) + " out of range");
    ZoomRect r;
    r.interval = iv;
    r.first_step = iv.first_step();
    r.span = iv.span(steps);
    r.x = i * bar_width_px;
    r.width = bar_width_px;
    r.relative_height = static_cast<double>(iv.level + 1) / (top + 1);
    r.height = std::max<std::size_t>(1, max_height_px * (iv.level + 1) / (top + 1));
    bar.rects.push_back(r);
  }

  std::vector<std::uint8_t> rgb(bar.width_px * bar.height_px * 3, 255);
  const Rgb fill{0x92, 0x92, 0x92};
  const Rgb edge{0x4d, 0x4d, 0x4d};
  for (const auto& r : bar.rects) {
    for (std::size_t y = bar.height_px - r.height; y < bar.height_px; ++y) {
      for (std::size_t x = r.x; x < r.x + r.width; ++x) {
        const bool border = r.width > 2 && (x == r.x || x + 1 == r.x + r.width);
        const Rgb c = border ? edge : fill;
        auto* px = rgb.data() + (y * bar.width_px + x) * 3;
        px[0] = c.r;
        px[1] = c.g;
        px[2] = c.b;
      }
    }
  }
  bar.png = encode_png(bar.width_px, bar.height_px, rgb);
  return bar;
}

std::string zoom_bar_json(const ZoomBar& bar) {
  nlohmann::json rects = nlohmann::json::array();
  for (const auto& r : bar.rects)
    rects.push_back({{"level", r.interval.level},
                     {"start", r.interval.start},
                     {"first_step", r.first_step},
                     {"span", r.span},
                     {"x", r.x},
                     {"width", r.width},
                     {"height", r.height},
                     {"relative_height", r.relative_height}});
  return nlohmann::json{{"width_px", bar.width_px}, {"height_px", bar.height_px}, {"bars", rects}}.dump();
}

}  // namespace dg2pix
