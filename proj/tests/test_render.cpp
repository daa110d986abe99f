#include <gtest/gtest.h>

#include <numeric>

#include "json.hpp"

#include "dg2pix/render.hpp"

using namespace dg2pix;

namespace {

struct Columns2 {
  std::vector<std::vector<double>> cols;
  std::vector<std::span<const double>> spans() const { return {cols.begin(), cols.end()}; }
};

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Columns2 random_columns(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Columns2 c;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.uniform(-3, 3);
    c.cols.push_back(v);
  }
  return c;
}

}  // namespace

TEST(Colorize, SingleSegmentExample) {
  const ColorSpec spec{1, 2.0};
  const int red = 0, blue = 1;
  std::vector<int> got;
  for (double v : {1.0, -1.0, 0.0, 2.0}) got.push_back(colorize(v, spec));
  EXPECT_EQ(got, (std::vector<int>{blue, red, blue, blue}));
}

TEST(Colorize, SegmentsAndClamping) {
  const ColorSpec spec{3, 3.0};
  EXPECT_EQ(class_count(spec), 7);
  EXPECT_EQ(neutral_class(spec), 6);
  EXPECT_EQ(colorize(-3.0, spec), 0);
  EXPECT_EQ(colorize(-10.0, spec), 0);
  EXPECT_EQ(colorize(-0.5, spec), 2);
  EXPECT_EQ(colorize(0.0, spec), 3);
  EXPECT_EQ(colorize(2.5, spec), 5);
  EXPECT_EQ(colorize(10.0, spec), 5);
  EXPECT_EQ(colorize(0.0, ColorSpec{3, 0.0}), 6);
  EXPECT_THROW(colorize(1.0, ColorSpec{0, 1.0}), Error);
}

TEST(Palette, RedToBlueWithNeutral) {
  const auto p = palette(2);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_GT(p[0].r, p[0].b);
  EXPECT_GT(p[3].b, p[3].r);
  EXPECT_EQ(kFrameGrey.hex(), "#808080");
}

TEST(Render, ByteIdenticalPng) {
  const auto c = random_columns(50, 16, 3);
  const auto cols = iota(50), rows = iota(16);
  const auto a = render_pixels(c.spans(), rows, cols, {});
  const auto b = render_pixels(c.spans(), rows, cols, {});
  EXPECT_EQ(a.png, b.png);
  EXPECT_EQ(a.png.size() > 8, true);
  EXPECT_EQ(std::vector<std::uint8_t>(a.png.begin(), a.png.begin() + 4),
            (std::vector<std::uint8_t>{0x89, 'P', 'N', 'G'}));
}

TEST(Render, ScreenCap) {
  const auto c = random_columns(401, 2, 1);
  RenderOptions o;
  o.screen_width_px = 400;
  try {
    render_pixels(c.spans(), iota(2), iota(401), {}, o);
    FAIL() << "expected Conflict";
  } catch (const Conflict& e) {
    EXPECT_NE(std::string(e.what()).find("coarsen temporal intervals"), std::string::npos);
  }
  const auto fits = random_columns(400, 2, 1);
  EXPECT_EQ(render_pixels(fits.spans(), iota(2), iota(400), {}, o).bar_width_px, 1u);
}

TEST(Render, GeometryAndOrdering) {
  Columns2 c{{{1.0, -1.0}, {-2.0, 2.0}}};
  RenderOptions o;
  o.screen_width_px = 10;
  o.cell_height_px = 3;
  const std::vector<std::size_t> rows{1, 0}, cols{1, 0};
  const auto img = render_pixels(c.spans(), rows, cols, {}, o);
  EXPECT_EQ(img.bar_width_px, 5u);
  EXPECT_EQ(img.width_px, 10u);
  EXPECT_EQ(img.height_px, 6u);
  EXPECT_DOUBLE_EQ(img.domain_max, 2.0);
  EXPECT_EQ(img.class_at(0, 0), 1);  // column 1, dimension 1 = +2
  EXPECT_EQ(img.class_at(1, 0), 0);  // column 0, dimension 1 = -1
  EXPECT_EQ(img.rgb.size(), 10u * 6u * 3u);
}

TEST(Render, FramesInJson) {
  const auto c = random_columns(6, 4, 2);
  const std::vector<ColumnGroup> frames{{0, 3, 0}, {3, 6, 1}};
  const auto img = render_pixels(c.spans(), iota(4), iota(6), frames);
  const auto j = nlohmann::json::parse(class_matrix_json(img));
  EXPECT_EQ(j["columns"], 6);
  EXPECT_EQ(j["d"], 4);
  ASSERT_EQ(j["frames"].size(), 2u);
  EXPECT_EQ(j["frames"][1]["begin"], 3);
  EXPECT_EQ(j["frames"][0]["color"], "#808080");
  EXPECT_EQ(j["classes"].size(), 6u);
  EXPECT_EQ(j["classes"][0].size(), 4u);
}

TEST(ZoomBar, HeightsAndTimeOrder) {
  // T = 8, Lmax = 3
  const std::vector<IntervalId> bars{{0, 7}, {3, 0}, {0, 0}};
  EXPECT_THROW(render_zoom_bar({}, 8, 4), Error);
  const std::vector<IntervalId> mixed{{1, 1}, {0, 0}, {0, 1}, {2, 1}};
  const auto z = render_zoom_bar(mixed, 8, 4, 32);
  ASSERT_EQ(z.rects.size(), 4u);
  EXPECT_EQ(z.rects[0].interval, (IntervalId{0, 0}));
  EXPECT_EQ(z.rects[1].interval, (IntervalId{0, 1}));
  EXPECT_EQ(z.rects[2].interval, (IntervalId{1, 1}));
  EXPECT_EQ(z.rects[3].interval, (IntervalId{2, 1}));
  EXPECT_DOUBLE_EQ(z.rects[0].relative_height, 0.25);
  EXPECT_DOUBLE_EQ(z.rects[3].relative_height / z.rects[0].relative_height, 3.0);
  const std::vector<IntervalId> top{{3, 0}};
  const auto t = render_zoom_bar(top, 8, 4, 32);
  EXPECT_DOUBLE_EQ(t.rects[0].relative_height / z.rects[0].relative_height, 4.0);
  EXPECT_EQ(t.rects[0].height, 32u);
  EXPECT_EQ(z.rects[0].height, 8u);
  const auto j = nlohmann::json::parse(zoom_bar_json(z));
  EXPECT_EQ(j["bars"].size(), 4u);
  EXPECT_EQ(render_zoom_bar(mixed, 8, 4, 32).png, z.png);
  (void)bars;
}

TEST(Png, EncodeIsDeterministic) {
  std::vector<std::uint8_t> rgb(3 * 5 * 2, 200);
  const auto a = encode_png(5, 2, rgb);
  EXPECT_EQ(a, encode_png(5, 2, rgb));
  EXPECT_THROW(encode_png(5, 3, rgb), Error);
}
