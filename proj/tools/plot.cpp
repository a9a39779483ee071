// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ctvgan::tools {
namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 6> kPalette = {{
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189}, {140, 86, 75},
}};

void plot_pixel(Image8& img, int x, int y, const std::array<std::uint8_t, 3>& color) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  auto* p = &img.pixels[(static_cast<std::size_t>(y) * img.width + x) * 3];
  p[0] = color[0];
  p[1] = color[1];
  p[2] = color[2];
}

void draw_line(Image8& img, int x0, int y0, int x1, int y1, const std::array<std::uint8_t, 3>& color) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot_pixel(img, x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Image8 line_chart(const std::vector<Series>& series, int width, int height) {
  Image8 img{width, height, 3, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 255)};
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (series.empty() || xmax <= xmin) return img;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const int margin = 8;
  auto px = [&](double x) { return margin + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (width - 2 * margin - 1))); };
  auto py = [&](double y) {
    return height - 1 - margin - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (height - 2 * margin - 1)));
  };
  const std::array<std::uint8_t, 3> axis = {200, 200, 200};
  if (ymin < 0.0 && ymax > 0.0) draw_line(img, margin, py(0.0), width - margin, py(0.0), axis);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const auto& color = kPalette[i % kPalette.size()];
    for (std::size_t j = 1; j < s.x.size(); ++j) {
      draw_line(img, px(s.x[j - 1]), py(s.y[j - 1]), px(s.x[j]), py(s.y[j]), color);
    }
  }
  return img;
}

Image8 stack_vertical(const std::vector<Image8>& images) {
  if (images.empty()) throw std::invalid_argument("nothing to stack");
  Image8 out{images[0].width, 0, 3, {}};
  for (const auto& im : images) {
    if (im.width != out.width || im.channels != 3) throw std::invalid_argument("stacked images must share width");
    out.height += im.height;
    out.pixels.insert(out.pixels.end(), im.pixels.begin(), im.pixels.end());
  }
  return out;
}

}  // namespace ctvgan::tools
