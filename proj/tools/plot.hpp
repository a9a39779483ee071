// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "ctvgan/image_io.hpp"

namespace ctvgan::tools {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart of several series on a white canvas, y range shared by all.
Image8 line_chart(const std::vector<Series>& series, int width, int height);

/// Stacks images vertically (equal widths).
Image8 stack_vertical(const std::vector<Image8>& images);

}  // namespace ctvgan::tools
