// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctvgan/tensor.hpp"

namespace ctvgan {

/// Interleaved 8-bit image.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

void write_png(const std::filesystem::path& path, const Image8& image);
Image8 read_png(const std::filesystem::path& path);

/// Encodes as baseline JPEG at `quality` and decodes back (RGB only).
Image8 jpeg_roundtrip(const Image8& image, int quality);

/// [3, H, W] in [-1, 1] <-> RGB bytes; 0 -> -1, 255 -> 1.
Image8 frame_to_image(const Tensor& frame);
Tensor image_to_frame(const Image8& image);

/// [H, W] in [0, 1] -> grayscale bytes.
Image8 gray_to_image(const Tensor& map);

std::uint8_t to_byte(double value);
inline double from_byte(std::uint8_t b) { return static_cast<double>(b) / 127.5 - 1.0; }

}  // namespace ctvgan
