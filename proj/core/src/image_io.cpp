// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace ctvgan {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

int png_color_type(int channels) {
  switch (channels) {
    case 1:
      return PNG_COLOR_TYPE_GRAY;
    case 3:
      return PNG_COLOR_TYPE_RGB;
    case 4:
      return PNG_COLOR_TYPE_RGBA;
    default:
      throw std::invalid_argument("unsupported channel count " + std::to_string(channels));
  }
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegError*>(info->err);
  std::longjmp(err->jump, 1);
}

}  // namespace

std::uint8_t to_byte(double value) {
  const double v = std::round((std::clamp(value, -1.0, 1.0) + 1.0) * 127.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

void write_png(const std::filesystem::path& path, const Image8& image) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed to write " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               png_color_type(image.channels), PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image8 read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("corrupt PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_packing(png);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  Image8 img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  img.pixels.resize(stride * img.height);
  for (int y = 0; y < img.height; ++y) png_read_row(png, img.pixels.data() + y * stride, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Image8 jpeg_roundtrip(const Image8& image, int quality) {
  if (image.channels != 3) throw std::invalid_argument("jpeg_roundtrip expects RGB");
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  {
    jpeg_compress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
      jpeg_destroy_compress(&cinfo);
      std::free(buffer);
      throw std::runtime_error("JPEG encoding failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(image.width);
    cinfo.image_height = static_cast<JDIMENSION>(image.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
      JSAMPROW row = const_cast<JSAMPROW>(image.pixels.data() + cinfo.next_scanline * image.width * 3);
      jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
  }
  Image8 out;
  {
    jpeg_decompress_struct dinfo{};
    JpegError err{};
    dinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
      jpeg_destroy_decompress(&dinfo);
      std::free(buffer);
      throw std::runtime_error("JPEG decoding failed");
    }
    jpeg_create_decompress(&dinfo);
    jpeg_mem_src(&dinfo, buffer, size);
    jpeg_read_header(&dinfo, TRUE);
    dinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&dinfo);
    out.width = static_cast<int>(dinfo.output_width);
    out.height = static_cast<int>(dinfo.output_height);
    out.channels = 3;
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    while (dinfo.output_scanline < dinfo.output_height) {
      JSAMPROW row = out.pixels.data() + dinfo.output_scanline * out.width * 3;
      jpeg_read_scanlines(&dinfo, &row, 1);
    }
    jpeg_finish_decompress(&dinfo);
    jpeg_destroy_decompress(&dinfo);
  }
  std::free(buffer);
  return out;
}

Image8 frame_to_image(const Tensor& frame) {
  if (frame.rank() != 3 || frame.dim(0) != 3) throw std::invalid_argument("frame must be [3, H, W]");
  Image8 img;
  img.height = static_cast<int>(frame.dim(1));
  img.width = static_cast<int>(frame.dim(2));
  img.channels = 3;
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  const std::int64_t plane = static_cast<std::int64_t>(img.width) * img.height;
  for (std::int64_t p = 0; p < plane; ++p) {
    for (int c = 0; c < 3; ++c) img.pixels[p * 3 + c] = to_byte(frame[c * plane + p]);
  }
  return img;
}

Tensor image_to_frame(const Image8& image) {
  if (image.channels != 3) throw std::invalid_argument("expected an RGB image, got " + std::to_string(image.channels) + " channels");
  Tensor frame({3, image.height, image.width});
  const std::int64_t plane = static_cast<std::int64_t>(image.width) * image.height;
  for (std::int64_t p = 0; p < plane; ++p) {
    for (int c = 0; c < 3; ++c) frame[c * plane + p] = from_byte(image.pixels[p * 3 + c]);
  }
  return frame;
}

Image8 gray_to_image(const Tensor& map) {
  if (map.rank() != 2) throw std::invalid_argument("grayscale map must be [H, W]");
  Image8 img;
  img.height = static_cast<int>(map.dim(0));
  img.width = static_cast<int>(map.dim(1));
  img.channels = 1;
  img.pixels.resize(static_cast<std::size_t>(map.numel()));
  for (std::int64_t i = 0; i < map.numel(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(map[i], 0.0, 1.0) * 255.0));
  }
  return img;
}

}  // namespace ctvgan
