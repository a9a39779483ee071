// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Flat key -> tensor container. Layout (little-endian):
//   "CTVCKPT1"                      8-byte magic
//   u32 tensor_count
//   per tensor: u32 key_len, key bytes, u32 rank, i64 dims[rank], f64 values[numel]
//   u32 string_count
//   per string: u32 key_len, key bytes, u64 len, bytes

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ctvgan/tensor.hpp"

namespace ctvgan {

struct Checkpoint {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> strings;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  /// Entries whose key starts with `prefix`, with the prefix kept.
  std::map<std::string, Tensor> with_prefix(const std::string& prefix) const;
  const std::string& string(const std::string& key) const;
};

}  // namespace ctvgan
