// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates the frozen feature extractor blob from its fixed seed.

#include <iostream>

#include "ctvgan/feature_extractor.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ctvgan_extractor_blob <output.bin>\n";
    return 1;
  }
  try {
    ctvgan::FeatureExtractor::generate().save(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
