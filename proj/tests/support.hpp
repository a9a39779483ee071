// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ctvgan/autograd.hpp"
#include "ctvgan/config.hpp"
#include "ctvgan/ops.hpp"

namespace ctvgan::testing {

/// Small, fast configuration: 8x8 frames, 4-dim motion codes, k = 3.
Config tiny_config();

/// Central-difference check of d f / d params. Compares the analytic
/// gradient (autograd) with finite differences on up to `max_entries`
/// entries per parameter (evenly strided) and returns
/// |g_analytic - g_numeric|_2 / max(|g_analytic|_2, |g_numeric|_2).
double gradient_relative_error(const std::function<ad::Var()>& f, const std::vector<ad::Var>& params,
                               double eps = 1e-6, std::int64_t max_entries = 0);

/// Chi-square goodness-of-fit p-value of counts against equal expected cells.
double chi_square_uniform_p(const std::vector<std::int64_t>& counts);
/// Two-sided binomial test p-value.
double binomial_two_sided_p(std::int64_t successes, std::int64_t trials, double p);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double scale = 1.0);

}  // namespace ctvgan::testing
