// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ctvgan/autograd.hpp"

namespace ctvgan::ad {

// Elementwise binary ops broadcast numpy-style (right-aligned, size-1 axes expand).
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var neg(const Var& a);
Var scale(const Var& a, double factor);
Var shift(const Var& a, double offset);

Var broadcast_to(const Var& a, const Shape& shape);
/// Sums `a` down to `shape`; inverse of broadcast_to.
Var sum_to(const Var& a, const Shape& shape);
Var sum(const Var& a);
Var mean(const Var& a);

Var matmul(const Var& a, const Var& b);
/// a * b^T and a^T * b without materializing the transpose.
Var matmul_nt(const Var& a, const Var& b);
Var matmul_tn(const Var& a, const Var& b);
Var transpose(const Var& a);
Var reshape(const Var& a, const Shape& shape);
Var permute(const Var& a, const std::vector<int>& axes);
Var concat(const std::vector<Var>& parts, int axis);
Var slice(const Var& a, int axis, std::int64_t begin, std::int64_t end);
/// Places `a` at [begin, begin + a.dim(axis)) along `axis` of a zero tensor of `full`.
Var embed_slice(const Var& a, const Shape& full, int axis, std::int64_t begin);

Var tanh(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);
Var leaky_relu(const Var& a, double slope = 0.2);
Var square(const Var& a);
Var pow(const Var& a, double exponent);

/// im2col for activations laid out [C, B, H, W]. Output is
/// [C * kh * kw, B * Ho * Wo], row index (c * kh + i) * kw + j.
Var unfold(const Var& x, int kh, int kw, int stride, int pad);
/// Adjoint of unfold; scatters columns back into `input_shape`.
Var fold(const Var& cols, const Shape& input_shape, int kh, int kw, int stride, int pad);

/// 2x bilinear upsampling of [C, B, H, W] (half-pixel centers, edge clamped).
Var upsample2x(const Var& x);
Var upsample2x_adjoint(const Var& y, const Shape& input_shape);

/// Mirrors the last axis.
Var flip_last(const Var& x);
/// Translates the two trailing axes by (dy, dx) with zero fill.
Var translate(const Var& x, int dy, int dx);

}  // namespace ctvgan::ad
