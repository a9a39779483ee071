// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctvgan::ad {

namespace {

using Strides = std::vector<std::int64_t>;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Strides contiguous_strides(const Shape& shape) {
  Strides s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * shape[i + 1];
  return s;
}

// Strides of `src` when read as if it had shape `out` (right-aligned, size-1 axes repeat).
Strides broadcast_strides(const Shape& src, const Shape& out) {
  if (src.size() > out.size()) {
    throw std::invalid_argument("cannot broadcast " + to_string(src) + " to " + to_string(out));
  }
  const auto offset = out.size() - src.size();
  const Strides cs = contiguous_strides(src);
  Strides s(out.size(), 0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto d = src[i];
    const auto o = out[i + offset];
    if (d == o) {
      s[i + offset] = cs[i];
    } else if (d != 1) {
      throw std::invalid_argument("cannot broadcast " + to_string(src) + " to " + to_string(out));
    }
  }
  return s;
}

// Calls f(flat_out_index, src_index) for every element of `out`, with src walking `src_strides`.
template <class F>
void for_each_strided(const Shape& out, const Strides& src_strides, F&& f) {
  const int rank = static_cast<int>(out.size());
  const std::int64_t total = numel(out);
  if (total == 0) return;
  if (rank == 0) {
    f(std::int64_t{0}, std::int64_t{0});
    return;
  }
  const std::int64_t inner = out[rank - 1];
  const std::int64_t inner_stride = src_strides[rank - 1];
  std::vector<std::int64_t> idx(static_cast<std::size_t>(rank), 0);
  std::int64_t src = 0;
  for (std::int64_t o = 0; o < total; o += inner) {
    for (std::int64_t j = 0; j < inner; ++j) f(o + j, src + j * inner_stride);
    for (int ax = rank - 2; ax >= 0; --ax) {
      src += src_strides[ax];
      if (++idx[ax] < out[ax]) break;
      src -= src_strides[ax] * out[ax];
      idx[ax] = 0;
    }
  }
}

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::int64_t da = i + a.size() >= rank ? a[i + a.size() - rank] : 1;
    const std::int64_t db = i + b.size() >= rank ? b[i + b.size() - rank] : 1;
    if (da != db && da != 1 && db != 1) {
      throw std::invalid_argument("shapes " + to_string(a) + " and " + to_string(b) + " do not broadcast");
    }
    out[i] = std::max(da, db);
  }
  return out;
}

int normalize_axis(int axis, int rank) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) throw std::out_of_range("axis out of range");
  return axis;
}

Tensor broadcast_kernel(const Tensor& a, const Shape& shape) {
  Tensor out(shape);
  const Strides s = broadcast_strides(a.shape(), shape);
  auto src = a.data();
  auto dst = out.data();
  for_each_strided(shape, s, [&](std::int64_t o, std::int64_t i) { dst[o] = src[i]; });
  return out;
}

Tensor sum_to_kernel(const Tensor& a, const Shape& shape) {
  Tensor out(shape, 0.0);
  const Strides s = broadcast_strides(shape, a.shape());
  auto src = a.data();
  auto dst = out.data();
  for_each_strided(a.shape(), s, [&](std::int64_t i, std::int64_t o) { dst[o] += src[i]; });
  return out;
}

template <class F>
Tensor map_kernel(const Tensor& a, F&& f) {
  Tensor out(a.shape());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

template <class F>
Tensor zip_kernel(const Tensor& a, const Tensor& b, F&& f) {
  Tensor out(a.shape());
  auto x = a.data();
  auto y = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
  return out;
}

Var add_same(const Var& a, const Var& b) {
  return make_op(zip_kernel(a.value(), b.value(), [](double x, double y) { return x + y; }), {a, b},
                 [](const Var& g, const Node&) { return std::vector<Var>{g, g}; }, "add");
}

Var mul_same(const Var& a, const Var& b) {
  return make_op(zip_kernel(a.value(), b.value(), [](double x, double y) { return x * y; }), {a, b},
                 [](const Var& g, const Node& self) {
                   return std::vector<Var>{mul(g, self.inputs[1]), mul(g, self.inputs[0])};
                 },
                 "mul");
}

struct Conv2dGeometry {
  std::int64_t c, b, h, w, ho, wo;
};

Conv2dGeometry conv_geometry(const Shape& s, int kh, int kw, int stride, int pad) {
  if (s.size() != 4) throw std::invalid_argument("unfold expects [C, B, H, W], got " + to_string(s));
  if (stride < 1 || kh < 1 || kw < 1 || pad < 0) throw std::invalid_argument("invalid unfold geometry");
  Conv2dGeometry g{s[0], s[1], s[2], s[3], 0, 0};
  g.ho = (g.h + 2 * pad - kh) / stride + 1;
  g.wo = (g.w + 2 * pad - kw) / stride + 1;
  if (g.h + 2 * pad < kh || g.w + 2 * pad < kw) {
    throw std::invalid_argument("kernel larger than padded input " + to_string(s));
  }
  return g;
}

// Walks every (row, col, input index) triple of the unfold matrix, skipping padding.
template <class F>
void for_each_unfold(const Conv2dGeometry& g, int kh, int kw, int stride, int pad, F&& f) {
  const std::int64_t ncols = g.b * g.ho * g.wo;
  for (std::int64_t c = 0; c < g.c; ++c) {
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        const std::int64_t row = (c * kh + i) * kw + j;
        for (std::int64_t b = 0; b < g.b; ++b) {
          const std::int64_t in_base = (c * g.b + b) * g.h * g.w;
          for (std::int64_t oy = 0; oy < g.ho; ++oy) {
            const std::int64_t y = oy * stride - pad + i;
            if (y < 0 || y >= g.h) continue;
            const std::int64_t col_base = row * ncols + (b * g.ho + oy) * g.wo;
            for (std::int64_t ox = 0; ox < g.wo; ++ox) {
              const std::int64_t x = ox * stride - pad + j;
              if (x < 0 || x >= g.w) continue;
              f(col_base + ox, in_base + y * g.w + x);
            }
          }
        }
      }
    }
  }
}

struct LerpTap {
  std::int64_t i0, i1;
  double frac;
};

std::vector<LerpTap> upsample_taps(std::int64_t n) {
  std::vector<LerpTap> taps(static_cast<std::size_t>(2 * n));
  for (std::int64_t o = 0; o < 2 * n; ++o) {
    double src = (static_cast<double>(o) + 0.5) / 2.0 - 0.5;
    if (src < 0.0) src = 0.0;
    auto i0 = static_cast<std::int64_t>(std::floor(src));
    i0 = std::min(i0, n - 1);
    const std::int64_t i1 = std::min(i0 + 1, n - 1);
    taps[static_cast<std::size_t>(o)] = {i0, i1, src - static_cast<double>(i0)};
  }
  return taps;
}

}  // namespace

Var broadcast_to(const Var& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  return make_op(broadcast_kernel(a.value(), shape), {a},
                 [](const Var& g, const Node& self) {
                   return std::vector<Var>{sum_to(g, self.inputs[0].shape())};
                 },
                 "broadcast_to");
}

Var sum_to(const Var& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  return make_op(sum_to_kernel(a.value(), shape), {a},
                 [](const Var& g, const Node& self) {
                   return std::vector<Var>{broadcast_to(g, self.inputs[0].shape())};
                 },
                 "sum_to");
}

Var add(const Var& a, const Var& b) {
  if (a.shape() == b.shape()) return add_same(a, b);
  const Shape s = broadcast_shape(a.shape(), b.shape());
  return add_same(broadcast_to(a, s), broadcast_to(b, s));
}

Var mul(const Var& a, const Var& b) {
  if (a.shape() == b.shape()) return mul_same(a, b);
  const Shape s = broadcast_shape(a.shape(), b.shape());
  return mul_same(broadcast_to(a, s), broadcast_to(b, s));
}

Var scale(const Var& a, double factor) {
  return make_op(map_kernel(a.value(), [factor](double x) { return x * factor; }), {a},
                 [factor](const Var& g, const Node&) { return std::vector<Var>{scale(g, factor)}; }, "scale");
}

Var neg(const Var& a) { return scale(a, -1.0); }
Var sub(const Var& a, const Var& b) { return add(a, neg(b)); }

Var shift(const Var& a, double offset) {
  return make_op(map_kernel(a.value(), [offset](double x) { return x + offset; }), {a},
                 [](const Var& g, const Node&) { return std::vector<Var>{g}; }, "shift");
}

Var sum(const Var& a) { return sum_to(a, Shape{}); }

Var mean(const Var& a) { return scale(sum(a), 1.0 / static_cast<double>(std::max<std::int64_t>(1, a.value().numel()))); }

namespace {

// op(a) * op(b) with op = transpose when the flag is set.
Var gemm(const Var& a, const Var& b, bool ta, bool tb) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (as.size() != 2 || bs.size() != 2) {
    throw std::invalid_argument("matmul expects rank-2 operands, got " + to_string(as) + " x " + to_string(bs));
  }
  const std::int64_t m = ta ? as[1] : as[0], ka = ta ? as[0] : as[1];
  const std::int64_t kb = tb ? bs[1] : bs[0], n = tb ? bs[0] : bs[1];
  if (ka != kb) throw std::invalid_argument("matmul shape mismatch " + to_string(as) + " x " + to_string(bs));
  Tensor out(Shape{m, n});
  Eigen::Map<const RowMat> ma(a.value().data().data(), as[0], as[1]);
  Eigen::Map<const RowMat> mb(b.value().data().data(), bs[0], bs[1]);
  Eigen::Map<RowMat> mo(out.data().data(), m, n);
  if (!ta && !tb) mo.noalias() = ma * mb;
  else if (!ta && tb) mo.noalias() = ma * mb.transpose();
  else if (ta && !tb) mo.noalias() = ma.transpose() * mb;
  else mo.noalias() = ma.transpose() * mb.transpose();
  return make_op(std::move(out), {a, b},
                 [ta, tb](const Var& g, const Node& self) {
                   const Var& x = self.inputs[0];
                   const Var& y = self.inputs[1];
                   Var gx, gy;
                   if (x.requires_grad()) {
                     gx = !ta ? gemm(g, y, false, !tb) : gemm(y, g, tb, true);
                   }
                   if (y.requires_grad()) {
                     gy = !tb ? gemm(x, g, !ta, false) : gemm(g, x, true, ta);
                   }
                   return std::vector<Var>{gx, gy};
                 },
                 "matmul");
}

}  // namespace

Var matmul(const Var& a, const Var& b) { return gemm(a, b, false, false); }
Var matmul_nt(const Var& a, const Var& b) { return gemm(a, b, false, true); }
Var matmul_tn(const Var& a, const Var& b) { return gemm(a, b, true, false); }

Var transpose(const Var& a) {
  if (a.shape().size() != 2) throw std::invalid_argument("transpose expects rank 2, got " + to_string(a.shape()));
  const auto r = a.shape()[0];
  const auto c = a.shape()[1];
  Tensor out(Shape{c, r});
  Eigen::Map<const RowMat> src(a.value().data().data(), r, c);
  Eigen::Map<RowMat> dst(out.data().data(), c, r);
  dst = src.transpose();
  return make_op(std::move(out), {a}, [](const Var& g, const Node&) { return std::vector<Var>{transpose(g)}; },
                 "transpose");
}

Var reshape(const Var& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  return make_op(a.value().reshaped(shape), {a},
                 [](const Var& g, const Node& self) {
                   return std::vector<Var>{reshape(g, self.inputs[0].shape())};
                 },
                 "reshape");
}

Var permute(const Var& a, const std::vector<int>& axes) {
  const Shape& in = a.shape();
  if (axes.size() != in.size()) throw std::invalid_argument("permute rank mismatch");
  const Strides cs = contiguous_strides(in);
  Shape out_shape(in.size());
  Strides src_strides(in.size());
  std::vector<int> inverse(in.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const int ax = normalize_axis(axes[i], static_cast<int>(in.size()));
    out_shape[i] = in[ax];
    src_strides[i] = cs[ax];
    inverse[ax] = static_cast<int>(i);
  }
  Tensor out(out_shape);
  auto src = a.value().data();
  auto dst = out.data();
  for_each_strided(out_shape, src_strides, [&](std::int64_t o, std::int64_t i) { dst[o] = src[i]; });
  return make_op(std::move(out), {a},
                 [inverse](const Var& g, const Node&) { return std::vector<Var>{permute(g, inverse)}; }, "permute");
}

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw std::invalid_argument("concat of zero tensors");
  const Shape& first = parts.front().shape();
  axis = normalize_axis(axis, static_cast<int>(first.size()));
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::int64_t> offsets;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size()) throw std::invalid_argument("concat rank mismatch");
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (static_cast<int>(d) != axis && s[d] != first[d]) {
        throw std::invalid_argument("concat shape mismatch " + to_string(s) + " vs " + to_string(first));
      }
    }
    offsets.push_back(out_shape[axis]);
    out_shape[axis] += s[axis];
  }
  std::int64_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= out_shape[d];
  std::int64_t inner = 1;
  for (std::size_t d = axis + 1; d < out_shape.size(); ++d) inner *= out_shape[d];
  Tensor out(out_shape);
  auto dst = out.data();
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto src = parts[p].value().data();
    const std::int64_t len = parts[p].shape()[axis];
    for (std::int64_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * len * inner, len * inner,
                  dst.begin() + (o * out_shape[axis] + offsets[p]) * inner);
    }
  }
  return make_op(std::move(out), parts,
                 [axis, offsets](const Var& g, const Node& self) {
                   std::vector<Var> grads;
                   for (std::size_t p = 0; p < self.inputs.size(); ++p) {
                     const auto len = self.inputs[p].shape()[axis];
                     grads.push_back(self.inputs[p].requires_grad() ? slice(g, axis, offsets[p], offsets[p] + len)
                                                                    : Var());
                   }
                   return grads;
                 },
                 "concat");
}

Var slice(const Var& a, int axis, std::int64_t begin, std::int64_t end) {
  const Shape& in = a.shape();
  axis = normalize_axis(axis, static_cast<int>(in.size()));
  if (begin < 0 || end > in[axis] || begin > end) {
    throw std::out_of_range("slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") of axis " +
                            std::to_string(axis) + " in " + to_string(in));
  }
  Shape out_shape = in;
  out_shape[axis] = end - begin;
  std::int64_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= in[d];
  std::int64_t inner = 1;
  for (std::size_t d = axis + 1; d < in.size(); ++d) inner *= in[d];
  Tensor out(out_shape);
  auto src = a.value().data();
  auto dst = out.data();
  const std::int64_t len = end - begin;
  for (std::int64_t o = 0; o < outer; ++o) {
    std::copy_n(src.begin() + (o * in[axis] + begin) * inner, len * inner, dst.begin() + o * len * inner);
  }
  return make_op(std::move(out), {a},
                 [axis, begin](const Var& g, const Node& self) {
                   return std::vector<Var>{embed_slice(g, self.inputs[0].shape(), axis, begin)};
                 },
                 "slice");
}

Var embed_slice(const Var& a, const Shape& full, int axis, std::int64_t begin) {
  axis = normalize_axis(axis, static_cast<int>(full.size()));
  const Shape& in = a.shape();
  const std::int64_t len = in[axis];
  if (begin < 0 || begin + len > full[axis]) throw std::out_of_range("embed_slice out of range");
  std::int64_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= full[d];
  std::int64_t inner = 1;
  for (std::size_t d = axis + 1; d < full.size(); ++d) inner *= full[d];
  Tensor out(full, 0.0);
  auto src = a.value().data();
  auto dst = out.data();
  for (std::int64_t o = 0; o < outer; ++o) {
    std::copy_n(src.begin() + o * len * inner, len * inner, dst.begin() + (o * full[axis] + begin) * inner);
  }
  return make_op(std::move(out), {a},
                 [axis, begin, len](const Var& g, const Node&) {
                   return std::vector<Var>{slice(g, axis, begin, begin + len)};
                 },
                 "embed_slice");
}

Var tanh(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::tanh(x); }), {a},
                 [](const Var& g, const Node& self) {
                   const Var t = tanh(self.inputs[0]);
                   return std::vector<Var>{mul(g, shift(neg(square(t)), 1.0))};
                 },
                 "tanh");
}

Var sin(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::sin(x); }), {a},
                 [](const Var& g, const Node& self) { return std::vector<Var>{mul(g, cos(self.inputs[0]))}; }, "sin");
}

Var cos(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::cos(x); }), {a},
                 [](const Var& g, const Node& self) { return std::vector<Var>{neg(mul(g, sin(self.inputs[0])))}; },
                 "cos");
}

Var exp(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::exp(x); }), {a},
                 [](const Var& g, const Node& self) { return std::vector<Var>{mul(g, exp(self.inputs[0]))}; }, "exp");
}

Var log(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::log(x); }), {a},
                 [](const Var& g, const Node& self) { return std::vector<Var>{mul(g, pow(self.inputs[0], -1.0))}; },
                 "log");
}

Var sigmoid(const Var& a) {
  return make_op(map_kernel(a.value(),
                            [](double x) {
                              return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
                            }),
                 {a},
                 [](const Var& g, const Node& self) {
                   const Var s = sigmoid(self.inputs[0]);
                   return std::vector<Var>{mul(g, mul(s, shift(neg(s), 1.0)))};
                 },
                 "sigmoid");
}

Var softplus(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }),
                 {a}, [](const Var& g, const Node& self) { return std::vector<Var>{mul(g, sigmoid(self.inputs[0]))}; },
                 "softplus");
}

Var leaky_relu(const Var& a, double slope) {
  return make_op(map_kernel(a.value(), [slope](double x) { return x > 0.0 ? x : slope * x; }), {a},
                 [slope](const Var& g, const Node& self) {
                   Tensor mask = map_kernel(self.inputs[0].value(), [slope](double x) { return x > 0.0 ? 1.0 : slope; });
                   return std::vector<Var>{mul(g, constant(std::move(mask)))};
                 },
                 "leaky_relu");
}

Var square(const Var& a) {
  return make_op(map_kernel(a.value(), [](double x) { return x * x; }), {a},
                 [](const Var& g, const Node& self) { return std::vector<Var>{mul(g, scale(self.inputs[0], 2.0))}; },
                 "square");
}

Var pow(const Var& a, double exponent) {
  return make_op(map_kernel(a.value(), [exponent](double x) { return std::pow(x, exponent); }), {a},
                 [exponent](const Var& g, const Node& self) {
                   return std::vector<Var>{mul(g, scale(pow(self.inputs[0], exponent - 1.0), exponent))};
                 },
                 "pow");
}

Var unfold(const Var& x, int kh, int kw, int stride, int pad) {
  const Conv2dGeometry g = conv_geometry(x.shape(), kh, kw, stride, pad);
  Tensor out(Shape{g.c * kh * kw, g.b * g.ho * g.wo}, 0.0);
  auto src = x.value().data();
  auto dst = out.data();
  for_each_unfold(g, kh, kw, stride, pad, [&](std::int64_t o, std::int64_t i) { dst[o] = src[i]; });
  return make_op(std::move(out), {x},
                 [kh, kw, stride, pad](const Var& grad_out, const Node& self) {
                   return std::vector<Var>{fold(grad_out, self.inputs[0].shape(), kh, kw, stride, pad)};
                 },
                 "unfold");
}

Var fold(const Var& cols, const Shape& input_shape, int kh, int kw, int stride, int pad) {
  const Conv2dGeometry g = conv_geometry(input_shape, kh, kw, stride, pad);
  if (cols.shape() != Shape{g.c * kh * kw, g.b * g.ho * g.wo}) {
    throw std::invalid_argument("fold: columns " + to_string(cols.shape()) + " do not match " + to_string(input_shape));
  }
  Tensor out(input_shape, 0.0);
  auto src = cols.value().data();
  auto dst = out.data();
  for_each_unfold(g, kh, kw, stride, pad, [&](std::int64_t c, std::int64_t i) { dst[i] += src[c]; });
  return make_op(std::move(out), {cols},
                 [kh, kw, stride, pad](const Var& grad_out, const Node&) {
                   return std::vector<Var>{unfold(grad_out, kh, kw, stride, pad)};
                 },
                 "fold");
}

Var upsample2x(const Var& x) {
  const Shape& s = x.shape();
  if (s.size() != 4) throw std::invalid_argument("upsample2x expects [C, B, H, W]");
  const std::int64_t planes = s[0] * s[1], h = s[2], w = s[3];
  const auto ty = upsample_taps(h);
  const auto tx = upsample_taps(w);
  Tensor out(Shape{s[0], s[1], 2 * h, 2 * w});
  auto src = x.value().data();
  auto dst = out.data();
  for (std::int64_t p = 0; p < planes; ++p) {
    const double* in = src.data() + p * h * w;
    double* o = dst.data() + p * 4 * h * w;
    for (std::int64_t oy = 0; oy < 2 * h; ++oy) {
      const auto& a = ty[static_cast<std::size_t>(oy)];
      for (std::int64_t ox = 0; ox < 2 * w; ++ox) {
        const auto& b = tx[static_cast<std::size_t>(ox)];
        const double top = in[a.i0 * w + b.i0] * (1 - b.frac) + in[a.i0 * w + b.i1] * b.frac;
        const double bot = in[a.i1 * w + b.i0] * (1 - b.frac) + in[a.i1 * w + b.i1] * b.frac;
        o[oy * 2 * w + ox] = top * (1 - a.frac) + bot * a.frac;
      }
    }
  }
  return make_op(std::move(out), {x},
                 [](const Var& g, const Node& self) {
                   return std::vector<Var>{upsample2x_adjoint(g, self.inputs[0].shape())};
                 },
                 "upsample2x");
}

Var upsample2x_adjoint(const Var& y, const Shape& input_shape) {
  const std::int64_t planes = input_shape[0] * input_shape[1], h = input_shape[2], w = input_shape[3];
  if (y.shape() != Shape{input_shape[0], input_shape[1], 2 * h, 2 * w}) {
    throw std::invalid_argument("upsample2x_adjoint shape mismatch");
  }
  const auto ty = upsample_taps(h);
  const auto tx = upsample_taps(w);
  Tensor out(input_shape, 0.0);
  auto src = y.value().data();
  auto dst = out.data();
  for (std::int64_t p = 0; p < planes; ++p) {
    const double* g = src.data() + p * 4 * h * w;
    double* o = dst.data() + p * h * w;
    for (std::int64_t oy = 0; oy < 2 * h; ++oy) {
      const auto& a = ty[static_cast<std::size_t>(oy)];
      for (std::int64_t ox = 0; ox < 2 * w; ++ox) {
        const auto& b = tx[static_cast<std::size_t>(ox)];
        const double v = g[oy * 2 * w + ox];
        o[a.i0 * w + b.i0] += v * (1 - a.frac) * (1 - b.frac);
        o[a.i0 * w + b.i1] += v * (1 - a.frac) * b.frac;
        o[a.i1 * w + b.i0] += v * a.frac * (1 - b.frac);
        o[a.i1 * w + b.i1] += v * a.frac * b.frac;
      }
    }
  }
  return make_op(std::move(out), {y}, [](const Var& g, const Node&) { return std::vector<Var>{upsample2x(g)}; },
                 "upsample2x_adjoint");
}

Var flip_last(const Var& x) {
  const Shape& s = x.shape();
  if (s.empty()) return x;
  const std::int64_t w = s.back();
  const std::int64_t rows = x.value().numel() / std::max<std::int64_t>(w, 1);
  Tensor out(s);
  auto src = x.value().data();
  auto dst = out.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < w; ++c) dst[r * w + c] = src[r * w + (w - 1 - c)];
  }
  return make_op(std::move(out), {x}, [](const Var& g, const Node&) { return std::vector<Var>{flip_last(g)}; },
                 "flip_last");
}

Var translate(const Var& x, int dy, int dx) {
  const Shape& s = x.shape();
  if (s.size() < 2) throw std::invalid_argument("translate expects rank >= 2");
  if (dy == 0 && dx == 0) return x;
  const std::int64_t h = s[s.size() - 2], w = s[s.size() - 1];
  const std::int64_t planes = x.value().numel() / std::max<std::int64_t>(h * w, 1);
  Tensor out(s, 0.0);
  auto src = x.value().data();
  auto dst = out.data();
  for (std::int64_t p = 0; p < planes; ++p) {
    for (std::int64_t r = 0; r < h; ++r) {
      const std::int64_t sr = r - dy;
      if (sr < 0 || sr >= h) continue;
      for (std::int64_t c = 0; c < w; ++c) {
        const std::int64_t sc = c - dx;
        if (sc < 0 || sc >= w) continue;
        dst[(p * h + r) * w + c] = src[(p * h + sr) * w + sc];
      }
    }
  }
  return make_op(std::move(out), {x},
                 [dy, dx](const Var& g, const Node&) { return std::vector<Var>{translate(g, -dy, -dx)}; },
                 "translate");
}

}  // namespace ctvgan::ad
