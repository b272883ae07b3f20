/*
 * Copyright 2026 The UTDE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "utde/tensor/tape.hpp"
#include "utde/tensor/tensor.hpp"

// Differentiable operations on tape variables. All ops act on the matrix view
// of their operands (leading dims flattened into rows). Every op here has a
// finite-difference test in tests/unit/tensor_ops_test.cpp.
namespace utde {

// Column mask used by the attention kernels: true = key is visible.
using Mask = std::vector<bool>;

inline constexpr double kLayerNormEpsilon = 1e-5;

// -- elementwise ------------------------------------------------------------
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var ScaleBy(Var a, double factor);
// x[r x c] + bias[1 x c], bias broadcast over rows.
Var AddBias(Var x, Var bias);
Var Sin(Var x);
Var Sigmoid(Var x);
Var Relu(Var x);

// -- shape ------------------------------------------------------------------
Var MatMul(Var a, Var b);
Var Transpose(Var x);
Var ConcatCols(std::span<const Var> parts);
Var SliceCols(Var x, std::size_t start, std::size_t count);
Var SliceRows(Var x, std::size_t start, std::size_t count);
// Zero rows appended below x until it has `rows` rows.
Var PadRows(Var x, std::size_t rows);
// Expands a [1x1], [r x 1], [1 x c] or [r x c] tensor to [r x c].
Var BroadcastTo(Var x, std::size_t rows, std::size_t cols);

// -- reductions -------------------------------------------------------------
Var Sum(Var x);
Var Mean(Var x);
// [r x c] -> [1 x c]
Var MeanOverRows(Var x);
// [r x c] -> [r x 1]
Var MeanOverCols(Var x);

// -- attention kernels ------------------------------------------------------

// Row-wise softmax over the columns where mask is true; masked columns get
// weight 0. Uses max-subtraction. When every column is masked the rows are
// all zero and *degenerate (if given) is set.
Var MaskedSoftmax(Var scores, const Mask& mask, bool* degenerate = nullptr);
Var Softmax(Var scores);

// weights[q x k] * values[k x c], with each output column clamped to the
// [min, max] of the corresponding value column so convex weights can never
// overshoot by rounding.
Var ConvexCombine(Var weights, Var values);

// Per-segment softmax attention. Columns of `scores` [q x n] are partitioned
// into segments by `offsets` (size S+1, offsets[0]=0, offsets[S]=n; empty
// segments allowed). Output [q x S]: entry (a, s) is the softmax over segment
// s of row a, dotted with that segment's `values`, clamped into the segment's
// value range. Empty segments produce zero columns.
Var SegmentAttention(Var scores, std::span<const std::size_t> offsets,
                     std::span<const double> values);

// -- normalization / convolution / mixing ------------------------------------

// Row-wise (x - mean) / sqrt(var + eps) * gain + bias, with biased variance.
Var LayerNorm(Var x, Var gain, Var bias, double eps = kLayerNormEpsilon);

// x [T x c_in], kernel [k x c_in x c_out], bias [1 x c_out]. Output row t is
// sum_{i<k} x[t-i] * kernel[k-1-i] + bias, with x[<0] = 0 (left padding k-1).
Var CausalConv1d(Var x, Var kernel, Var bias);

// g * a + (1 - g) * b, all the same shape, clamped entrywise into
// [min(a,b), max(a,b)]. g = 1 returns a and g = 0 returns b bit-exactly.
Var GatedMix(Var g, Var a, Var b);

// Mean binary cross-entropy of sigmoid(logits) against 0/1 targets, with
// positives weighted by pos_weight. Numerically stable form.
Var BceWithLogits(Var logits, const Tensor& targets, double pos_weight = 1.0);

}  // namespace utde
