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

#include "utde/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "utde/tensor/kernels.hpp"

namespace utde {
namespace {

Tape& SharedTape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw std::invalid_argument("operands live on different tapes");
  return a.tape();
}

Tensor Like(const Tensor& t, double fill = 0.0) { return Tensor(t.shape(), fill); }

[[noreturn]] void ShapeFail(const char* op, const Tensor& a, const Tensor& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + ShapeString(a.shape()) +
                       " and " + ShapeString(b.shape()));
}

template <typename Fwd, typename Dfdx>
Var Unary(Var x, Fwd fwd, Dfdx dfdx) {
  const Tensor& xv = x.value();
  Tensor out = Like(xv);
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = fwd(xv[i]);
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, dfdx](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    const Tensor& xv = t.value(xi);
    const Tensor& yv = t.value(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dfdx(xv[i], yv[i]);
  });
}

}  // namespace

Var Add(Var a, Var b) {
  Tape& tape = SharedTape(a, b);
  RequireSameShape(a.value(), b.value(), "Add");
  Tensor out = a.value();
  out += b.value();
  const std::size_t ai = a.id(), bi = b.id();
  return tape.Record(std::move(out), {ai, bi}, [ai, bi](Tape& t, std::size_t self) {
    t.AccumulateGrad(ai, t.upstream(self));
    t.AccumulateGrad(bi, t.upstream(self));
  });
}

Var Sub(Var a, Var b) {
  Tape& tape = SharedTape(a, b);
  RequireSameShape(a.value(), b.value(), "Sub");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor out = Like(av);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return tape.Record(std::move(out), {ai, bi}, [ai, bi](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    t.AccumulateGrad(ai, g);
    if (t.requires_grad(bi)) {
      Tensor& gb = t.GradBuffer(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Mul(Var a, Var b) {
  Tape& tape = SharedTape(a, b);
  RequireSameShape(a.value(), b.value(), "Mul");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor out = Like(av);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return tape.Record(std::move(out), {ai, bi}, [ai, bi](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    if (t.requires_grad(ai)) {
      const Tensor& bv = t.value(bi);
      Tensor& ga = t.GradBuffer(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(bi)) {
      const Tensor& av = t.value(ai);
      Tensor& gb = t.GradBuffer(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var ScaleBy(Var a, double factor) {
  return Unary(
      a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Var AddBias(Var x, Var bias) {
  Tape& tape = SharedTape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.size() != xv.cols()) ShapeFail("AddBias", xv, bv);
  Tensor out = xv;
  const std::size_t rows = xv.rows(), cols = xv.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) += bv[c];
  }
  const std::size_t xi = x.id(), bi = bias.id();
  return tape.Record(std::move(out), {xi, bi}, [xi, bi, rows, cols](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    t.AccumulateGrad(xi, g);
    if (t.requires_grad(bi)) {
      Tensor& gb = t.GradBuffer(bi);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) gb[c] += g(r, c);
      }
    }
  });
}

Var Sin(Var x) {
  return Unary(
      x, [](double v) { return std::sin(v); },
      [](double v, double) { return std::cos(v); });
}

Var Sigmoid(Var x) {
  return Unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Relu(Var x) {
  return Unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var MatMul(Var a, Var b) {
  Tape& tape = SharedTape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) ShapeFail("MatMul", av, bv);
  Tensor out = Tensor::Matrix(m, n);
  kernels::GemmNN(av.values().data(), bv.values().data(), out.values().data(), m, k, n);
  const std::size_t ai = a.id(), bi = b.id();
  return tape.Record(std::move(out), {ai, bi}, [ai, bi, m, k, n](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    if (t.requires_grad(ai)) {
      kernels::GemmNT(g.values().data(), t.value(bi).values().data(),
                      t.GradBuffer(ai).values().data(), m, n, k);
    }
    if (t.requires_grad(bi)) {
      kernels::GemmTN(t.value(ai).values().data(), g.values().data(),
                      t.GradBuffer(bi).values().data(), k, m, n);
    }
  });
}

Var Transpose(Var x) {
  const Tensor& xv = x.value();
  const std::size_t r = xv.rows(), c = xv.cols();
  Tensor out = Tensor::Matrix(c, r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out(j, i) = xv(i, j);
  }
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, r, c](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) gx(i, j) += g(j, i);
    }
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no inputs");
  Tape& tape = parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    if (&p.tape() != &tape) throw std::invalid_argument("ConcatCols: mixed tapes");
    if (p.rows() != rows) ShapeFail("ConcatCols", parts.front().value(), p.value());
    ids.push_back(p.id());
    widths.push_back(p.cols());
    total += p.cols();
  }
  Tensor out = Tensor::Matrix(rows, total);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(pv.row(r).begin(), pv.row(r).end(), out.row(r).begin() + offset);
    }
    offset += pv.cols();
  }
  return tape.Record(std::move(out), ids, [ids, widths, rows](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (t.requires_grad(ids[p])) {
        Tensor& gp = t.GradBuffer(ids[p]);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < widths[p]; ++c) gp(r, c) += g(r, offset + c);
        }
      }
      offset += widths[p];
    }
  });
}

Var SliceCols(Var x, std::size_t start, std::size_t count) {
  const Tensor& xv = x.value();
  if (count == 0 || start + count > xv.cols()) {
    throw DimensionError("SliceCols: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of range for " + ShapeString(xv.shape()));
  }
  const std::size_t rows = xv.rows();
  Tensor out = Tensor::Matrix(rows, count);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = xv(r, start + c);
  }
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, rows, start, count](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < count; ++c) gx(r, start + c) += g(r, c);
    }
  });
}

Var SliceRows(Var x, std::size_t start, std::size_t count) {
  const Tensor& xv = x.value();
  if (count == 0 || start + count > xv.rows()) {
    throw DimensionError("SliceRows: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of range for " + ShapeString(xv.shape()));
  }
  const std::size_t cols = xv.cols();
  std::vector<double> data(xv.values().begin() + start * cols,
                           xv.values().begin() + (start + count) * cols);
  const std::size_t xi = x.id();
  return x.tape().Record(Tensor({count, cols}, std::move(data)), {xi},
                         [xi, start, cols](Tape& t, std::size_t self) {
                           const Tensor& g = t.upstream(self);
                           Tensor& gx = t.GradBuffer(xi);
                           for (std::size_t i = 0; i < g.size(); ++i) gx[start * cols + i] += g[i];
                         });
}

Var PadRows(Var x, std::size_t rows) {
  const Tensor& xv = x.value();
  if (rows < xv.rows()) throw DimensionError("PadRows: target smaller than input");
  Tensor out = Tensor::Matrix(rows, xv.cols());
  std::copy(xv.values().begin(), xv.values().end(), out.values().begin());
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
  });
}

Var BroadcastTo(Var x, std::size_t rows, std::size_t cols) {
  const Tensor& xv = x.value();
  const std::size_t xr = xv.rows(), xc = xv.cols();
  if ((xr != 1 && xr != rows) || (xc != 1 && xc != cols)) {
    throw DimensionError("BroadcastTo: cannot expand " + ShapeString(xv.shape()) + " to [" +
                         std::to_string(rows) + "x" + std::to_string(cols) + "]");
  }
  Tensor out = Tensor::Matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = xv(xr == 1 ? 0 : r, xc == 1 ? 0 : c);
    }
  }
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, xr, xc, rows, cols](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) gx(xr == 1 ? 0 : r, xc == 1 ? 0 : c) += g(r, c);
    }
  });
}

Var Sum(Var x) {
  const Tensor& xv = x.value();
  double s = 0.0;
  for (double v : xv.values()) s += v;
  const std::size_t xi = x.id();
  return x.tape().Record(Tensor::Scalar(s), {xi}, [xi](Tape& t, std::size_t self) {
    const double g = t.upstream(self)[0];
    Tensor& gx = t.GradBuffer(xi);
    for (double& v : gx.values()) v += g;
  });
}

Var Mean(Var x) { return ScaleBy(Sum(x), 1.0 / static_cast<double>(x.value().size())); }

Var MeanOverRows(Var x) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor out = Tensor::Matrix(1, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c] += xv(r, c);
  }
  const double inv = 1.0 / static_cast<double>(rows);
  for (double& v : out.values()) v *= inv;
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, rows, cols, inv](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) gx(r, c) += g[c] * inv;
    }
  });
}

Var MeanOverCols(Var x) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor out = Tensor::Matrix(rows, 1);
  const double inv = 1.0 / static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += xv(r, c);
    out[r] = s * inv;
  }
  const std::size_t xi = x.id();
  return x.tape().Record(std::move(out), {xi}, [xi, rows, cols, inv](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    Tensor& gx = t.GradBuffer(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) gx(r, c) += g[r] * inv;
    }
  });
}

Var MaskedSoftmax(Var scores, const Mask& mask, bool* degenerate) {
  const Tensor& sv = scores.value();
  const std::size_t rows = sv.rows(), cols = sv.cols();
  if (mask.size() != cols) {
    throw DimensionError("MaskedSoftmax: mask length " + std::to_string(mask.size()) +
                         " vs scores " + ShapeString(sv.shape()));
  }
  const bool any = std::find(mask.begin(), mask.end(), true) != mask.end();
  if (degenerate) *degenerate = !any;
  Tensor out = Tensor::Matrix(rows, cols);
  if (any) {
    for (std::size_t r = 0; r < rows; ++r) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cols; ++c) {
        if (mask[c]) mx = std::max(mx, sv(r, c));
      }
      double total = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!mask[c]) continue;
        out(r, c) = std::exp(sv(r, c) - mx);
        total += out(r, c);
      }
      for (std::size_t c = 0; c < cols; ++c) out(r, c) /= total;
    }
  }
  const std::size_t si = scores.id();
  return scores.tape().Record(std::move(out), {si}, [si, rows, cols](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    const Tensor& w = t.value(self);
    Tensor& gs = t.GradBuffer(si);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += g(r, c) * w(r, c);
      for (std::size_t c = 0; c < cols; ++c) gs(r, c) += w(r, c) * (g(r, c) - dot);
    }
  });
}

Var Softmax(Var scores) { return MaskedSoftmax(scores, Mask(scores.cols(), true)); }

Var ConvexCombine(Var weights, Var values) {
  Tape& tape = SharedTape(weights, values);
  const Tensor& wv = weights.value();
  const Tensor& vv = values.value();
  const std::size_t q = wv.rows(), k = wv.cols(), c = vv.cols();
  if (vv.rows() != k) ShapeFail("ConvexCombine", wv, vv);
  Tensor out = Tensor::Matrix(q, c);
  kernels::GemmNN(wv.values().data(), vv.values().data(), out.values().data(), q, k, c);
  std::vector<double> lo(c, std::numeric_limits<double>::infinity());
  std::vector<double> hi(c, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < c; ++j) {
      lo[j] = std::min(lo[j], vv(r, j));
      hi[j] = std::max(hi[j], vv(r, j));
    }
  }
  for (std::size_t a = 0; a < q; ++a) {
    const auto w_row = wv.row(a);
    if (std::all_of(w_row.begin(), w_row.end(), [](double w) { return w == 0.0; })) continue;
    for (std::size_t j = 0; j < c; ++j) out(a, j) = std::clamp(out(a, j), lo[j], hi[j]);
  }
  const std::size_t wi = weights.id(), vi = values.id();
  return tape.Record(std::move(out), {wi, vi}, [wi, vi, q, k, c](Tape& t, std::size_t self) {
    const Tensor& g = t.upstream(self);
    if (t.requires_grad(wi)) {
      kernels::GemmNT(g.values().data(), t.value(vi).values().data(),
                      t.GradBuffer(wi).values().data(), q, c, k);
    }
    if (t.requires_grad(vi)) {
      kernels::GemmTN(t.value(wi).values().data(), g.values().data(),
                      t.GradBuffer(vi).values().data(), k, q, c);
    }
  });
}

Var SegmentAttention(Var scores, std::span<const std::size_t> offsets,
                     std::span<const double> values) {
  const Tensor& sv = scores.value();
  const std::size_t q = sv.rows(), n = sv.cols();
  if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != n || values.size() != n) {
    throw DimensionError("SegmentAttention: offsets/values do not partition " +
                         ShapeString(sv.shape()));
  }
  const std::size_t segments = offsets.size() - 1;
  Tensor weights = Tensor::Matrix(q, n);
  Tensor raw = Tensor::Matrix(q, segments);
  Tensor out = Tensor::Matrix(q, segments);
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t begin = offsets[s], end = offsets[s + 1];
    if (end < begin) throw DimensionError("SegmentAttention: offsets must be non-decreasing");
    if (begin == end) continue;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin() + begin, values.begin() + end);
    const double lo = *lo_it, hi = *hi_it;
    for (std::size_t a = 0; a < q; ++a) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = begin; k < end; ++k) mx = std::max(mx, sv(a, k));
      double total = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        weights(a, k) = std::exp(sv(a, k) - mx);
        total += weights(a, k);
      }
      double acc = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        weights(a, k) /= total;
        acc += weights(a, k) * values[k];
      }
      raw(a, s) = acc;
      out(a, s) = std::clamp(acc, lo, hi);
    }
  }
  const std::size_t si = scores.id();
  std::vector<std::size_t> offs(offsets.begin(), offsets.end());
  std::vector<double> vals(values.begin(), values.end());
  return scores.tape().Record(
      std::move(out), {si},
      [si, q, segments, offs = std::move(offs), vals = std::move(vals),
       weights = std::move(weights), raw = std::move(raw)](Tape& t, std::size_t self) {
        const Tensor& g = t.upstream(self);
        Tensor& gs = t.GradBuffer(si);
        for (std::size_t s = 0; s < segments; ++s) {
          for (std::size_t a = 0; a < q; ++a) {
            const double ga = g(a, s);
            if (ga == 0.0) continue;
            for (std::size_t k = offs[s]; k < offs[s + 1]; ++k) {
              gs(a, k) += ga * weights(a, k) * (vals[k] - raw(a, s));
            }
          }
        }
      });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  Tape& tape = SharedTape(x, gain);
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), d = xv.cols();
  if (gain.value().size() != d || bias.value().size() != d) {
    ShapeFail("LayerNorm", xv, gain.value().size() != d ? gain.value() : bias.value());
  }
  const Tensor& gv = gain.value();
  const Tensor& bv = bias.value();
  Tensor normed = Like(xv);
  std::vector<double> rstd(rows);
  Tensor out = Like(xv);
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += xv(r, c);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (xv(r, c) - mean) * (xv(r, c) - mean);
    var /= static_cast<double>(d);
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      normed(r, c) = (xv(r, c) - mean) * rstd[r];
      out(r, c) = normed(r, c) * gv[c] + bv[c];
    }
  }
  const std::size_t xi = x.id(), gi = gain.id(), bi = bias.id();
  return tape.Record(
      std::move(out), {xi, gi, bi},
      [xi, gi, bi, rows, d, normed = std::move(normed), rstd = std::move(rstd)](Tape& t,
                                                                                std::size_t self) {
        const Tensor& g = t.upstream(self);
        const Tensor& gv = t.value(gi);
        if (t.requires_grad(gi) || t.requires_grad(bi)) {
          Tensor& gg = t.GradBuffer(gi);
          Tensor& gb = t.GradBuffer(bi);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
              gg[c] += g(r, c) * normed(r, c);
              gb[c] += g(r, c);
            }
          }
        }
        if (!t.requires_grad(xi)) return;
        Tensor& gx = t.GradBuffer(xi);
        const double inv_d = 1.0 / static_cast<double>(d);
        for (std::size_t r = 0; r < rows; ++r) {
          double mean_g = 0.0, mean_gn = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double gn = g(r, c) * gv[c];
            mean_g += gn;
            mean_gn += gn * normed(r, c);
          }
          mean_g *= inv_d;
          mean_gn *= inv_d;
          for (std::size_t c = 0; c < d; ++c) {
            const double gn = g(r, c) * gv[c];
            gx(r, c) += rstd[r] * (gn - mean_g - normed(r, c) * mean_gn);
          }
        }
      });
}

Var CausalConv1d(Var x, Var kernel, Var bias) {
  Tape& tape = SharedTape(x, kernel);
  const Tensor& xv = x.value();
  const Tensor& kv = kernel.value();
  const Tensor& bv = bias.value();
  const std::size_t steps = xv.rows(), cin = xv.cols();
  if (kv.shape().size() != 3 || kv.shape()[1] != cin) ShapeFail("CausalConv1d", xv, kv);
  const std::size_t taps = kv.shape()[0], cout = kv.shape()[2];
  if (bv.size() != cout) ShapeFail("CausalConv1d", kv, bv);
  // Tap j multiplies input row t - (taps - 1 - j).
  Tensor out = Tensor::Matrix(steps, cout);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t o = 0; o < cout; ++o) out(t, o) = bv[o];
    for (std::size_t j = 0; j < taps; ++j) {
      const std::size_t lag = taps - 1 - j;
      if (lag > t) continue;
      kernels::GemmNN(xv.values().data() + (t - lag) * cin, kv.values().data() + j * cin * cout,
                        out.values().data() + t * cout, 1, cin, cout);
    }
  }
  const std::size_t xi = x.id(), ki = kernel.id(), bi = bias.id();
  return tape.Record(std::move(out), {xi, ki, bi},
                     [xi, ki, bi, steps, cin, cout, taps](Tape& t, std::size_t self) {
                       const Tensor& g = t.upstream(self);
                       if (t.requires_grad(bi)) {
                         Tensor& gb = t.GradBuffer(bi);
                         for (std::size_t s = 0; s < steps; ++s) {
                           for (std::size_t o = 0; o < cout; ++o) gb[o] += g(s, o);
                         }
                       }
                       const Tensor& xv = t.value(xi);
                       const Tensor& kv = t.value(ki);
                       for (std::size_t j = 0; j < taps; ++j) {
                         const std::size_t lag = taps - 1 - j;
                         if (lag >= steps) continue;
                         const std::size_t n = steps - lag;
                         // rows [lag, steps) of g pair with rows [0, n) of x
                         if (t.requires_grad(ki)) {
                           kernels::GemmTN(xv.values().data(), g.values().data() + lag * cout,
                                           t.GradBuffer(ki).values().data() + j * cin * cout, cin, n, cout);
                         }
                         if (t.requires_grad(xi)) {
                           kernels::GemmNT(g.values().data() + lag * cout, kv.values().data() + j * cin * cout,
                                           t.GradBuffer(xi).values().data(), n, cout, cin);
                         }
                       }
                     });
}

Var GatedMix(Var g, Var a, Var b) {
  Tape& tape = SharedTape(g, a);
  const Tensor& gv = g.value();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  RequireSameShape(gv, av, "GatedMix");
  RequireSameShape(av, bv, "GatedMix");
  Tensor out = Like(av);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mixed = gv[i] * av[i] + (1.0 - gv[i]) * bv[i];
    out[i] = std::clamp(mixed, std::min(av[i], bv[i]), std::max(av[i], bv[i]));
  }
  const std::size_t gi = g.id(), ai = a.id(), bi = b.id();
  return tape.Record(std::move(out), {gi, ai, bi}, [gi, ai, bi](Tape& t, std::size_t self) {
    const Tensor& up = t.upstream(self);
    const Tensor& gv = t.value(gi);
    const Tensor& av = t.value(ai);
    const Tensor& bv = t.value(bi);
    if (t.requires_grad(gi)) {
      Tensor& gg = t.GradBuffer(gi);
      for (std::size_t i = 0; i < up.size(); ++i) gg[i] += up[i] * (av[i] - bv[i]);
    }
    if (t.requires_grad(ai)) {
      Tensor& ga = t.GradBuffer(ai);
      for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i] * gv[i];
    }
    if (t.requires_grad(bi)) {
      Tensor& gb = t.GradBuffer(bi);
      for (std::size_t i = 0; i < up.size(); ++i) gb[i] += up[i] * (1.0 - gv[i]);
    }
  });
}

Var BceWithLogits(Var logits, const Tensor& targets, double pos_weight) {
  const Tensor& lv = logits.value();
  if (targets.size() != lv.size()) ShapeFail("BceWithLogits", lv, targets);
  auto softplus = [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); };
  double total = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double y = targets[i];
    total += pos_weight * y * softplus(-lv[i]) + (1.0 - y) * softplus(lv[i]);
  }
  const double inv = 1.0 / static_cast<double>(lv.size());
  const std::size_t li = logits.id();
  return logits.tape().Record(
      Tensor::Scalar(total * inv), {li}, [li, targets, pos_weight, inv](Tape& t, std::size_t self) {
        const double up = t.upstream(self)[0] * inv;
        const Tensor& lv = t.value(li);
        Tensor& gl = t.GradBuffer(li);
        for (std::size_t i = 0; i < lv.size(); ++i) {
          const double x = lv[i];
          const double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
          const double y = targets[i];
          gl[i] += up * (pos_weight * y * (s - 1.0) + (1.0 - y) * s);
        }
      });
}

}  // namespace utde
