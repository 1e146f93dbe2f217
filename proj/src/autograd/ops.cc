// autograd/ops.cc

// Copyright 2026  The selffilm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "selffilm/autograd/ops.h"

#include <algorithm>
#include <cmath>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {

void RequireSameShape(const Variable &a, const Variable &b, const char *op) {
  Require(a.Dims() == b.Dims(), op, ": shape mismatch ",
          ShapeString(a.Dims()), " vs ", ShapeString(b.Dims()));
}

// y = f(x) elementwise; dfdx(x) supplies the local derivative.
template <typename F, typename DF>
Variable Unary(const Variable &a, F f, DF dfdx) {
  const Tensor &x = a.Value();
  Tensor y(x.Dims());
  for (int64_t i = 0; i < x.Size(); ++i) y[i] = f(x[i]);
  return Variable::Create(
      std::move(y), {a},
      [dfdx](const Tensor &g, std::vector<Variable> &in) {
        const Tensor &xv = in[0].Value();
        Tensor &gx = in[0].GradRef();
        for (int64_t i = 0; i < g.Size(); ++i) gx[i] += g[i] * dfdx(xv[i]);
      });
}

}  // namespace

Variable Add(const Variable &a, const Variable &b) {
  RequireSameShape(a, b, "Add");
  Tensor y = a.Value();
  y += b.Value();
  return Variable::Create(std::move(y), {a, b},
                          [](const Tensor &g, std::vector<Variable> &in) {
                            for (auto &v : in)
                              if (v.RequiresGrad()) v.GradRef() += g;
                          });
}

Variable Sub(const Variable &a, const Variable &b) {
  RequireSameShape(a, b, "Sub");
  Tensor y = a.Value();
  y.AddScaled(b.Value(), -1.0);
  return Variable::Create(std::move(y), {a, b},
                          [](const Tensor &g, std::vector<Variable> &in) {
                            if (in[0].RequiresGrad()) in[0].GradRef() += g;
                            if (in[1].RequiresGrad())
                              in[1].GradRef().AddScaled(g, -1.0);
                          });
}

Variable Mul(const Variable &a, const Variable &b) {
  RequireSameShape(a, b, "Mul");
  const Tensor &x = a.Value(), &z = b.Value();
  Tensor y(x.Dims());
  for (int64_t i = 0; i < y.Size(); ++i) y[i] = x[i] * z[i];
  return Variable::Create(
      std::move(y), {a, b}, [](const Tensor &g, std::vector<Variable> &in) {
        const Tensor &xv = in[0].Value(), &zv = in[1].Value();
        if (in[0].RequiresGrad()) {
          Tensor &gx = in[0].GradRef();
          for (int64_t i = 0; i < g.Size(); ++i) gx[i] += g[i] * zv[i];
        }
        if (in[1].RequiresGrad()) {
          Tensor &gz = in[1].GradRef();
          for (int64_t i = 0; i < g.Size(); ++i) gz[i] += g[i] * xv[i];
        }
      });
}

Variable Scale(const Variable &a, double s) {
  return Unary(
      a, [s](double x) { return s * x; }, [s](double) { return s; });
}

Variable AddScalar(const Variable &a, double s) {
  return Unary(
      a, [s](double x) { return x + s; }, [](double) { return 1.0; });
}

Variable Relu(const Variable &a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Variable LeakyRelu(const Variable &a, double slope) {
  return Unary(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x) { return x > 0.0 ? 1.0 : slope; });
}

Variable Sigmoid(const Variable &a) {
  auto sig = [](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
  };
  return Unary(a, sig, [sig](double x) {
    double s = sig(x);
    return s * (1.0 - s);
  });
}

Variable Tanh(const Variable &a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double x) {
        double t = std::tanh(x);
        return 1.0 - t * t;
      });
}

Variable Abs(const Variable &a) {
  return Unary(
      a, [](double x) { return std::abs(x); },
      [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Variable Square(const Variable &a) {
  return Unary(
      a, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Variable Log(const Variable &a, double eps) {
  for (double v : a.Value().Values())
    Require(v + eps > 0.0, "Log: non-positive argument ", v + eps);
  return Unary(
      a, [eps](double x) { return std::log(x + eps); },
      [eps](double x) { return 1.0 / (x + eps); });
}

Variable Sum(const Variable &a) {
  double s = a.Value().AsMatrix(1, a.Size()).sum();
  return Variable::Create(Tensor::Scalar(s), {a},
                          [](const Tensor &g, std::vector<Variable> &in) {
                            Tensor &gx = in[0].GradRef();
                            const double gv = g[0];
                            for (int64_t i = 0; i < gx.Size(); ++i)
                              gx[i] += gv;
                          });
}

Variable Mean(const Variable &a) {
  Require(a.Size() > 0, "Mean of empty tensor");
  const double n = static_cast<double>(a.Size());
  double s = a.Value().AsMatrix(1, a.Size()).sum() / n;
  return Variable::Create(Tensor::Scalar(s), {a},
                          [n](const Tensor &g, std::vector<Variable> &in) {
                            Tensor &gx = in[0].GradRef();
                            const double gv = g[0] / n;
                            for (int64_t i = 0; i < gx.Size(); ++i)
                              gx[i] += gv;
                          });
}

Variable Reshape(const Variable &a, Shape shape) {
  Tensor y = a.Value().Reshaped(std::move(shape));
  return Variable::Create(std::move(y), {a},
                          [](const Tensor &g, std::vector<Variable> &in) {
                            in[0].GradRef().AddScaled(g, 1.0);
                          });
}

Variable TransposeLast2(const Variable &a) {
  Require(a.Value().Rank() == 3, "TransposeLast2 needs rank 3, got ",
          ShapeString(a.Dims()));
  const int64_t B = a.Dim(0), R = a.Dim(1), C = a.Dim(2);
  Tensor y({B, C, R});
  for (int64_t b = 0; b < B; ++b)
    y.AsMatrix(B * C, R).middleRows(b * C, C) =
        a.Value().AsMatrix(B * R, C).middleRows(b * R, R).transpose();
  return Variable::Create(
      std::move(y), {a},
      [B, R, C](const Tensor &g, std::vector<Variable> &in) {
        Tensor &gx = in[0].GradRef();
        for (int64_t b = 0; b < B; ++b)
          gx.AsMatrix(B * R, C).middleRows(b * R, R) +=
              g.AsMatrix(B * C, R).middleRows(b * C, C).transpose();
      });
}

Variable SliceLast(const Variable &a, int64_t start, int64_t length) {
  const Shape &dims = a.Dims();
  Require(!dims.empty(), "SliceLast on scalar");
  const int64_t T = dims.back();
  Require(start >= 0 && length >= 0 && start + length <= T,
          "SliceLast: range [", start, ", ", start + length,
          ") outside length ", T);
  const int64_t rows = a.Size() / std::max<int64_t>(T, 1);
  Shape out_dims = dims;
  out_dims.back() = length;
  Tensor y(out_dims);
  const double *src = a.Value().Data();
  for (int64_t r = 0; r < rows; ++r)
    std::copy_n(src + r * T + start, length, y.Data() + r * length);
  return Variable::Create(
      std::move(y), {a},
      [rows, T, start, length](const Tensor &g, std::vector<Variable> &in) {
        Tensor &gx = in[0].GradRef();
        for (int64_t r = 0; r < rows; ++r)
          for (int64_t t = 0; t < length; ++t)
            gx[r * T + start + t] += g[r * length + t];
      });
}

Variable PadLast(const Variable &a, int64_t left, int64_t right) {
  Require(left >= 0 && right >= 0, "PadLast: negative padding");
  const Shape &dims = a.Dims();
  Require(!dims.empty(), "PadLast on scalar");
  const int64_t T = dims.back();
  const int64_t rows = T > 0 ? a.Size() / T : 0;
  Shape out_dims = dims;
  out_dims.back() = T + left + right;
  const int64_t To = out_dims.back();
  Tensor y(out_dims);
  for (int64_t r = 0; r < rows; ++r)
    std::copy_n(a.Value().Data() + r * T, T, y.Data() + r * To + left);
  return Variable::Create(
      std::move(y), {a},
      [rows, T, To, left](const Tensor &g, std::vector<Variable> &in) {
        Tensor &gx = in[0].GradRef();
        for (int64_t r = 0; r < rows; ++r)
          for (int64_t t = 0; t < T; ++t) gx[r * T + t] += g[r * To + left + t];
      });
}

Variable MeanOverLast(const Variable &a) {
  Require(a.Value().Rank() == 3, "MeanOverLast needs rank 3, got ",
          ShapeString(a.Dims()));
  const int64_t B = a.Dim(0), C = a.Dim(1), T = a.Dim(2);
  Require(T > 0, "MeanOverLast over empty axis");
  Tensor y({B, C});
  y.AsMatrix(B * C, 1) =
      a.Value().AsMatrix(B * C, T).rowwise().sum() / static_cast<double>(T);
  return Variable::Create(
      std::move(y), {a}, [B, C, T](const Tensor &g, std::vector<Variable> &in) {
        Tensor &gx = in[0].GradRef();
        const double inv = 1.0 / static_cast<double>(T);
        for (int64_t r = 0; r < B * C; ++r)
          for (int64_t t = 0; t < T; ++t) gx[r * T + t] += g[r] * inv;
      });
}

Variable ConcatRows(const std::vector<Variable> &parts) {
  Require(!parts.empty(), "ConcatRows of nothing");
  Shape dims = parts[0].Dims();
  Require(!dims.empty(), "ConcatRows on scalars");
  int64_t rows = 0;
  for (const auto &p : parts) {
    Require(p.Value().Rank() == dims.size() &&
                std::equal(dims.begin() + 1, dims.end(), p.Dims().begin() + 1),
            "ConcatRows: trailing shape mismatch ", ShapeString(dims), " vs ",
            ShapeString(p.Dims()));
    rows += p.Dim(0);
  }
  dims[0] = rows;
  Tensor y(dims);
  int64_t offset = 0;
  for (const auto &p : parts) {
    std::copy_n(p.Value().Data(), p.Size(), y.Data() + offset);
    offset += p.Size();
  }
  return Variable::Create(std::move(y), parts,
                          [](const Tensor &g, std::vector<Variable> &in) {
                            int64_t off = 0;
                            for (auto &v : in) {
                              if (v.RequiresGrad()) {
                                Tensor &gx = v.GradRef();
                                for (int64_t i = 0; i < gx.Size(); ++i)
                                  gx[i] += g[off + i];
                              }
                              off += v.Size();
                            }
                          });
}

Variable MatMul(const Variable &a, const Variable &b) {
  Require(a.Value().Rank() == 2 && b.Value().Rank() == 2 && a.Dim(1) == b.Dim(0),
          "MatMul: incompatible shapes ", ShapeString(a.Dims()), " x ",
          ShapeString(b.Dims()));
  Tensor y({a.Dim(0), b.Dim(1)});
  y.AsMatrix().noalias() = a.Value().AsMatrix() * b.Value().AsMatrix();
  return Variable::Create(
      std::move(y), {a, b}, [](const Tensor &g, std::vector<Variable> &in) {
        auto G = g.AsMatrix();
        if (in[0].RequiresGrad())
          in[0].GradRef().AsMatrix().noalias() +=
              G * in[1].Value().AsMatrix().transpose();
        if (in[1].RequiresGrad())
          in[1].GradRef().AsMatrix().noalias() +=
              in[0].Value().AsMatrix().transpose() * G;
      });
}

Variable Linear(const Variable &x, const Variable &weight,
                const Variable &bias) {
  Require(x.Value().Rank() == 2 && weight.Value().Rank() == 2 &&
              x.Dim(1) == weight.Dim(1),
          "Linear: input ", ShapeString(x.Dims()), " does not match weight ",
          ShapeString(weight.Dims()));
  const int64_t out = weight.Dim(0);
  const bool has_bias = bias.Defined();
  if (has_bias)
    Require(bias.Size() == out, "Linear: bias size ", bias.Size(),
            " != output dim ", out);
  Tensor y({x.Dim(0), out});
  y.AsMatrix().noalias() =
      x.Value().AsMatrix() * weight.Value().AsMatrix().transpose();
  if (has_bias)
    y.AsMatrix().rowwise() += bias.Value().AsMatrix(1, out).row(0);
  std::vector<Variable> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return Variable::Create(
      std::move(y), std::move(inputs),
      [out](const Tensor &g, std::vector<Variable> &in) {
        auto G = g.AsMatrix();
        if (in[0].RequiresGrad())
          in[0].GradRef().AsMatrix().noalias() += G * in[1].Value().AsMatrix();
        if (in[1].RequiresGrad())
          in[1].GradRef().AsMatrix().noalias() +=
              G.transpose() * in[0].Value().AsMatrix();
        if (in.size() > 2 && in[2].RequiresGrad())
          in[2].GradRef().AsMatrix(1, out) += G.colwise().sum();
      });
}

Variable L2NormalizeRows(const Variable &x, double eps) {
  Require(x.Value().Rank() == 2, "L2NormalizeRows needs rank 2");
  const int64_t N = x.Dim(0), D = x.Dim(1);
  Tensor y(x.Dims());
  std::vector<double> norms(N);
  auto X = x.Value().AsMatrix();
  auto Y = y.AsMatrix();
  for (int64_t i = 0; i < N; ++i) {
    norms[i] = std::max(X.row(i).norm(), eps);
    Y.row(i) = X.row(i) / norms[i];
  }
  return Variable::Create(
      std::move(y), {x},
      [N, D, norms](const Tensor &g, std::vector<Variable> &in) {
        auto Xv = in[0].Value().AsMatrix();
        auto G = g.AsMatrix();
        auto GX = in[0].GradRef().AsMatrix();
        for (int64_t i = 0; i < N; ++i) {
          Eigen::RowVectorXd yi = Xv.row(i) / norms[i];
          GX.row(i) += (G.row(i) - yi * yi.dot(G.row(i))) / norms[i];
        }
        (void)D;
      });
}

// ----------------------------------------------------------------------------
// Convolutions via im2col / col2im around a dense GEMM.

namespace {

struct ConvShape {
  int64_t cin, t_in, kernel, t_out;
  ConvGeometry g;
};

// Valid output index range [lo, hi) for which t*stride + offset lies in
// [0, t_in).
inline void ValidRange(int64_t offset, const ConvShape &s, int64_t *lo,
                       int64_t *hi) {
  const int64_t st = s.g.stride;
  int64_t a = offset >= 0 ? 0 : (-offset + st - 1) / st;
  int64_t b = s.t_in - offset <= 0 ? 0 : (s.t_in - offset + st - 1) / st;
  *lo = std::min(a, s.t_out);
  *hi = std::min(std::max(b, *lo), s.t_out);
}

void Im2Col(const double *x, const ConvShape &s, double *cols) {
  for (int64_t ci = 0; ci < s.cin; ++ci) {
    const double *xc = x + ci * s.t_in;
    for (int64_t k = 0; k < s.kernel; ++k) {
      double *row = cols + (ci * s.kernel + k) * s.t_out;
      const int64_t offset = k * s.g.dilation - s.g.pad_left;
      int64_t lo, hi;
      ValidRange(offset, s, &lo, &hi);
      std::fill(row, row + lo, 0.0);
      if (s.g.stride == 1) {
        std::copy(xc + lo + offset, xc + hi + offset, row + lo);
      } else {
        for (int64_t t = lo; t < hi; ++t) row[t] = xc[t * s.g.stride + offset];
      }
      std::fill(row + hi, row + s.t_out, 0.0);
    }
  }
}

void Col2ImAdd(const double *cols, const ConvShape &s, double *x) {
  for (int64_t ci = 0; ci < s.cin; ++ci) {
    double *xc = x + ci * s.t_in;
    for (int64_t k = 0; k < s.kernel; ++k) {
      const double *row = cols + (ci * s.kernel + k) * s.t_out;
      const int64_t offset = k * s.g.dilation - s.g.pad_left;
      int64_t lo, hi;
      ValidRange(offset, s, &lo, &hi);
      for (int64_t t = lo; t < hi; ++t) xc[t * s.g.stride + offset] += row[t];
    }
  }
}

inline bool IsPointwise(const ConvShape &s) {
  return s.kernel == 1 && s.g.stride == 1 && s.g.pad_left == 0 &&
         s.g.pad_right == 0;
}

}  // namespace

int64_t Conv1dOutputLength(int64_t length, int64_t kernel,
                           const ConvGeometry &g) {
  const int64_t span = g.dilation * (kernel - 1) + 1;
  const int64_t padded = length + g.pad_left + g.pad_right;
  if (padded < span) return 0;
  return (padded - span) / g.stride + 1;
}

Variable Conv1d(const Variable &x, const Variable &weight,
                const Variable &bias, const ConvGeometry &geom) {
  Require(x.Value().Rank() == 3, "Conv1d: input must be [B, C, T], got ",
          ShapeString(x.Dims()));
  Require(weight.Value().Rank() == 3 && weight.Dim(1) == x.Dim(1),
          "Conv1d: weight ", ShapeString(weight.Dims()),
          " does not match input ", ShapeString(x.Dims()));
  Require(geom.stride >= 1 && geom.dilation >= 1, "Conv1d: bad geometry");
  const int64_t B = x.Dim(0), cout = weight.Dim(0);
  ConvShape s{x.Dim(1), x.Dim(2), weight.Dim(2), 0, geom};
  s.t_out = Conv1dOutputLength(s.t_in, s.kernel, geom);
  Require(s.t_out > 0, "Conv1d: input length ", s.t_in,
          " too short for kernel ", s.kernel);
  const bool has_bias = bias.Defined();
  if (has_bias) Require(bias.Size() == cout, "Conv1d: bias size mismatch");

  Tensor y({B, cout, s.t_out});
  auto W = weight.Value().AsMatrix(cout, s.cin * s.kernel);
  const bool pointwise = IsPointwise(s);
  RowMatrix cols(pointwise ? 0 : s.cin * s.kernel, pointwise ? 0 : s.t_out);
  for (int64_t b = 0; b < B; ++b) {
    const double *xb = x.Value().Data() + b * s.cin * s.t_in;
    MatrixMap Y(y.Data() + b * cout * s.t_out, cout, s.t_out);
    if (pointwise) {
      Y.noalias() = W * ConstMatrixMap(xb, s.cin, s.t_out);
    } else {
      Im2Col(xb, s, cols.data());
      Y.noalias() = W * cols;
    }
    if (has_bias)
      Y.colwise() += bias.Value().AsMatrix(cout, 1).col(0);
  }

  std::vector<Variable> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return Variable::Create(
      std::move(y), std::move(inputs),
      [B, cout, s, pointwise](const Tensor &g, std::vector<Variable> &in) {
        const Tensor &xv = in[0].Value();
        auto W = in[1].Value().AsMatrix(cout, s.cin * s.kernel);
        RowMatrix cols(pointwise ? 0 : s.cin * s.kernel,
                       pointwise ? 0 : s.t_out);
        RowMatrix dcols;
        for (int64_t b = 0; b < B; ++b) {
          const double *xb = xv.Data() + b * s.cin * s.t_in;
          ConstMatrixMap G(g.Data() + b * cout * s.t_out, cout, s.t_out);
          if (in[1].RequiresGrad()) {
            auto GW = in[1].GradRef().AsMatrix(cout, s.cin * s.kernel);
            if (pointwise) {
              GW.noalias() += G * ConstMatrixMap(xb, s.cin, s.t_out).transpose();
            } else {
              Im2Col(xb, s, cols.data());
              GW.noalias() += G * cols.transpose();
            }
          }
          if (in.size() > 2 && in[2].RequiresGrad())
            in[2].GradRef().AsMatrix(cout, 1) += G.rowwise().sum();
          if (in[0].RequiresGrad()) {
            double *gx = in[0].GradRef().Data() + b * s.cin * s.t_in;
            if (pointwise) {
              MatrixMap(gx, s.cin, s.t_out).noalias() += W.transpose() * G;
            } else {
              dcols.noalias() = W.transpose() * G;
              Col2ImAdd(dcols.data(), s, gx);
            }
          }
        }
      });
}

Variable ConvTranspose1d(const Variable &x, const Variable &weight,
                         const Variable &bias, int64_t stride) {
  Require(x.Value().Rank() == 3, "ConvTranspose1d: input must be [B, C, T]");
  Require(weight.Value().Rank() == 3 && weight.Dim(0) == x.Dim(1),
          "ConvTranspose1d: weight ", ShapeString(weight.Dims()),
          " does not match input ", ShapeString(x.Dims()));
  Require(stride >= 1, "ConvTranspose1d: bad stride");
  const int64_t B = x.Dim(0), cin = x.Dim(1), T = x.Dim(2);
  const int64_t cout = weight.Dim(1), K = weight.Dim(2);
  const int64_t t_out = (T - 1) * stride + K;
  // The transposed conv is the adjoint of a stride-s conv from the output
  // space: cols[(co, k), t] <-> out[co, t * s + k].
  ConvShape s{cout, t_out, K, T, ConvGeometry{stride, 1, 0, 0}};
  const bool has_bias = bias.Defined();
  if (has_bias) Require(bias.Size() == cout, "ConvTranspose1d: bias size");

  Tensor y({B, cout, t_out});
  auto W = weight.Value().AsMatrix(cin, cout * K);
  RowMatrix cols;
  for (int64_t b = 0; b < B; ++b) {
    ConstMatrixMap X(x.Value().Data() + b * cin * T, cin, T);
    cols.noalias() = W.transpose() * X;
    double *yb = y.Data() + b * cout * t_out;
    Col2ImAdd(cols.data(), s, yb);
    if (has_bias)
      MatrixMap(yb, cout, t_out).colwise() +=
          bias.Value().AsMatrix(cout, 1).col(0);
  }

  std::vector<Variable> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return Variable::Create(
      std::move(y), std::move(inputs),
      [B, cin, T, cout, K, t_out, s](const Tensor &g,
                                     std::vector<Variable> &in) {
        auto W = in[1].Value().AsMatrix(cin, cout * K);
        RowMatrix dcols(cout * K, T);
        for (int64_t b = 0; b < B; ++b) {
          const double *gb = g.Data() + b * cout * t_out;
          Im2Col(gb, s, dcols.data());
          ConstMatrixMap X(in[0].Value().Data() + b * cin * T, cin, T);
          if (in[0].RequiresGrad())
            MatrixMap(in[0].GradRef().Data() + b * cin * T, cin, T).noalias() +=
                W * dcols;
          if (in[1].RequiresGrad())
            in[1].GradRef().AsMatrix(cin, cout * K).noalias() +=
                X * dcols.transpose();
          if (in.size() > 2 && in[2].RequiresGrad())
            in[2].GradRef().AsMatrix(cout, 1) +=
                ConstMatrixMap(gb, cout, t_out).rowwise().sum();
        }
      });
}

Variable CrossEntropy(const Variable &logits, const std::vector<int> &labels) {
  Require(logits.Value().Rank() == 2, "CrossEntropy: logits must be [N, C]");
  const int64_t N = logits.Dim(0), C = logits.Dim(1);
  Require(static_cast<int64_t>(labels.size()) == N,
          "CrossEntropy: ", labels.size(), " labels for ", N, " rows");
  auto L = logits.Value().AsMatrix();
  RowMatrix probs(N, C);
  double loss = 0.0;
  for (int64_t i = 0; i < N; ++i) {
    Require(labels[i] >= 0 && labels[i] < C, "CrossEntropy: label ",
            labels[i], " outside [0, ", C, ")");
    const double m = L.row(i).maxCoeff();
    probs.row(i) = (L.row(i).array() - m).exp();
    const double z = probs.row(i).sum();
    probs.row(i) /= z;
    loss -= L(i, labels[i]) - m - std::log(z);
  }
  loss /= static_cast<double>(N);
  return Variable::Create(
      Tensor::Scalar(loss), {logits},
      [N, probs, labels](const Tensor &g, std::vector<Variable> &in) {
        auto GL = in[0].GradRef().AsMatrix();
        const double scale = g[0] / static_cast<double>(N);
        for (int64_t i = 0; i < N; ++i) {
          GL.row(i) += scale * probs.row(i);
          GL(i, labels[i]) -= scale;
        }
      });
}

Variable AngularMarginLogits(const Variable &cosines,
                             const std::vector<int> &labels, double margin,
                             double scale) {
  Require(cosines.Value().Rank() == 2, "AngularMarginLogits: need [N, C]");
  const int64_t N = cosines.Dim(0), C = cosines.Dim(1);
  Require(static_cast<int64_t>(labels.size()) == N,
          "AngularMarginLogits: label count mismatch");
  constexpr double kClip = 1.0 - 1e-7;
  Tensor y = cosines.Value();
  std::vector<double> dtarget(N);
  for (int64_t i = 0; i < N; ++i) {
    Require(labels[i] >= 0 && labels[i] < C, "AngularMarginLogits: label");
    for (int64_t j = 0; j < C; ++j) y[i * C + j] *= scale;
    const double c = std::clamp(cosines.Value()[i * C + labels[i]], -kClip, kClip);
    const double theta = std::acos(c);
    y[i * C + labels[i]] = scale * std::cos(theta + margin);
    // d cos(acos(c) + m) / dc = sin(theta + m) / sin(theta).
    dtarget[i] = std::sin(theta + margin) / std::sin(theta);
  }
  return Variable::Create(
      std::move(y), {cosines},
      [N, C, labels, dtarget, scale](const Tensor &g,
                                     std::vector<Variable> &in) {
        Tensor &gc = in[0].GradRef();
        for (int64_t i = 0; i < N; ++i)
          for (int64_t j = 0; j < C; ++j)
            gc[i * C + j] += scale * g[i * C + j] *
                             (j == labels[i] ? dtarget[i] : 1.0);
      });
}

}  // namespace selffilm
