// autograd/ops.h

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

#ifndef SELFFILM_AUTOGRAD_OPS_H_
#define SELFFILM_AUTOGRAD_OPS_H_

#include <vector>

#include "selffilm/autograd/variable.h"

namespace selffilm {

// Elementwise; binary ops require identical shapes.
Variable Add(const Variable &a, const Variable &b);
Variable Sub(const Variable &a, const Variable &b);
Variable Mul(const Variable &a, const Variable &b);
Variable Scale(const Variable &a, double s);
Variable AddScalar(const Variable &a, double s);
Variable Relu(const Variable &a);
Variable LeakyRelu(const Variable &a, double slope);
Variable Sigmoid(const Variable &a);
Variable Tanh(const Variable &a);
Variable Abs(const Variable &a);
Variable Square(const Variable &a);
/// log(a + eps); a + eps must be positive.
Variable Log(const Variable &a, double eps = 0.0);

inline Variable operator+(const Variable &a, const Variable &b) { return Add(a, b); }
inline Variable operator-(const Variable &a, const Variable &b) { return Sub(a, b); }
inline Variable operator*(const Variable &a, const Variable &b) { return Mul(a, b); }
inline Variable operator*(double s, const Variable &a) { return Scale(a, s); }

// Reductions to a scalar.
Variable Sum(const Variable &a);
Variable Mean(const Variable &a);

// Shape manipulation.
Variable Reshape(const Variable &a, Shape shape);
/// [B, C, T] -> [B, T, C].
Variable TransposeLast2(const Variable &a);
/// Keeps [start, start + length) of the last axis.
Variable SliceLast(const Variable &a, int64_t start, int64_t length);
/// Zero-pads the last axis.
Variable PadLast(const Variable &a, int64_t left, int64_t right);
/// [B, C, T] -> [B, C], mean over T.
Variable MeanOverLast(const Variable &a);
/// Concatenates along axis 0; trailing dims must agree.
Variable ConcatRows(const std::vector<Variable> &parts);

// Dense algebra.
/// [M, K] x [K, N].
Variable MatMul(const Variable &a, const Variable &b);
/// [N, in] -> [N, out] with weight [out, in] and optional bias [out].
Variable Linear(const Variable &x, const Variable &weight, const Variable &bias);
/// Rows scaled to unit L2 norm.
Variable L2NormalizeRows(const Variable &x, double eps = 1e-12);

struct ConvGeometry {
  int64_t stride = 1;
  int64_t dilation = 1;
  int64_t pad_left = 0;
  int64_t pad_right = 0;
};

/// x [B, Cin, T], weight [Cout, Cin, K], bias [Cout] (may be undefined).
Variable Conv1d(const Variable &x, const Variable &weight,
                const Variable &bias, const ConvGeometry &geom);
int64_t Conv1dOutputLength(int64_t length, int64_t kernel,
                           const ConvGeometry &geom);

/// x [B, Cin, T], weight [Cin, Cout, K] -> [B, Cout, (T-1)*stride + K].
Variable ConvTranspose1d(const Variable &x, const Variable &weight,
                         const Variable &bias, int64_t stride);

// Classification.
/// Mean negative log-likelihood of `labels` under softmax(logits [N, C]).
Variable CrossEntropy(const Variable &logits, const std::vector<int> &labels);
/// Additive angular margin: cosines [N, C] -> scale * cos(theta + m) on the
/// label column and scale * cos(theta) elsewhere.
Variable AngularMarginLogits(const Variable &cosines,
                             const std::vector<int> &labels, double margin,
                             double scale);

}  // namespace selffilm

#endif  // SELFFILM_AUTOGRAD_OPS_H_
