// tests/unit/autograd_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "selffilm/autograd/ops.h"
#include "selffilm/autograd/parameters.h"
#include "selffilm/base/common.h"
#include "support/gradcheck.h"

using namespace selffilm;
using selffilm::testing::CheckGradients;
using selffilm::testing::RandomProjection;
using selffilm::testing::RandomTensor;

namespace {

constexpr double kTol = 1e-3;

Variable Param(const Shape &shape, std::mt19937_64 &rng, double scale = 1.0) {
  return MakeParameter(RandomTensor(shape, rng, scale));
}

// Direct triple-loop convolution, used as the oracle for Conv1d.
Tensor NaiveConv(const Tensor &x, const Tensor &w, const Tensor &b,
                 const ConvGeometry &g) {
  const int64_t B = x.Dim(0), cin = x.Dim(1), T = x.Dim(2);
  const int64_t cout = w.Dim(0), K = w.Dim(2);
  const int64_t t_out = Conv1dOutputLength(T, K, g);
  Tensor y({B, cout, t_out});
  for (int64_t bi = 0; bi < B; ++bi)
    for (int64_t co = 0; co < cout; ++co)
      for (int64_t t = 0; t < t_out; ++t) {
        double acc = b.Empty() ? 0.0 : b[co];
        for (int64_t ci = 0; ci < cin; ++ci)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t src = t * g.stride + k * g.dilation - g.pad_left;
            if (src >= 0 && src < T)
              acc += w[(co * cin + ci) * K + k] * x[(bi * cin + ci) * T + src];
          }
        y[(bi * cout + co) * t_out + t] = acc;
      }
  return y;
}

}  // namespace

TEST_CASE("elementwise ops match finite differences") {
  std::mt19937_64 rng(1);
  Variable a = Param({3, 5}, rng), b = Param({3, 5}, rng);
  auto loss = [&] {
    Variable y = Add(Mul(Tanh(a), Sigmoid(b)), Sub(Square(a), Scale(b, 0.3)));
    y = Add(y, LeakyRelu(Sub(a, b), 0.2));
    y = Add(y, Log(AddScalar(Square(b), 1.0)));
    return RandomProjection(Add(y, Abs(AddScalar(a, 3.0))));
  };
  auto r = CheckGradients(loss, {{"a", a}, {"b", b}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("reductions and reshapes match finite differences") {
  std::mt19937_64 rng(2);
  Variable x = Param({2, 3, 4}, rng);
  auto loss = [&] {
    Variable y = TransposeLast2(x);                 // [2, 4, 3]
    Variable z = PadLast(SliceLast(y, 1, 2), 1, 2);  // [2, 4, 5]
    Variable m = MeanOverLast(z);                    // [2, 4]
    Variable c = ConcatRows({m, Reshape(x, {6, 4})});       // [8, 4]
    return Add(RandomProjection(c), Mean(Square(x)));
  };
  auto r = CheckGradients(loss, {{"x", x}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("dense algebra matches finite differences") {
  std::mt19937_64 rng(3);
  Variable a = Param({4, 3}, rng), b = Param({3, 5}, rng);
  Variable w = Param({6, 3}, rng), bias = Param({6}, rng);
  auto loss = [&] {
    Variable y = MatMul(a, b);
    Variable z = L2NormalizeRows(Linear(a, w, bias));
    return Add(RandomProjection(y, 1), RandomProjection(z, 2));
  };
  auto r = CheckGradients(loss, {{"a", a}, {"b", b}, {"w", w}, {"bias", bias}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("Conv1d matches the direct convolution") {
  std::mt19937_64 rng(4);
  for (ConvGeometry g : {ConvGeometry{1, 1, 0, 0}, ConvGeometry{2, 1, 1, 2},
                         ConvGeometry{1, 3, 3, 3}, ConvGeometry{8, 1, 0, 0}}) {
    Tensor x = RandomTensor({2, 3, 37}, rng);
    Tensor w = RandomTensor({4, 3, g.stride == 8 ? 16 : 3}, rng);
    Tensor b = RandomTensor({4}, rng);
    Variable y = Conv1d(Variable(x), Variable(w), Variable(b), g);
    Tensor ref = NaiveConv(x, w, b, g);
    REQUIRE(y.Dims() == ref.Dims());
    for (int64_t i = 0; i < ref.Size(); ++i)
      CHECK(y.Value()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("Conv1d gradients match finite differences") {
  std::mt19937_64 rng(5);
  Variable x = Param({2, 3, 20}, rng);
  Variable w = Param({4, 3, 3}, rng), b = Param({4}, rng);
  Variable w1 = Param({2, 4, 1}, rng);
  auto loss = [&] {
    Variable h = Conv1d(x, w, b, {2, 2, 2, 1});
    return RandomProjection(Conv1d(h, w1, Variable(), {}));
  };
  auto r = CheckGradients(loss, {{"x", x}, {"w", w}, {"b", b}, {"w1", w1}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("ConvTranspose1d is the adjoint of the strided convolution") {
  std::mt19937_64 rng(6);
  // <conv(u), v> == <u, convT(v)> for matching geometry and no bias.
  Tensor w = RandomTensor({3, 2, 16}, rng);  // conv: 2 -> 3 channels
  Tensor u = RandomTensor({1, 2, 64}, rng);
  Variable cu = Conv1d(Variable(u), Variable(w), Variable(), {8, 1, 0, 0});
  Tensor v = RandomTensor(cu.Dims(), rng);
  Variable tv = ConvTranspose1d(Variable(v), Variable(w), Variable(), 8);
  REQUIRE(tv.Dims() == u.Dims());
  double lhs = 0, rhs = 0;
  for (int64_t i = 0; i < v.Size(); ++i) lhs += cu.Value()[i] * v[i];
  for (int64_t i = 0; i < u.Size(); ++i) rhs += u[i] * tv.Value()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  Variable x = Param({2, 3, 6}, rng);
  Variable wt = Param({3, 2, 4}, rng), bt = Param({2}, rng);
  auto loss = [&] { return RandomProjection(ConvTranspose1d(x, wt, bt, 2)); };
  auto r = CheckGradients(loss, {{"x", x}, {"w", wt}, {"b", bt}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("classification losses match finite differences") {
  std::mt19937_64 rng(7);
  Variable emb = Param({5, 4}, rng), centers = Param({3, 4}, rng);
  std::vector<int> labels{0, 2, 1, 1, 0};
  auto loss = [&] {
    // cosines [5, 3] = normalized emb x normalized centers^T.
    Variable normalized = Reshape(L2NormalizeRows(centers), {1, 3, 4});
    Variable cos = MatMul(L2NormalizeRows(emb),
                          Reshape(TransposeLast2(normalized), {4, 3}));
    return CrossEntropy(AngularMarginLogits(cos, labels, 0.3, 5.0), labels);
  };
  auto r = CheckGradients(loss, {{"emb", emb}, {"centers", centers}});
  CHECK(r.worst_relative_error < kTol);
}

TEST_CASE("cross entropy of uniform logits is log C") {
  Variable logits(Tensor({2, 4}, 0.5));
  CHECK(CrossEntropy(logits, {1, 3}).Value().Item() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("shape errors are rejected") {
  Variable a(Tensor({2, 3})), b(Tensor({3, 2}));
  CHECK_THROWS_AS(Add(a, b), InvalidArgument);
  CHECK_THROWS_AS(MatMul(a, a), InvalidArgument);
  CHECK_THROWS_AS(Conv1d(Variable(Tensor({1, 2, 4})), Variable(Tensor({1, 3, 3})),
                         Variable(), {}),
                  InvalidArgument);
  CHECK_THROWS_AS(Variable(Tensor({2})).Backward(), InvalidArgument);
}

TEST_CASE("no-grad mode records nothing and detach cuts the graph") {
  std::mt19937_64 rng(8);
  Variable p = Param({3}, rng);
  {
    NoGradGuard guard;
    CHECK_FALSE(Square(p).RequiresGrad());
  }
  CHECK(Square(p).RequiresGrad());
  CHECK_FALSE(Square(p.Detach()).RequiresGrad());
}

TEST_CASE("Adam moves a quadratic toward its minimum") {
  Variable x = MakeParameter(Tensor({2}, std::vector<double>{3.0, -2.0}));
  Adam opt({{"x", x}}, {.learning_rate = 0.1, .beta1 = 0.9});
  for (int i = 0; i < 300; ++i) {
    Sum(Square(x)).Backward();
    opt.Step();
  }
  CHECK(std::abs(x.Value()[0]) < 0.05);
  CHECK(std::abs(x.Value()[1]) < 0.05);
}
