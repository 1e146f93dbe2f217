// tests/unit/film_test.cc

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

#include "selffilm/base/common.h"
#include "selffilm/film/film.h"
#include "support/gradcheck.h"

using namespace selffilm;
using namespace selffilm::testing;

namespace {

FilmParams Constant(int64_t B, int64_t C, double gamma, double beta) {
  return {Variable(Tensor({B, C}, gamma)), Variable(Tensor({B, C}, beta))};
}

}  // namespace

TEST_CASE("strength zero and unit modulation are identities") {
  std::mt19937_64 rng(1);
  Variable F(RandomTensor({2, 3, 7}, rng));
  FilmParams p{Variable(RandomTensor({2, 3}, rng)),
               Variable(RandomTensor({2, 3}, rng))};
  Variable same = FilmApply(F, p, 0.0);
  CHECK(same.SameNode(F));
  CHECK(same.Value() == F.Value());
  CHECK(FilmApply(F, Constant(2, 3, 1.0, 0.0), 1.0).Value() == F.Value());
}

TEST_CASE("scalar examples") {
  Variable F(Tensor({1, 1, 1}, 2.0));
  FilmParams p = Constant(1, 1, 0.5, 1.0);
  CHECK(FilmApply(F, p, 1.0).Value().Item() == 2.0);  // 0.5 * 2 + 1
  CHECK(FilmApply(F, p, 0.5).Value().Item() == 2.0);  // 2 + 0.5 * (1 + 1 - 2)
  CHECK(FilmApply(F, Constant(1, 1, 3.0, -1.0), 1.0).Value().Item() == 5.0);
}

TEST_CASE("output is affine in the strength") {
  std::mt19937_64 rng(2);
  Variable F(RandomTensor({2, 4, 5}, rng));
  FilmParams p{Variable(RandomTensor({2, 4}, rng, 2.0)),
               Variable(RandomTensor({2, 4}, rng, 2.0))};
  Tensor full = FilmApply(F, p, 1.0).Value();
  for (double alpha : {0.1, 0.25, 0.5, 0.8}) {
    Tensor y = FilmApply(F, p, alpha).Value();
    for (int64_t i = 0; i < y.Size(); ++i) {
      double expected = (1 - alpha) * F.Value()[i] + alpha * full[i];
      CHECK(std::abs(y[i] - expected) <= 1e-9);
    }
  }
}

TEST_CASE("projection examples") {
  std::mt19937_64 rng(3);
  FilmLayer layer(3, 2, rng, 4);
  Variable s(RandomTensor({2, 3}, rng));

  // Zero projections give gamma = beta = 0 regardless of s.
  layer.gamma_weight().MutableValue().SetZero();
  layer.gamma_bias().MutableValue().SetZero();
  layer.beta_weight().MutableValue().SetZero();
  layer.beta_bias().MutableValue().SetZero();
  FilmParams zero = layer.ComputeParams(s);
  for (double v : zero.gamma.Value().Values()) CHECK(v == 0.0);
  for (double v : zero.beta.Value().Values()) CHECK(v == 0.0);

  // Hand-computed case with identity-like g and f:
  // s = [1, 2, 3] -> g(s) = [1, 2, 3, 0] -> gamma = [1 + 2, 3 + 0] + [0.5, 0].
  FilmLayer hand(3, 2, rng, 4);
  hand.standardize_weight().MutableValue() =
      Tensor({4, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0});
  hand.standardize_bias().MutableValue().SetZero();
  hand.gamma_weight().MutableValue() = Tensor({2, 4}, {1, 1, 0, 0, 0, 0, 1, 1});
  hand.gamma_bias().MutableValue() = Tensor({2}, {0.5, 0.0});
  hand.beta_weight().MutableValue() = Tensor({2, 4}, {-1, 0, 0, 0, 0, 0, 0, 2});
  hand.beta_bias().MutableValue() = Tensor({2}, {0.0, 0.25});
  FilmParams p = hand.ComputeParams(Variable(Tensor({1, 3}, {1, 2, 3})));
  CHECK(p.gamma.Value() == Tensor({1, 2}, {3.5, 3.0}));
  CHECK(p.beta.Value() == Tensor({1, 2}, {-1.0, 0.25}));
}

TEST_CASE("different conditioning gives different modulation") {
  std::mt19937_64 rng(4);
  FilmLayer layer(5, 3, rng);
  Variable s1(RandomTensor({1, 5}, rng)), s2(RandomTensor({1, 5}, rng));
  FilmParams a = layer.ComputeParams(s1), b = layer.ComputeParams(s2);
  CHECK_FALSE(a.gamma.Value() == b.gamma.Value());
  CHECK_FALSE(a.beta.Value() == b.beta.Value());
  // Near-identity initialization.
  for (double g : a.gamma.Value().Values()) CHECK(std::abs(g - 1.0) < 0.5);
}

TEST_CASE("FiLM gradients match finite differences") {
  std::mt19937_64 rng(5);
  FilmLayer layer(4, 3, rng, 6);
  Variable F = MakeParameter(RandomTensor({2, 3, 5}, rng));
  Variable s = MakeParameter(RandomTensor({2, 4}, rng));
  ParameterList inputs{{"F", F}, {"s", s}};
  Append(&inputs, layer.Parameters());
  for (double alpha : {1.0, 0.3}) {
    CAPTURE(alpha);
    auto loss = [&] { return RandomProjection(layer.Forward(F, s, alpha)); };
    auto r = CheckGradients(loss, inputs, 1e-4, 60);
    CAPTURE(r.worst_name);
    CHECK(r.worst_relative_error < 1e-3);
  }
}

TEST_CASE("invalid inputs are rejected") {
  std::mt19937_64 rng(6);
  FilmLayer layer(4, 3, rng);
  Variable F(RandomTensor({1, 3, 5}, rng));
  CHECK_THROWS_AS(layer.Forward(F, Variable(Tensor({1, 5})), 1.0), InvalidArgument);
  CHECK_THROWS_AS(layer.Forward(Variable(Tensor({1, 2, 5})), Variable(Tensor({1, 4})), 1.0),
                  InvalidArgument);
  CHECK_THROWS_AS(layer.Forward(F, Variable(Tensor({1, 4})), 1.5), InvalidArgument);
  CHECK_THROWS_AS(layer.Forward(F, Variable(Tensor({1, 4})), -0.1), InvalidArgument);
  CHECK_THROWS_AS(FilmApply(F, Constant(1, 2, 1, 0), 0.5), InvalidArgument);
}
