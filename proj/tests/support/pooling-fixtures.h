// tests/support/pooling-fixtures.h

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

#ifndef SELFFILM_TESTS_SUPPORT_POOLING_FIXTURES_H_
#define SELFFILM_TESTS_SUPPORT_POOLING_FIXTURES_H_

#include <cmath>
#include <vector>

#include "selffilm/pooling/pooling.h"

namespace selffilm::testing {

// Values below were computed offline in extended precision and are frozen.

// LDE, D = 1, centers {0, 2}, frames {0, 2}.
inline constexpr double kLdeFixtureOutput[2] = {0.03597241992418311,
                                                -0.03597241992418311};
// w[frame 0, cluster 0] == w[frame 1, cluster 1].
inline constexpr double kLdeFixtureAssignment = 0.9820137900379085;

// ScaleAtt, 3 frames, D = 4, H = 2, d_k = d_v = 2.
inline constexpr double kScaleAttFixtureOutput[4] = {
    0.1697906876059751, -0.2848961966994729, 0.22911407041528287,
    0.6159958110081264};

struct ScaleAttFixture {
  Variable s;
  ScaleAttWeights weights;
};

inline ScaleAttFixture MakeScaleAttFixture() {
  auto T = [](Shape shape, std::vector<double> v) {
    return Variable(Tensor(std::move(shape), std::move(v)));
  };
  return {T({1, 3, 4}, {0.5, -1, 0.25, 2, 1.5, 0, -0.5, 1, -1, 0.75, 1.25, -0.25}),
          {T({2, 2}, {1, -0.5, 0.25, 2}),
           T({4, 4}, {0.2, -0.1, 0.4, 0, 0.3, 0.5, -0.2, 0.1, -0.4, 0.2, 0.1,
                      0.3, 0, -0.3, 0.6, -0.2}),
           T({4}, {0.1, -0.2, 0.05, 0}),
           T({4, 4}, {1, 0, -0.5, 0.2, 0.1, 0.3, 0, -0.4, -0.2, 0.6, 0.2, 0,
                      0.5, -0.1, 0.3, 0.7}),
           T({4}, {0, 0.1, -0.1, 0.2})}};
}

// Plain loop implementation of the dictionary encoding, s [B, T, D].
inline Tensor LdeOracle(const Tensor &s, const Tensor &mu) {
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2), C = mu.Dim(0);
  Tensor out({B, C * D});
  for (int64_t b = 0; b < B; ++b) {
    std::vector<double> w(T * C);
    for (int64_t t = 0; t < T; ++t) {
      double z = 0;
      for (int64_t c = 0; c < C; ++c) {
        double d2 = 0;
        for (int64_t j = 0; j < D; ++j) {
          double r = s[(b * T + t) * D + j] - mu[c * D + j];
          d2 += r * r;
        }
        w[t * C + c] = std::exp(-d2);
        z += w[t * C + c];
      }
      for (int64_t c = 0; c < C; ++c) w[t * C + c] /= z;
    }
    for (int64_t c = 0; c < C; ++c) {
      double mass = 0;
      for (int64_t t = 0; t < T; ++t) mass += w[t * C + c];
      for (int64_t j = 0; j < D; ++j) {
        double acc = 0;
        for (int64_t t = 0; t < T; ++t)
          acc += w[t * C + c] * (s[(b * T + t) * D + j] - mu[c * D + j]);
        out[b * C * D + c * D + j] = acc / mass;
      }
    }
  }
  return out;
}

// Plain loop implementation of multi-head learnable-query attention pooling.
inline Tensor ScaleAttOracle(const Tensor &s, const ScaleAttWeights &w) {
  const Tensor &q = w.query.Value(), &wk = w.key_weight.Value(),
               &bk = w.key_bias.Value(), &wv = w.value_weight.Value(),
               &bv = w.value_bias.Value();
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2);
  const int64_t H = q.Dim(0), dk = q.Dim(1), dv = wv.Dim(0) / H;
  Tensor out({B, H * dv});
  for (int64_t b = 0; b < B; ++b) {
    const double *x = s.Data() + b * T * D;
    for (int64_t h = 0; h < H; ++h) {
      std::vector<double> logit(T);
      double mx = -1e300;
      for (int64_t t = 0; t < T; ++t) {
        double acc = 0;
        for (int64_t i = 0; i < dk; ++i) {
          const int64_t row = h * dk + i;
          double key = bk[row];
          for (int64_t j = 0; j < D; ++j) key += wk[row * D + j] * x[t * D + j];
          acc += q[h * dk + i] * key;
        }
        logit[t] = acc / std::sqrt(static_cast<double>(dk));
        mx = std::max(mx, logit[t]);
      }
      double z = 0;
      for (double &l : logit) z += (l = std::exp(l - mx));
      for (int64_t i = 0; i < dv; ++i) {
        const int64_t row = h * dv + i;
        double acc = 0;
        for (int64_t t = 0; t < T; ++t) {
          double val = bv[row];
          for (int64_t j = 0; j < D; ++j) val += wv[row * D + j] * x[t * D + j];
          acc += logit[t] / z * val;
        }
        out[b * H * dv + row] = acc;
      }
    }
  }
  return out;
}

}  // namespace selffilm::testing

#endif  // SELFFILM_TESTS_SUPPORT_POOLING_FIXTURES_H_
