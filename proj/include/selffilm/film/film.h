// film/film.h

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

#ifndef SELFFILM_FILM_FILM_H_
#define SELFFILM_FILM_FILM_H_

#include "selffilm/autograd/parameters.h"
#include "selffilm/autograd/variable.h"

namespace selffilm {

/// Per-utterance, per-channel modulation: gamma and beta are [B, C].
struct FilmParams {
  Variable gamma;
  Variable beta;
};

/**
   Strength-controlled feature-wise modulation of activations F [B, C, T]:

     out[b, c, t] = F + alpha * (gamma[b, c] * F + beta[b, c] - F)

   alpha must lie in [0, 1]. alpha = 1 is plain FiLM; alpha = 0 returns F
   itself, so the conditioned and unconditioned graphs coincide bit for bit.
 */
Variable FilmApply(const Variable &activations, const FilmParams &params,
                   double alpha);

/**
   Conditioning projection for one modulated layer. A shared projection g
   standardizes the conditioning vector to `hidden_dim`, then f and h map it
   to per-channel gamma and beta:

     gamma = f(g(s)),  beta = h(g(s))

   At initialization gamma is close to 1 and beta close to 0 so the modulated
   network starts near its unconditioned counterpart.
 */
class FilmLayer {
 public:
  static constexpr int64_t kDefaultHiddenDim = 256;

  FilmLayer(int64_t cond_dim, int64_t channels, Rng &rng,
            int64_t hidden_dim = kDefaultHiddenDim);

  /// s [B, cond_dim] -> gamma, beta [B, channels].
  FilmParams ComputeParams(const Variable &s) const;
  /// FilmApply(activations, ComputeParams(s), alpha).
  Variable Forward(const Variable &activations, const Variable &s,
                   double alpha) const;

  int64_t CondDim() const { return cond_dim_; }
  int64_t Channels() const { return channels_; }
  ParameterList Parameters() const;

  // Direct access, used by tests that pin the projections.
  Variable &standardize_weight() { return g_weight_; }
  Variable &standardize_bias() { return g_bias_; }
  Variable &gamma_weight() { return f_weight_; }
  Variable &gamma_bias() { return f_bias_; }
  Variable &beta_weight() { return h_weight_; }
  Variable &beta_bias() { return h_bias_; }

 private:
  int64_t cond_dim_, channels_, hidden_dim_;
  Variable g_weight_, g_bias_;
  Variable f_weight_, f_bias_;
  Variable h_weight_, h_bias_;
};

}  // namespace selffilm

#endif  // SELFFILM_FILM_FILM_H_
