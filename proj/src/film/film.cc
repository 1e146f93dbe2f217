// film/film.cc

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

#include "selffilm/film/film.h"

#include "selffilm/autograd/ops.h"
#include "selffilm/base/common.h"

namespace selffilm {

Variable FilmApply(const Variable &activations, const FilmParams &params,
                   double alpha) {
  Require(alpha >= 0.0 && alpha <= 1.0, "FiLM strength ", alpha,
          " outside [0, 1]");
  Require(activations.Value().Rank() == 3,
          "FilmApply: activations must be [B, C, T], got ",
          ShapeString(activations.Dims()));
  const int64_t B = activations.Dim(0), C = activations.Dim(1),
                T = activations.Dim(2);
  Require(params.gamma.Dims() == Shape{B, C} && params.beta.Dims() == Shape{B, C},
          "FilmApply: gamma ", ShapeString(params.gamma.Dims()), " / beta ",
          ShapeString(params.beta.Dims()), " do not match ", C,
          " channels of batch ", B);
  if (alpha == 0.0) return activations;

  const Tensor &F = activations.Value();
  const Tensor &gamma = params.gamma.Value();
  const Tensor &beta = params.beta.Value();
  Tensor y(F.Dims());
  for (int64_t r = 0; r < B * C; ++r) {
    const double scale = 1.0 - alpha + alpha * gamma[r];
    const double shift = alpha * beta[r];
    const double *f = F.Data() + r * T;
    double *out = y.Data() + r * T;
    for (int64_t t = 0; t < T; ++t) out[t] = scale * f[t] + shift;
  }
  return Variable::Create(
      std::move(y), {activations, params.gamma, params.beta},
      [B, C, T, alpha](const Tensor &g, std::vector<Variable> &in) {
        const Tensor &Fv = in[0].Value();
        const Tensor &gam = in[1].Value();
        for (int64_t r = 0; r < B * C; ++r) {
          const double *gr = g.Data() + r * T;
          const double *f = Fv.Data() + r * T;
          if (in[0].RequiresGrad()) {
            const double scale = 1.0 - alpha + alpha * gam[r];
            double *gf = in[0].GradRef().Data() + r * T;
            for (int64_t t = 0; t < T; ++t) gf[t] += scale * gr[t];
          }
          if (in[1].RequiresGrad() || in[2].RequiresGrad()) {
            double sum_gf = 0.0, sum_g = 0.0;
            for (int64_t t = 0; t < T; ++t) {
              sum_gf += gr[t] * f[t];
              sum_g += gr[t];
            }
            if (in[1].RequiresGrad()) in[1].GradRef()[r] += alpha * sum_gf;
            if (in[2].RequiresGrad()) in[2].GradRef()[r] += alpha * sum_g;
          }
        }
      });
}

FilmLayer::FilmLayer(int64_t cond_dim, int64_t channels, Rng &rng,
                     int64_t hidden_dim)
    : cond_dim_(cond_dim), channels_(channels), hidden_dim_(hidden_dim) {
  Require(cond_dim >= 1 && channels >= 1 && hidden_dim >= 1,
          "FilmLayer: dimensions must be positive");
  g_weight_ = MakeParameter(FanInUniform({hidden_dim, cond_dim}, cond_dim, rng));
  g_bias_ = MakeParameter(Tensor({hidden_dim}));
  f_weight_ = MakeParameter(RandomNormal({channels, hidden_dim}, 0.01, rng));
  f_bias_ = MakeParameter(Tensor({channels}, 1.0));
  h_weight_ = MakeParameter(RandomNormal({channels, hidden_dim}, 0.01, rng));
  h_bias_ = MakeParameter(Tensor({channels}, 0.0));
}

FilmParams FilmLayer::ComputeParams(const Variable &s) const {
  Require(s.Value().Rank() == 2 && s.Dim(1) == cond_dim_,
          "FilmLayer: conditioning vector ", ShapeString(s.Dims()),
          " does not match input dim ", cond_dim_);
  Variable standardized = Linear(s, g_weight_, g_bias_);
  return {Linear(standardized, f_weight_, f_bias_),
          Linear(standardized, h_weight_, h_bias_)};
}

Variable FilmLayer::Forward(const Variable &activations, const Variable &s,
                            double alpha) const {
  Require(activations.Value().Rank() == 3 && activations.Dim(1) == channels_,
          "FilmLayer: activations ", ShapeString(activations.Dims()),
          " do not have ", channels_, " channels");
  Require(s.Value().Rank() == 2 && s.Dim(1) == cond_dim_ &&
              s.Dim(0) == activations.Dim(0),
          "FilmLayer: conditioning vector ", ShapeString(s.Dims()),
          " does not match input dim ", cond_dim_);
  Require(alpha >= 0.0 && alpha <= 1.0, "FiLM strength ", alpha,
          " outside [0, 1]");
  if (alpha == 0.0) return activations;
  return FilmApply(activations, ComputeParams(s), alpha);
}

ParameterList FilmLayer::Parameters() const {
  return {{"g.weight", g_weight_}, {"g.bias", g_bias_},
          {"f.weight", f_weight_}, {"f.bias", f_bias_},
          {"h.weight", h_weight_}, {"h.bias", h_bias_}};
}

}  // namespace selffilm
