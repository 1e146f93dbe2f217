// include/selffilm/losses/losses.h

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

#ifndef SELFFILM_LOSSES_LOSSES_H_
#define SELFFILM_LOSSES_LOSSES_H_

#include <functional>
#include <string>

#include "json.hpp"
#include "selffilm/networks/discriminator.h"
#include "selffilm/networks/generator.h"
#include "selffilm/networks/speaker-embedder.h"
#include "selffilm/networks/ssl-encoder.h"

namespace selffilm {

struct LossWeights {
  double sup = 100.0;
  double cyc = 10.0;
  double id = 5.0;
  double dfl = 1.0;
};

void ValidateLossWeights(const LossWeights &w);
nlohmann::json ToJson(const LossWeights &w);
LossWeights LossWeightsFromJson(const nlohmann::json &j);

/**
   Target labels of the least-squares adversarial game.
   kStandard: real -> 1, fake -> 0 (the usual LSGAN labelling).
   kPaper:    real -> 0, fake -> 1, so the discriminator loss is exactly
              D(b)^2 + (1 - D(G(a)))^2.
   In both cases the generator pulls D(G(a)) toward the real label.
 */
enum class LsganConvention { kStandard, kPaper };

LsganConvention ParseLsganConvention(const std::string &name);  // "standard"/"paper"
std::string LsganConventionName(LsganConvention c);

/// mean(d_real^2) + mean((1 - d_fake)^2).
Variable AdvLoss(const Variable &d_real, const Variable &d_fake);

/// Discriminator side: mean((d_real - real_label)^2) + mean((d_fake - fake_label)^2).
Variable DiscriminatorAdvLoss(const Variable &d_real, const Variable &d_fake,
                              LsganConvention convention);
/// Generator side: mean((d_fake - real_label)^2).
Variable GeneratorAdvLoss(const Variable &d_fake, LsganConvention convention);

/// Mean absolute difference over samples and batch.
Variable SupLoss(const Variable &b, const Variable &b_hat);

using WaveMap = std::function<Variable(const Variable &)>;

/// |a - G_ba(G_ab(a))| + |b - G_ab(G_ba(b))|, each mean-reduced.
Variable CycleLoss(const Variable &a, const Variable &b, const WaveMap &g_ab,
                   const WaveMap &g_ba);
/// |a - G_ba(a)| + |b - G_ab(b)|, each mean-reduced.
Variable IdentityLoss(const Variable &a, const Variable &b, const WaveMap &g_ab,
                      const WaveMap &g_ba);

/// Average over the embedder's taps of the mean absolute tap difference.
/// The reference taps of `b` carry no gradient. Throws UntrainedModel when
/// the embedder has not been trained.
Variable DeepFeatureLoss(const Variable &b, const Variable &b_hat,
                         const SpeakerEmbedder &embedder);

/// Self-conditioning of a generator: pooled SSL features of its own input
/// (optionally pre-extended). Undefined when the generator runs without
/// FiLM.
struct ConditionSource {
  const SslStubEncoder *ssl = nullptr;        // null: unconditioned
  const Generator *pre_extension = nullptr;  // frozen, optional
};

Variable SelfCondition(const Generator &g, const ConditionSource &source,
                       const Variable &x);

struct GeneratorTerms {
  Variable adv;
  Variable sup;    // CGAN only
  Variable cyc;    // CycleGAN only
  Variable id;     // CycleGAN only
  Variable dfl;    // undefined without an embedder
  Variable total;
};

struct DiscriminatorTerms {
  Variable real;
  Variable fake;
  Variable total;
};

struct CganModels {
  const Generator *g = nullptr;
  const Discriminator *d = nullptr;
  ConditionSource condition;
  const SpeakerEmbedder *dfl = nullptr;  // frozen, optional
};

/// One forward pass of the generator on a batch, keeping the conditioning
/// vector so both players share it.
struct CganForward {
  Variable cond;  // [B, cond_dim] or undefined
  Variable fake;  // G(a)
};

CganForward RunGenerator(const CganModels &m, const Variable &a);

/// Discriminator loss on real b versus the detached fake. D sees the
/// detached conditioning vector of the generator input.
DiscriminatorTerms CganDiscriminatorLoss(const CganModels &m, const Variable &b,
                                         const CganForward &fwd,
                                         LsganConvention convention);

/// adv + sup * L_sup + dfl * L_dfl.
GeneratorTerms CganGeneratorLoss(const CganModels &m, const Variable &b,
                                 const CganForward &fwd, const LossWeights &w,
                                 LsganConvention convention);

struct CganObjective {
  GeneratorTerms generator;
  DiscriminatorTerms discriminator;
};

/// Both losses for a paired batch (a = narrowband, b = wideband).
CganObjective ComputeCganObjective(const CganModels &m, const Variable &a,
                                   const Variable &b, const LossWeights &w,
                                   LsganConvention convention);

struct CycleganModels {
  const Generator *g_ab = nullptr;
  const Generator *g_ba = nullptr;
  const Discriminator *d_a = nullptr;
  const Discriminator *d_b = nullptr;
  ConditionSource condition;
  const SpeakerEmbedder *dfl = nullptr;
};

struct CycleganForward {
  Variable cond_a, cond_b;  // conditioning from each real input
  Variable fake_b, fake_a;  // G_ab(a), G_ba(b)
};

CycleganForward RunGenerators(const CycleganModels &m, const Variable &a,
                              const Variable &b);

/// Losses of D_a and D_b, summed in `total`.
DiscriminatorTerms CycleganDiscriminatorLoss(const CycleganModels &m,
                                             const Variable &a, const Variable &b,
                                             const CycleganForward &fwd,
                                             LsganConvention convention);

/// adv_ab + adv_ba + cyc * L_cyc + id * L_id + dfl * (DFL of the cycle and
/// identity reconstructions).
GeneratorTerms CycleganGeneratorLoss(const CycleganModels &m, const Variable &a,
                                     const Variable &b, const CycleganForward &fwd,
                                     const LossWeights &w, LsganConvention convention);

}  // namespace selffilm

#endif  // SELFFILM_LOSSES_LOSSES_H_
