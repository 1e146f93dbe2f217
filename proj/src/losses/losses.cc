// src/losses/losses.cc

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

#include "selffilm/losses/losses.h"

#include <cmath>

#include "selffilm/autograd/ops.h"
#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"

namespace selffilm {

void ValidateLossWeights(const LossWeights &w) {
  for (double v : {w.sup, w.cyc, w.id, w.dfl})
    Require<ConfigError>(std::isfinite(v) && v >= 0.0,
                         "loss weights must be finite and non-negative");
}

nlohmann::json ToJson(const LossWeights &w) {
  return {{"sup", w.sup}, {"cyc", w.cyc}, {"id", w.id}, {"dfl", w.dfl}};
}

LossWeights LossWeightsFromJson(const nlohmann::json &j) {
  LossWeights w;
  JsonReader r(j, "weights");
  r.Get("sup", &w.sup);
  r.Get("cyc", &w.cyc);
  r.Get("id", &w.id);
  r.Get("dfl", &w.dfl);
  r.Done();
  ValidateLossWeights(w);
  return w;
}

LsganConvention ParseLsganConvention(const std::string &name) {
  if (name == "standard") return LsganConvention::kStandard;
  if (name == "paper") return LsganConvention::kPaper;
  throw ConfigError(StrCat("unknown lsgan_convention '", name,
                           "' (expected standard or paper)"));
}

std::string LsganConventionName(LsganConvention c) {
  return c == LsganConvention::kPaper ? "paper" : "standard";
}

namespace {

double RealLabel(LsganConvention c) { return c == LsganConvention::kPaper ? 0.0 : 1.0; }
double FakeLabel(LsganConvention c) { return 1.0 - RealLabel(c); }

Variable MeanSquaredOffset(const Variable &x, double target) {
  return Mean(Square(AddScalar(x, -target)));
}

}  // namespace

Variable AdvLoss(const Variable &d_real, const Variable &d_fake) {
  return Add(Mean(Square(d_real)), MeanSquaredOffset(d_fake, 1.0));
}

Variable DiscriminatorAdvLoss(const Variable &d_real, const Variable &d_fake,
                              LsganConvention convention) {
  return Add(MeanSquaredOffset(d_real, RealLabel(convention)),
             MeanSquaredOffset(d_fake, FakeLabel(convention)));
}

Variable GeneratorAdvLoss(const Variable &d_fake, LsganConvention convention) {
  return MeanSquaredOffset(d_fake, RealLabel(convention));
}

Variable SupLoss(const Variable &b, const Variable &b_hat) {
  Require(b.Dims() == b_hat.Dims(), "SupLoss: shape mismatch");
  return Mean(Abs(Sub(b, b_hat)));
}

Variable CycleLoss(const Variable &a, const Variable &b, const WaveMap &g_ab,
                   const WaveMap &g_ba) {
  return Add(SupLoss(a, g_ba(g_ab(a))), SupLoss(b, g_ab(g_ba(b))));
}

Variable IdentityLoss(const Variable &a, const Variable &b, const WaveMap &g_ab,
                      const WaveMap &g_ba) {
  return Add(SupLoss(a, g_ba(a)), SupLoss(b, g_ab(b)));
}

Variable DeepFeatureLoss(const Variable &b, const Variable &b_hat,
                         const SpeakerEmbedder &embedder) {
  Require(b.Dims() == b_hat.Dims(), "DeepFeatureLoss: shape mismatch");
  std::vector<Variable> reference;
  {
    NoGradGuard guard;
    reference = embedder.Embed(b.Detach()).taps;
  }
  std::vector<Variable> taps = embedder.Embed(b_hat).taps;
  Variable total = Mean(Abs(Sub(taps[0], reference[0])));
  for (size_t i = 1; i < taps.size(); ++i)
    total = Add(total, Mean(Abs(Sub(taps[i], reference[i]))));
  return Scale(total, 1.0 / static_cast<double>(taps.size()));
}

Variable SelfCondition(const Generator &g, const ConditionSource &source,
                       const Variable &x) {
  if (!source.ssl) return Variable();
  return g.Condition(SslEncode(*source.ssl, x, source.pre_extension));
}

namespace {

Variable Detached(const Variable &v) { return v.Defined() ? v.Detach() : v; }

Variable WeightedSum(const std::vector<std::pair<double, Variable>> &terms) {
  Variable total;
  for (const auto &[w, v] : terms) {
    if (!v.Defined() || w == 0.0) continue;
    Variable t = w == 1.0 ? v : Scale(v, w);
    total = total.Defined() ? Add(total, t) : t;
  }
  return total;
}

}  // namespace

CganForward RunGenerator(const CganModels &m, const Variable &a) {
  CganForward f;
  f.cond = SelfCondition(*m.g, m.condition, a);
  f.fake = m.g->Forward(a, f.cond);
  return f;
}

DiscriminatorTerms CganDiscriminatorLoss(const CganModels &m, const Variable &b,
                                         const CganForward &fwd,
                                         LsganConvention convention) {
  const Variable cond = Detached(fwd.cond);
  DiscriminatorTerms t;
  t.real = MeanSquaredOffset(m.d->Forward(b, cond), RealLabel(convention));
  t.fake = MeanSquaredOffset(m.d->Forward(fwd.fake.Detach(), cond), FakeLabel(convention));
  t.total = Add(t.real, t.fake);
  return t;
}

GeneratorTerms CganGeneratorLoss(const CganModels &m, const Variable &b,
                                 const CganForward &fwd, const LossWeights &w,
                                 LsganConvention convention) {
  GeneratorTerms t;
  t.adv = GeneratorAdvLoss(m.d->Forward(fwd.fake, Detached(fwd.cond)), convention);
  t.sup = SupLoss(b, fwd.fake);
  if (m.dfl) t.dfl = DeepFeatureLoss(b, fwd.fake, *m.dfl);
  t.total = WeightedSum({{1.0, t.adv}, {w.sup, t.sup}, {w.dfl, t.dfl}});
  return t;
}

CganObjective ComputeCganObjective(const CganModels &m, const Variable &a,
                                   const Variable &b, const LossWeights &w,
                                   LsganConvention convention) {
  CganForward fwd = RunGenerator(m, a);
  return {CganGeneratorLoss(m, b, fwd, w, convention),
          CganDiscriminatorLoss(m, b, fwd, convention)};
}

CycleganForward RunGenerators(const CycleganModels &m, const Variable &a,
                              const Variable &b) {
  CycleganForward f;
  f.cond_a = SelfCondition(*m.g_ab, m.condition, a);
  f.cond_b = SelfCondition(*m.g_ba, m.condition, b);
  f.fake_b = m.g_ab->Forward(a, f.cond_a);
  f.fake_a = m.g_ba->Forward(b, f.cond_b);
  return f;
}

DiscriminatorTerms CycleganDiscriminatorLoss(const CycleganModels &m,
                                             const Variable &a, const Variable &b,
                                             const CycleganForward &fwd,
                                             LsganConvention convention) {
  // D_b judges G_ab and shares its conditioning (from a); D_a likewise.
  const Variable cond_a = Detached(fwd.cond_a), cond_b = Detached(fwd.cond_b);
  const double real = RealLabel(convention), fake = FakeLabel(convention);
  DiscriminatorTerms t;
  t.real = Add(MeanSquaredOffset(m.d_b->Forward(b, cond_a), real),
               MeanSquaredOffset(m.d_a->Forward(a, cond_b), real));
  t.fake = Add(MeanSquaredOffset(m.d_b->Forward(fwd.fake_b.Detach(), cond_a), fake),
               MeanSquaredOffset(m.d_a->Forward(fwd.fake_a.Detach(), cond_b), fake));
  t.total = Add(t.real, t.fake);
  return t;
}

GeneratorTerms CycleganGeneratorLoss(const CycleganModels &m, const Variable &a,
                                     const Variable &b, const CycleganForward &fwd,
                                     const LossWeights &w, LsganConvention convention) {
  auto g_ab = [&](const Variable &x) {
    return m.g_ab->Forward(x, SelfCondition(*m.g_ab, m.condition, x));
  };
  auto g_ba = [&](const Variable &x) {
    return m.g_ba->Forward(x, SelfCondition(*m.g_ba, m.condition, x));
  };
  GeneratorTerms t;
  t.adv = Add(GeneratorAdvLoss(m.d_b->Forward(fwd.fake_b, Detached(fwd.cond_a)), convention),
              GeneratorAdvLoss(m.d_a->Forward(fwd.fake_a, Detached(fwd.cond_b)), convention));
  // The first half of each cycle reuses the shared forward pass.
  const Variable rec_a = g_ba(fwd.fake_b), rec_b = g_ab(fwd.fake_a);
  t.cyc = Add(SupLoss(a, rec_a), SupLoss(b, rec_b));
  Variable id_a, id_b;
  if (w.id > 0.0 || m.dfl) {
    id_a = g_ba(a);
    id_b = g_ab(b);
    t.id = Add(SupLoss(a, id_a), SupLoss(b, id_b));
  }
  if (m.dfl) {
    const SpeakerEmbedder &e = *m.dfl;
    t.dfl = Add(Add(DeepFeatureLoss(a, rec_a, e), DeepFeatureLoss(b, rec_b, e)),
                Add(DeepFeatureLoss(a, id_a, e), DeepFeatureLoss(b, id_b, e)));
  }
  t.total = WeightedSum({{1.0, t.adv}, {w.cyc, t.cyc}, {w.id, t.id}, {w.dfl, t.dfl}});
  return t;
}

}  // namespace selffilm
