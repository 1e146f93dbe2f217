// src/trainers/evaluation.cc

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

#include "selffilm/trainers/evaluation.h"

#include <iomanip>
#include <map>
#include <sstream>

#include "selffilm/base/common.h"
#include "selffilm/dsp/spectral.h"

namespace selffilm {

namespace {

Eigen::VectorXd UnitEmbedding(const SpeakerEmbedder &embedder, const Tensor &x) {
  NoGradGuard guard;
  const Tensor e = embedder.Embed(Variable(x)).embedding.Value();
  Eigen::VectorXd v(e.Size());
  for (int64_t i = 0; i < e.Size(); ++i) v[i] = e.Values()[i];
  const double n = v.norm();
  return n > 0 ? Eigen::VectorXd(v / n) : v;
}

void Score(const std::vector<Trial> &trials, const std::map<std::string, Eigen::VectorXd> &enroll,
           const std::map<std::string, Eigen::VectorXd> &test, const DcfOptions &dcf,
           ConditionMetrics *m) {
  TrialScores ts;
  m->scores.clear();
  for (const auto &t : trials) {
    auto e = enroll.find(t.enroll);
    auto x = test.find(t.test);
    Require(e != enroll.end(), "trial enrollment ", t.enroll, " is not in the enrollment set");
    Require(x != test.end(), "trial test utterance ", t.test, " is not in the test set");
    const double s = e->second.dot(x->second);
    m->scores.push_back({t.enroll, t.test, s});
    ts.scores.push_back(s);
    ts.labels.push_back(t.target);
  }
  m->eer = Eer(ts);
  m->min_dcf = MinDcf(ts, dcf);
}

nlohmann::json ConditionJson(const ConditionMetrics &m) {
  return {{"lsd_0_8", m.lsd_0_8}, {"lsd_4_8", m.lsd_4_8}, {"eer", m.eer}, {"min_dcf", m.min_dcf}};
}

}  // namespace

EvalReport Evaluate(const GanModel &model, const AudioSet &valid_a, const AudioSet &valid_b,
                    const std::vector<Trial> &trials, const SpeakerEmbedder &embedder,
                    const DcfOptions &dcf) {
  CheckPaired(valid_a.manifest, valid_b.manifest);
  Require(!trials.empty(), "evaluation needs a non-empty trial list");
  if (!embedder.Trained())
    throw UntrainedModel("evaluation needs a trained speaker embedder");
  EvalReport r;
  r.trials = trials.size();
  r.utterances = valid_a.Size();
  r.dcf = dcf;
  std::map<std::string, Eigen::VectorXd> enroll, test_nb, test_bwe;
  for (size_t i = 0; i < valid_a.Size(); ++i) {
    const Tensor a = valid_a.Utterance(i), b = valid_b.Utterance(i);
    const Tensor b_hat = model.Extend(a);
    const Waveform wa = ToWaveform(a), wb = ToWaveform(b), out = ToWaveform(b_hat);
    r.no_bwe.lsd_0_8 += LogSpectralDistance(wa, wb, 0.0, 8000.0);
    r.no_bwe.lsd_4_8 += LogSpectralDistance(wa, wb, 4000.0, 8000.0);
    r.bwe.lsd_0_8 += LogSpectralDistance(out, wb, 0.0, 8000.0);
    r.bwe.lsd_4_8 += LogSpectralDistance(out, wb, 4000.0, 8000.0);
    enroll[valid_b.manifest[i].utterance_id] = UnitEmbedding(embedder, b);
    test_nb[valid_a.manifest[i].utterance_id] = UnitEmbedding(embedder, a);
    test_bwe[valid_a.manifest[i].utterance_id] = UnitEmbedding(embedder, b_hat);
  }
  const double n = static_cast<double>(valid_a.Size());
  for (ConditionMetrics *m : {&r.no_bwe, &r.bwe}) {
    m->lsd_0_8 /= n;
    m->lsd_4_8 /= n;
  }
  Score(trials, enroll, test_nb, dcf, &r.no_bwe);
  Score(trials, enroll, test_bwe, dcf, &r.bwe);
  return r;
}

nlohmann::json EvalReport::ToJson() const {
  return {{"no_bwe", ConditionJson(no_bwe)},
          {"bwe", ConditionJson(bwe)},
          {"trials", trials},
          {"utterances", utterances},
          {"p_target", dcf.p_target}};
}

std::string EvalReport::Table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "condition   LSD 0-8k  LSD 4-8k  EER      minDCF\n";
  for (const auto &[name, m] : {std::pair<const char *, const ConditionMetrics *>{"no-BWE", &no_bwe},
                                {"BWE", &bwe}})
    os << std::left << std::setw(10) << name << "  " << std::setw(8) << m->lsd_0_8 << "  "
       << std::setw(8) << m->lsd_4_8 << "  " << std::setw(7) << m->eer << "  " << m->min_dcf
       << "\n";
  os << trials << " trials over " << utterances << " test utterances, p_target "
     << dcf.p_target << "\n";
  return os.str();
}

FilmFeature ParseFilmFeature(const std::string &name) {
  if (name == "activations") return FilmFeature::kActivations;
  if (name == "gamma_beta") return FilmFeature::kGammaBeta;
  throw ConfigError(StrCat("unknown FiLM feature '", name, "' (expected activations or gamma_beta)"));
}

std::string FilmFeatureName(FilmFeature f) {
  return f == FilmFeature::kActivations ? "activations" : "gamma_beta";
}

const std::vector<std::string> &FilmActivations::Labels(const std::string &key) const {
  if (key == "speaker") return speakers;
  if (key == "language") return languages;
  if (key == "domain") return domains;
  throw ConfigError(StrCat("unknown label key '", key, "' (expected speaker, language or domain)"));
}

LabeledSet FilmActivations::ByLabel(const std::string &key) const {
  return {vectors, EncodeLabels(Labels(key))};
}

FilmActivations CollectFilmActivations(const GanModel &model,
                                       const std::vector<const AudioSet *> &sets,
                                       int64_t layer, FilmFeature feature) {
  const Generator &g = model.ForwardGenerator();
  const int64_t layers = g.Config().separator_layers;
  if (layer < 0) {
    layer = 0;
    while (layer < layers && !g.HasFilm(layer)) ++layer;
  }
  Require<ConfigError>(layer < layers && g.HasFilm(layer), "separator layer ", layer,
                       " has no FiLM");
  const ConditionSource source = model.Condition();
  Require<ConfigError>(feature == FilmFeature::kActivations || source.ssl,
                       "gamma/beta collection needs a model trained with use_film");
  FilmActivations out;
  out.layer = layer;
  std::vector<Eigen::VectorXd> rows;
  NoGradGuard guard;
  for (const AudioSet *set : sets) {
    for (size_t i = 0; i < set->Size(); ++i) {
      const Variable x(set->Utterance(i));
      const Variable cond = SelfCondition(g, source, x);
      Eigen::VectorXd v;
      if (feature == FilmFeature::kActivations) {
        std::vector<Variable> maps;
        g.Forward(x, cond, std::nullopt, &maps);
        const Tensor &h = maps.at(layer).Value();  // [1, C, F]
        const int64_t C = h.Dim(1), F = h.Dim(2);
        v = Eigen::Map<const RowMatrix>(h.Values().data(), C, F).rowwise().mean();
      } else {
        const FilmParams p = g.FilmParameters(layer, cond);
        const int64_t C = p.gamma.Dim(1);
        v.resize(2 * C);
        for (int64_t c = 0; c < C; ++c) {
          v[c] = p.gamma.Value().Values()[c];
          v[C + c] = p.beta.Value().Values()[c];
        }
      }
      rows.push_back(std::move(v));
      const ManifestRecord &r = set->manifest[i];
      out.utterances.push_back(r.utterance_id);
      out.speakers.push_back(r.speaker_id);
      out.languages.push_back(r.language_id);
      out.domains.push_back(DomainLabelName(r.domain));
    }
  }
  Require(!rows.empty(), "no utterances to collect FiLM activations from");
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) out.vectors.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

}  // namespace selffilm
