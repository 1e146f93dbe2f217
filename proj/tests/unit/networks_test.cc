// tests/unit/networks_test.cc

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
#include <fstream>

#include "selffilm/base/common.h"
#include "selffilm/networks/checkpoint.h"
#include "selffilm/networks/discriminator.h"
#include "selffilm/networks/generator.h"
#include "selffilm/networks/speaker-embedder.h"
#include "selffilm/networks/ssl-encoder.h"
#include "support/gradcheck.h"
#include "support/tempdir.h"

using namespace selffilm;
using namespace selffilm::testing;

namespace {

GeneratorConfig SmallGenerator() {
  GeneratorConfig c;
  c.encoder_kernel = 4;
  c.stride = 2;
  c.separator_layers = 2;
  c.base_channels = 3;
  c.top_channels = 4;
  c.film_hidden = 3;
  c.ssl_dim = 5;
  c.pooling = {.method = PoolingMethod::kMeanStd};
  return c;
}

DiscriminatorConfig SmallDiscriminator(int64_t cond_dim) {
  DiscriminatorConfig c;
  c.layers = 4;
  c.channels = 3;
  c.max_dilation = 2;
  c.film_hidden = 3;
  c.cond_dim = cond_dim;
  return c;
}

bool BitEqual(const Tensor &a, const Tensor &b) {
  if (a.Dims() != b.Dims()) return false;
  for (int64_t i = 0; i < a.Size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool AllFinite(const Tensor &t) {
  for (double v : t.Values())
    if (!std::isfinite(v)) return false;
  return true;
}

double Cosine(const Tensor &a, const Tensor &b) {
  double ab = 0, aa = 0, bb = 0;
  for (int64_t i = 0; i < a.Size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST_CASE("generator preserves length") {
  Rng rng(1);
  Generator g(GeneratorConfig{}, rng);
  SslStubEncoder ssl({});
  std::mt19937_64 data(2);
  for (int64_t n : {100, 8000, 16000, 16001}) {
    CAPTURE(n);
    Variable x(RandomTensor({1, n}, data, 0.5));
    Variable y = g.Forward(x, Variable());
    CHECK(y.Dims() == Shape{1, n});
    CHECK(AllFinite(y.Value()));
    Variable yc = g.Forward(x, g.Condition(ssl.Encode(x)));
    CHECK(yc.Dims() == Shape{1, n});
  }
}

TEST_CASE("separator widths grow geometrically from base to top") {
  Rng rng(3);
  Generator g(GeneratorConfig{}, rng);
  CHECK(g.SeparatorChannels(0) == 32);
  CHECK(g.SeparatorChannels(7) == 256);
  for (int64_t i = 1; i < 8; ++i)
    CHECK(g.SeparatorChannels(i) > g.SeparatorChannels(i - 1));
}

TEST_CASE("zero strength conditioning equals the unconditioned network") {
  Rng rng(4);
  GeneratorConfig gc;
  gc.base_channels = 8;
  gc.top_channels = 16;
  gc.separator_layers = 3;
  Generator g(gc, rng);
  Discriminator d(SmallDiscriminator(g.CondDim()), rng);
  SslStubEncoder ssl({});
  std::mt19937_64 data(5);
  Variable x(RandomTensor({2, 4000}, data, 0.3));
  Variable cond = g.Condition(ssl.Encode(x));
  CHECK(BitEqual(g.Forward(x, cond, 0.0).Value(), g.Forward(x, Variable()).Value()));
  CHECK_FALSE(BitEqual(g.Forward(x, cond, 1.0).Value(), g.Forward(x, Variable()).Value()));
  CHECK(BitEqual(d.Forward(x, cond, 0.0).Value(), d.Forward(x, Variable()).Value()));
}

TEST_CASE("untrained generator output is finite with a mid-range mask") {
  Rng rng(6);
  Generator g(GeneratorConfig{}, rng);
  std::mt19937_64 data(7);
  Variable x(RandomTensor({1, 16000}, data, 1.0));
  CHECK(AllFinite(g.Forward(x, Variable()).Value()));
}

TEST_CASE("generator gradients match finite differences") {
  Rng rng(8);
  Generator g(SmallGenerator(), rng);
  std::mt19937_64 data(9);
  // Zero biases put all-zero frames exactly on the leaky ReLU kink.
  for (auto &p : g.Parameters())
    if (p.name.find("bias") != std::string::npos)
      p.var.MutableValue() = RandomTensor(p.var.Dims(), data, 0.2);
  Variable x = MakeParameter(RandomTensor({2, 13}, data));
  Variable seq = MakeParameter(RandomTensor({2, 3, 5}, data));
  for (bool conditioned : {false, true}) {
    CAPTURE(conditioned);
    ParameterList inputs{{"x", x}, {"ssl", seq}};
    Append(&inputs, g.Parameters());
    auto loss = [&] {
      Variable cond = conditioned ? g.Condition(seq) : Variable();
      return RandomProjection(g.Forward(x, cond));
    };
    auto r = CheckGradients(loss, inputs, 1e-4, 40, 7, 1e-6);
    CAPTURE(r.worst_name);
    CHECK(r.worst_relative_error < 1e-3);
  }
}

TEST_CASE("discriminator gradients match finite differences") {
  Rng rng(10);
  Discriminator d(SmallDiscriminator(4), rng);
  // Non-zero biases so every path is exercised.
  std::mt19937_64 data(11);
  for (auto &p : d.Parameters())
    if (p.name.find("bias") != std::string::npos)
      p.var.MutableValue() = RandomTensor(p.var.Dims(), data, 0.2);
  Variable x = MakeParameter(RandomTensor({2, 20}, data));
  Variable cond = MakeParameter(RandomTensor({2, 4}, data));
  ParameterList inputs{{"x", x}, {"cond", cond}};
  Append(&inputs, d.Parameters());
  auto loss = [&] { return RandomProjection(d.Forward(x, cond)); };
  auto r = CheckGradients(loss, inputs, 1e-4, 40, 7, 1e-6);
  CAPTURE(r.worst_name);
  CHECK(r.worst_relative_error < 1e-3);
}

TEST_CASE("discriminator receptive field matches the closed form") {
  Rng rng(12);
  Discriminator d(DiscriminatorConfig{}, rng);
  int64_t sum = 0;
  for (int64_t i = 0; i < 10; ++i) sum += d.Dilation(i);
  CHECK(d.Dilation(0) == 1);
  CHECK(d.Dilation(1) == 1);
  CHECK(d.Dilation(8) == 8);
  CHECK(d.Dilation(9) == 1);
  CHECK(d.ReceptiveField() == 1 + 2 * sum);
  CHECK(d.ReceptiveField() == 77);

  // Empirical oracle: the outputs touched by a single impulse.
  const int64_t n = 301;
  Tensor zero({1, n});
  Tensor impulse({1, n});
  impulse[150] = 1.0;
  Tensor base = d.Forward(Variable(zero), Variable()).Value();
  Tensor hit = d.Forward(Variable(impulse), Variable()).Value();
  int64_t touched = 0;
  for (int64_t i = 0; i < n; ++i) touched += hit[i] != base[i];
  CHECK(touched == d.ReceptiveField());
}

TEST_CASE("zero input gives a zero score map at initialization") {
  Rng rng(13);
  Discriminator d(DiscriminatorConfig{}, rng);
  Tensor s = d.Forward(Variable(Tensor({2, 500})), Variable()).Value();
  CHECK(s.Dims() == Shape{2, 500});
  for (double v : s.Values()) CHECK(v == 0.0);
}

TEST_CASE("end-to-end gradients are finite for every trainable parameter") {
  Rng rng(14);
  GeneratorConfig gc;
  gc.base_channels = 8;
  gc.top_channels = 16;
  gc.pooling = {.method = PoolingMethod::kLde, .lde_clusters = 4};
  Generator g(gc, rng);
  DiscriminatorConfig dc;
  dc.cond_dim = g.CondDim();
  Discriminator d(dc, rng);
  SslStubEncoder ssl({});
  std::mt19937_64 data(15);
  Variable x(RandomTensor({2, 3200}, data, 0.3));
  Variable cond = g.Condition(ssl.Encode(x));
  Variable y = g.Forward(x, cond);
  Variable loss = Add(Mean(Square(d.Forward(y, cond))), Mean(Abs(Sub(y, x))));
  loss.Backward();
  ParameterList all = g.Parameters();
  Append(&all, d.Parameters());
  for (const auto &p : all) {
    CAPTURE(p.name);
    REQUIRE(p.var.HasGrad());
    CHECK(AllFinite(p.var.Grad()));
  }
  for (const auto &p : ssl.Parameters()) CHECK_FALSE(p.var.HasGrad());
}

TEST_CASE("SSL stub frames, determinism and pre-extension") {
  SslStubEncoder ssl({});
  CHECK(ssl.Hop() == 320);
  std::mt19937_64 data(16);
  Variable x(RandomTensor({1, 16000}, data, 0.5));
  Variable a = ssl.Encode(x);
  CHECK(a.Dims() == Shape{1, 50, 64});
  CHECK(ssl.Frames(16000) == 50);
  CHECK(BitEqual(a.Value(), ssl.Encode(x).Value()));
  SslStubEncoder again({});
  CHECK(BitEqual(a.Value(), again.Encode(x).Value()));
  CHECK_FALSE(a.RequiresGrad());
  for (const auto &p : ssl.Parameters()) CHECK_FALSE(p.var.RequiresGrad());

  Rng rng(17);
  GeneratorConfig gc;
  gc.base_channels = 8;
  gc.top_channels = 16;
  Generator pre(gc, rng);
  Variable b = SslEncode(ssl, x, &pre);
  CHECK(b.Dims() == a.Dims());
  CHECK_FALSE(BitEqual(a.Value(), b.Value()));
  CHECK(BitEqual(a.Value(), SslEncode(ssl, x, nullptr).Value()));
}

TEST_CASE("speaker embedder taps, self-similarity and training flag") {
  std::mt19937_64 data(18);
  Variable x(RandomTensor({2, 8000}, data, 0.5));
  for (auto variant : {EmbedderVariant::kTime, EmbedderVariant::kFeature}) {
    CAPTURE(EmbedderVariantName(variant));
    Rng rng(19);
    SpeakerEmbedderConfig cfg = DefaultEmbedderConfig(variant);
    SpeakerEmbedder emb(cfg, rng);
    CHECK_THROWS_AS(emb.Embed(x), UntrainedModel);
    emb.SetTrained(true);
    auto out = emb.Embed(x);
    CHECK(static_cast<int64_t>(out.taps.size()) == cfg.blocks);
    CHECK(out.taps.size() >= 2);
    CHECK(out.embedding.Dims() == Shape{2, cfg.embedding_dim});
    Tensor e = out.embedding.Value();
    Tensor row0({64}), row0_again({64});
    Tensor again = emb.Embed(x).embedding.Value();
    for (int64_t j = 0; j < 64; ++j) {
      row0[j] = e[j];
      row0_again[j] = again[j];
    }
    CHECK(Cosine(row0, row0_again) == doctest::Approx(1.0).epsilon(1e-12));
    double norm = 0;
    for (int64_t j = 0; j < 64; ++j) norm += e[j] * e[j];
    CHECK(norm > 0);
  }
  CHECK(DefaultEmbedderConfig(EmbedderVariant::kTime).blocks == 3);
  CHECK(DefaultEmbedderConfig(EmbedderVariant::kFeature).blocks == 4);
  SpeakerEmbedderConfig one = DefaultEmbedderConfig(EmbedderVariant::kTime);
  one.num_speakers = 1;
  CHECK_THROWS_AS(ValidateSpeakerEmbedderConfig(one), ConfigError);
  CHECK_THROWS_AS(ParseEmbedderVariant("spectral"), ConfigError);
}

TEST_CASE("speaker embedder classification loss is differentiable") {
  Rng rng(20);
  SpeakerEmbedderConfig cfg = DefaultEmbedderConfig(EmbedderVariant::kFeature);
  cfg.num_speakers = 3;
  SpeakerEmbedder emb(cfg, rng);
  std::mt19937_64 data(21);
  Variable x(RandomTensor({3, 4000}, data, 0.5));
  Variable loss = emb.ClassificationLoss(emb.Forward(x).embedding, {0, 1, 2});
  CHECK(std::isfinite(loss.Value().Item()));
  loss.Backward();
  for (const auto &p : emb.Parameters()) {
    CAPTURE(p.name);
    REQUIRE(p.var.HasGrad());
    CHECK(AllFinite(p.var.Grad()));
  }
}

TEST_CASE("checkpoint round trip restores bit-identical outputs") {
  TempDir dir;
  GeneratorConfig gc;
  gc.base_channels = 8;
  gc.top_channels = 16;
  Rng rng_a(22), rng_b(23);
  Generator a(gc, rng_a), b(gc, rng_b);
  Checkpoint ckpt;
  ckpt.kind = "generator";
  ckpt.config = ToJson(gc);
  ckpt.metadata["epoch"] = 3;
  AddParameters(&ckpt, "g", a.Parameters());
  const std::string path = dir / "g.ckpt";
  SaveCheckpoint(path, ckpt);

  Checkpoint loaded = LoadCheckpoint(path);
  CHECK(loaded.kind == "generator");
  CHECK(loaded.metadata["epoch"] == 3);
  RequireMatchingConfig(loaded, "generator", ToJson(gc));
  CHECK(GeneratorConfigFromJson(loaded.config).base_channels == 8);
  RestoreParameters(loaded, "g", b.Parameters());

  std::mt19937_64 data(24);
  Variable x(RandomTensor({1, 3000}, data, 0.5));
  CHECK(BitEqual(a.Forward(x, Variable()).Value(), b.Forward(x, Variable()).Value()));

  GeneratorConfig other = gc;
  other.base_channels = 4;
  CHECK_THROWS_AS(RequireMatchingConfig(loaded, "generator", ToJson(other)), ConfigError);
  CHECK_THROWS_AS(RequireMatchingConfig(loaded, "discriminator", ToJson(gc)), ConfigError);
  CHECK_THROWS_AS(LoadCheckpoint(dir / "missing.ckpt"), MissingArtifact);

  std::string bytes = ReadBytes(path);
  {
    std::ofstream out(dir / "cut.ckpt", std::ios::binary);
    out << bytes.substr(0, bytes.size() - 9);
  }
  CHECK_THROWS_AS(LoadCheckpoint(dir / "cut.ckpt"), InvalidArgument);
  {
    std::ofstream out(dir / "bad.ckpt", std::ios::binary);
    out << "not a checkpoint";
  }
  CHECK_THROWS_AS(LoadCheckpoint(dir / "bad.ckpt"), InvalidArgument);
}

TEST_CASE("configs round trip through JSON and reject unknown keys") {
  GeneratorConfig gc;
  gc.film_layers = {0, 2};
  gc.pooling = {.method = PoolingMethod::kScaleAtt, .heads = 2};
  CHECK(ToJson(GeneratorConfigFromJson(ToJson(gc))) == ToJson(gc));
  nlohmann::json bad = ToJson(gc);
  bad["bogus"] = 1;
  CHECK_THROWS_AS(GeneratorConfigFromJson(bad), ConfigError);
  DiscriminatorConfig dc;
  dc.cond_dim = 7;
  CHECK(ToJson(DiscriminatorConfigFromJson(ToJson(dc))) == ToJson(dc));
  SpeakerEmbedderConfig sc = DefaultEmbedderConfig(EmbedderVariant::kFeature);
  CHECK(ToJson(SpeakerEmbedderConfigFromJson(ToJson(sc))) == ToJson(sc));
  SslEncoderConfig ssl;
  CHECK(ToJson(SslEncoderConfigFromJson(ToJson(ssl))) == ToJson(ssl));
  gc.stride = 32;
  CHECK_THROWS_AS(ValidateGeneratorConfig(gc), ConfigError);
}

TEST_CASE("backbone weights do not depend on the conditioning setup") {
  GeneratorConfig plain;
  plain.base_channels = 8;
  plain.top_channels = 16;
  GeneratorConfig lde = plain;
  lde.pooling = {.method = PoolingMethod::kLde, .lde_clusters = 3};
  lde.film_layers = {1};
  Rng r1(30), r2(30);
  auto a = Snapshot(Generator(plain, r1).Parameters());
  auto b = Snapshot(Generator(lde, r2).Parameters());
  int compared = 0;
  for (const auto &[name, value] : a) {
    if (name.rfind("film.", 0) == 0 || name.rfind("pooling.", 0) == 0) continue;
    CAPTURE(name);
    REQUIRE(b.count(name));
    CHECK(BitEqual(value, b.at(name)));
    ++compared;
  }
  CHECK(compared == 2 * 8 + 2 + 1 + 2);  // separator, mask, encoder, decoder

  Rng r3(31), r4(31);
  auto d0 = Snapshot(Discriminator(DiscriminatorConfig{}, r3).Parameters());
  DiscriminatorConfig conditioned;
  conditioned.cond_dim = 6;
  auto d1 = Snapshot(Discriminator(conditioned, r4).Parameters());
  for (const auto &[name, value] : d0) CHECK(BitEqual(value, d1.at(name)));
  CHECK(d1.size() > d0.size());
}
