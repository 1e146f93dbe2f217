// pooling/pooling.cc

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

#include "selffilm/pooling/pooling.h"

#include <cmath>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"

namespace selffilm {

namespace {

// Mass below which an LDE cluster is treated as unassigned.
constexpr double kMinClusterMass = 1e-300;

void CheckSequence(const Variable &s, const char *op) {
  Require(s.Value().Rank() == 3, op, ": expected [B, T, D], got ",
          ShapeString(s.Dims()));
  Require(s.Dim(1) >= 1 && s.Dim(2) >= 1, op, ": empty sequence ",
          ShapeString(s.Dims()));
}

// Row-wise softmax of `z` in place with max subtraction.
void SoftmaxRows(RowMatrix *z) {
  for (Eigen::Index i = 0; i < z->rows(); ++i) {
    const double m = z->row(i).maxCoeff();
    z->row(i) = (z->row(i).array() - m).exp();
    z->row(i) /= z->row(i).sum();
  }
}

// Squared distances [T, C] between frames S [T, D] and centers M [C, D].
RowMatrix SquaredDistances(const Eigen::Ref<const RowMatrix> &S,
                           const Eigen::Ref<const RowMatrix> &M) {
  RowMatrix d(S.rows(), M.rows());
  for (Eigen::Index t = 0; t < S.rows(); ++t)
    for (Eigen::Index c = 0; c < M.rows(); ++c)
      d(t, c) = (S.row(t) - M.row(c)).squaredNorm();
  return d;
}

}  // namespace

Variable MeanPool(const Variable &s) {
  CheckSequence(s, "MeanPool");
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2);
  Tensor y({B, D});
  for (int64_t b = 0; b < B; ++b) {
    ConstMatrixMap S(s.Value().Data() + b * T * D, T, D);
    y.AsMatrix().row(b) = S.colwise().sum() / static_cast<double>(T);
  }
  return Variable::Create(
      std::move(y), {s}, [B, T, D](const Tensor &g, std::vector<Variable> &in) {
        Tensor &gs = in[0].GradRef();
        const double inv = 1.0 / static_cast<double>(T);
        for (int64_t b = 0; b < B; ++b) {
          MatrixMap GS(gs.Data() + b * T * D, T, D);
          GS.rowwise() += g.AsMatrix(B, D).row(b) * inv;
        }
      });
}

Variable StatsPool(const Variable &s) {
  CheckSequence(s, "StatsPool");
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2);
  Tensor y({B, 2 * D});
  auto Y = y.AsMatrix();
  for (int64_t b = 0; b < B; ++b) {
    ConstMatrixMap S(s.Value().Data() + b * T * D, T, D);
    Eigen::RowVectorXd mean = S.colwise().sum() / static_cast<double>(T);
    Eigen::RowVectorXd var =
        (S.rowwise() - mean).array().square().colwise().sum() /
        static_cast<double>(T);
    Y.row(b).head(D) = mean;
    Y.row(b).tail(D) = var.array().sqrt();
  }
  return Variable::Create(
      std::move(y), {s}, [B, T, D](const Tensor &g, std::vector<Variable> &in) {
        const Tensor &sv = in[0].Value();
        Tensor &gs = in[0].GradRef();
        auto G = g.AsMatrix(B, 2 * D);
        const double inv = 1.0 / static_cast<double>(T);
        for (int64_t b = 0; b < B; ++b) {
          ConstMatrixMap S(sv.Data() + b * T * D, T, D);
          MatrixMap GS(gs.Data() + b * T * D, T, D);
          Eigen::RowVectorXd mean = S.colwise().sum() * inv;
          RowMatrix centered = S.rowwise() - mean;
          Eigen::RowVectorXd sd =
              (centered.array().square().colwise().sum() * inv).sqrt();
          Eigen::RowVectorXd coef(D);
          for (int64_t j = 0; j < D; ++j)
            coef(j) = sd(j) > 0.0 ? G(b, D + j) * inv / sd(j) : 0.0;
          GS.rowwise() += G.row(b).head(D) * inv;
          GS += (centered.array().rowwise() * coef.array()).matrix();
        }
      });
}

Tensor LdeAssignments(const Tensor &s, const Tensor &centers) {
  Require(s.Rank() == 3 && centers.Rank() == 2 && centers.Dim(1) == s.Dim(2),
          "LdeAssignments: sequence ", ShapeString(s.Dims()),
          " does not match centers ", ShapeString(centers.Dims()));
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2), C = centers.Dim(0);
  Tensor w({B, T, C});
  auto M = centers.AsMatrix();
  for (int64_t b = 0; b < B; ++b) {
    RowMatrix z = -SquaredDistances(s.AsMatrix(B * T, D).middleRows(b * T, T), M);
    SoftmaxRows(&z);
    w.AsMatrix(B * T, C).middleRows(b * T, T) = z;
  }
  return w;
}

Variable LdePool(const Variable &s, const Variable &centers) {
  CheckSequence(s, "LdePool");
  Require(centers.Value().Rank() == 2 && centers.Dim(0) >= 1 &&
              centers.Dim(1) == s.Dim(2),
          "LdePool: centers ", ShapeString(centers.Dims()),
          " do not match embedding dim ", s.Dim(2));
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2), C = centers.Dim(0);
  const Tensor w_all = LdeAssignments(s.Value(), centers.Value());
  Tensor y({B, C * D});
  auto M = centers.Value().AsMatrix();
  for (int64_t b = 0; b < B; ++b) {
    auto S = s.Value().AsMatrix(B * T, D).middleRows(b * T, T);
    auto W = w_all.AsMatrix(B * T, C).middleRows(b * T, T);
    for (int64_t c = 0; c < C; ++c) {
      const double mass = std::max(W.col(c).sum(), kMinClusterMass);
      Eigen::RowVectorXd e = (W.col(c).transpose() * S) / mass - M.row(c);
      y.AsMatrix(B * C, D).row(b * C + c) = e;
    }
  }
  return Variable::Create(
      std::move(y), {s, centers},
      [B, T, D, C, w_all](const Tensor &g, std::vector<Variable> &in) {
        auto M = in[1].Value().AsMatrix();
        const bool need_s = in[0].RequiresGrad();
        const bool need_m = in[1].RequiresGrad();
        for (int64_t b = 0; b < B; ++b) {
          auto S = in[0].Value().AsMatrix(B * T, D).middleRows(b * T, T);
          auto W = w_all.AsMatrix(B * T, C).middleRows(b * T, T);
          auto G = g.AsMatrix(B * C, D).middleRows(b * C, C);
          RowMatrix grad_s = RowMatrix::Zero(T, D);
          RowMatrix grad_m = RowMatrix::Zero(C, D);
          RowMatrix grad_w(T, C);
          for (int64_t c = 0; c < C; ++c) {
            const double mass = std::max(W.col(c).sum(), kMinClusterMass);
            Eigen::RowVectorXd weighted_mean = (W.col(c).transpose() * S) / mass;
            // e_c = weighted_mean - mu_c.
            grad_s += (W.col(c) / mass) * G.row(c);
            grad_m.row(c) -= G.row(c);
            for (int64_t t = 0; t < T; ++t)
              grad_w(t, c) = G.row(c).dot(S.row(t) - weighted_mean) / mass;
          }
          // Through the softmax over clusters and the negative distances.
          for (int64_t t = 0; t < T; ++t) {
            const double inner = W.row(t).dot(grad_w.row(t));
            for (int64_t c = 0; c < C; ++c) {
              const double grad_logit = W(t, c) * (grad_w(t, c) - inner);
              Eigen::RowVectorXd diff = S.row(t) - M.row(c);
              grad_s.row(t) -= 2.0 * grad_logit * diff;
              grad_m.row(c) += 2.0 * grad_logit * diff;
            }
          }
          if (need_s)
            in[0].GradRef().AsMatrix(B * T, D).middleRows(b * T, T) += grad_s;
          if (need_m) in[1].GradRef().AsMatrix() += grad_m;
        }
      });
}

Variable ScaleAttPool(const Variable &s, const ScaleAttWeights &w) {
  CheckSequence(s, "ScaleAttPool");
  Require(w.query.Value().Rank() == 2, "ScaleAttPool: query must be [H, d_k]");
  const int64_t B = s.Dim(0), T = s.Dim(1), D = s.Dim(2);
  const int64_t H = w.query.Dim(0), dk = w.query.Dim(1);
  Require(H >= 1 && dk >= 1, "ScaleAttPool: empty query");
  Require(w.key_weight.Dims() == Shape{H * dk, D} &&
              w.key_bias.Dims() == Shape{H * dk},
          "ScaleAttPool: key projection ", ShapeString(w.key_weight.Dims()),
          " does not map D=", D, " to H*d_k=", H * dk);
  Require(w.value_weight.Value().Rank() == 2 &&
              w.value_weight.Dim(1) == D && w.value_weight.Dim(0) % H == 0 &&
              w.value_bias.Dims() == Shape{w.value_weight.Dim(0)},
          "ScaleAttPool: value projection ",
          ShapeString(w.value_weight.Dims()), " does not match D=", D,
          " and H=", H);
  const int64_t dv = w.value_weight.Dim(0) / H;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  // Keys, values and attention weights of utterance b.
  auto project = [=](const std::vector<Variable> &in, int64_t b, RowMatrix *K,
                     RowMatrix *V, RowMatrix *A) {
    auto S = in[0].Value().AsMatrix(B * T, D).middleRows(b * T, T);
    *K = S * in[2].Value().AsMatrix().transpose();
    K->rowwise() += in[3].Value().AsMatrix(1, H * dk).row(0);
    *V = S * in[4].Value().AsMatrix().transpose();
    V->rowwise() += in[5].Value().AsMatrix(1, H * dv).row(0);
    auto Q = in[1].Value().AsMatrix();
    A->resize(H, T);
    for (int64_t h = 0; h < H; ++h)
      A->row(h) = (K->middleCols(h * dk, dk) * Q.row(h).transpose())
                      .transpose() *
                  inv_sqrt_dk;
    SoftmaxRows(A);
  };

  std::vector<Variable> inputs{s, w.query, w.key_weight, w.key_bias,
                               w.value_weight, w.value_bias};
  Tensor y({B, H * dv});
  for (int64_t b = 0; b < B; ++b) {
    RowMatrix K, V, A;
    project(inputs, b, &K, &V, &A);
    for (int64_t h = 0; h < H; ++h)
      y.AsMatrix().row(b).segment(h * dv, dv) =
          A.row(h) * V.middleCols(h * dv, dv);
  }

  return Variable::Create(
      std::move(y), std::move(inputs),
      [=](const Tensor &g, std::vector<Variable> &in) {
        auto G = g.AsMatrix(B, H * dv);
        auto Q = in[1].Value().AsMatrix();
        for (int64_t b = 0; b < B; ++b) {
          RowMatrix K, V, A;
          project(in, b, &K, &V, &A);
          RowMatrix grad_k(T, H * dk), grad_v(T, H * dv);
          RowMatrix grad_q = RowMatrix::Zero(H, dk);
          for (int64_t h = 0; h < H; ++h) {
            Eigen::RowVectorXd gh = G.row(b).segment(h * dv, dv);
            // out_h = sum_t a_t V_t.
            grad_v.middleCols(h * dv, dv) = A.row(h).transpose() * gh;
            Eigen::VectorXd grad_a = V.middleCols(h * dv, dv) * gh.transpose();
            const double inner = A.row(h).dot(grad_a);
            Eigen::VectorXd grad_z =
                A.row(h).transpose().cwiseProduct(
                    grad_a - Eigen::VectorXd::Constant(T, inner)) *
                inv_sqrt_dk;
            grad_k.middleCols(h * dk, dk) = grad_z * Q.row(h);
            grad_q.row(h) = grad_z.transpose() * K.middleCols(h * dk, dk);
          }
          auto S = in[0].Value().AsMatrix(B * T, D).middleRows(b * T, T);
          if (in[0].RequiresGrad())
            in[0].GradRef().AsMatrix(B * T, D).middleRows(b * T, T) +=
                grad_k * in[2].Value().AsMatrix() +
                grad_v * in[4].Value().AsMatrix();
          if (in[1].RequiresGrad()) in[1].GradRef().AsMatrix() += grad_q;
          if (in[2].RequiresGrad())
            in[2].GradRef().AsMatrix() += grad_k.transpose() * S;
          if (in[3].RequiresGrad())
            in[3].GradRef().AsMatrix(1, H * dk) += grad_k.colwise().sum();
          if (in[4].RequiresGrad())
            in[4].GradRef().AsMatrix() += grad_v.transpose() * S;
          if (in[5].RequiresGrad())
            in[5].GradRef().AsMatrix(1, H * dv) += grad_v.colwise().sum();
        }
      });
}

PoolingMethod ParsePoolingMethod(const std::string &name) {
  if (name == "mean") return PoolingMethod::kMean;
  if (name == "mean+std" || name == "stats") return PoolingMethod::kMeanStd;
  if (name == "lde") return PoolingMethod::kLde;
  if (name == "scaleatt") return PoolingMethod::kScaleAtt;
  throw ConfigError(StrCat("unknown pooling method '", name,
                           "' (expected mean, mean+std, lde or scaleatt)"));
}

std::string PoolingMethodName(PoolingMethod method) {
  switch (method) {
    case PoolingMethod::kMean: return "mean";
    case PoolingMethod::kMeanStd: return "mean+std";
    case PoolingMethod::kLde: return "lde";
    case PoolingMethod::kScaleAtt: return "scaleatt";
  }
  return "unknown";
}

PoolingLayer::PoolingLayer(const PoolingConfig &config, int64_t input_dim,
                           Rng &rng)
    : config_(config), input_dim_(input_dim) {
  Require(input_dim >= 1, "PoolingLayer: input dim must be positive");
  const int64_t D = input_dim;
  switch (config.method) {
    case PoolingMethod::kLde:
      Require(config.lde_clusters >= 1, "LDE needs at least one cluster");
      centers_ = MakeParameter(RandomNormal(
          {config.lde_clusters, D}, 1.0 / std::sqrt(static_cast<double>(D)),
          rng));
      break;
    case PoolingMethod::kScaleAtt: {
      const int64_t H = config.heads, dk = config.key_dim, dv = config.value_dim;
      Require(H >= 1 && dk >= 1 && dv >= 1, "ScaleAtt dims must be positive");
      att_.query = MakeParameter(
          RandomNormal({H, dk}, 1.0 / std::sqrt(static_cast<double>(dk)), rng));
      att_.key_weight = MakeParameter(FanInUniform({H * dk, D}, D, rng));
      att_.key_bias = MakeParameter(Tensor({H * dk}));
      att_.value_weight = MakeParameter(FanInUniform({H * dv, D}, D, rng));
      att_.value_bias = MakeParameter(Tensor({H * dv}));
      break;
    }
    default:
      break;
  }
}

Variable PoolingLayer::Forward(const Variable &s) const {
  Require(s.Value().Rank() == 3 && s.Dim(2) == input_dim_,
          "PoolingLayer: expected [B, T, ", input_dim_, "], got ",
          ShapeString(s.Dims()));
  switch (config_.method) {
    case PoolingMethod::kMean: return MeanPool(s);
    case PoolingMethod::kMeanStd: return StatsPool(s);
    case PoolingMethod::kLde: return LdePool(s, centers_);
    case PoolingMethod::kScaleAtt: return ScaleAttPool(s, att_);
  }
  throw InvalidArgument("PoolingLayer: bad method");
}

int64_t PoolingLayer::OutputDim() const {
  switch (config_.method) {
    case PoolingMethod::kMean: return input_dim_;
    case PoolingMethod::kMeanStd: return 2 * input_dim_;
    case PoolingMethod::kLde: return config_.lde_clusters * input_dim_;
    case PoolingMethod::kScaleAtt: return config_.heads * config_.value_dim;
  }
  return 0;
}

ParameterList PoolingLayer::Parameters() const {
  switch (config_.method) {
    case PoolingMethod::kLde: return {{"centers", centers_}};
    case PoolingMethod::kScaleAtt:
      return {{"query", att_.query},
              {"key_weight", att_.key_weight},
              {"key_bias", att_.key_bias},
              {"value_weight", att_.value_weight},
              {"value_bias", att_.value_bias}};
    default: return {};
  }
}

nlohmann::json ToJson(const PoolingConfig &c) {
  return {{"method", PoolingMethodName(c.method)},
          {"lde_clusters", c.lde_clusters},
          {"heads", c.heads},
          {"key_dim", c.key_dim},
          {"value_dim", c.value_dim}};
}

PoolingConfig PoolingConfigFromJson(const nlohmann::json &j) {
  PoolingConfig c;
  JsonReader r(j, "pooling");
  std::string method = PoolingMethodName(c.method);
  r.Get("method", &method);
  c.method = ParsePoolingMethod(method);
  r.Get("lde_clusters", &c.lde_clusters);
  r.Get("heads", &c.heads);
  r.Get("key_dim", &c.key_dim);
  r.Get("value_dim", &c.value_dim);
  r.Done();
  Require<ConfigError>(c.lde_clusters >= 1 && c.heads >= 1 && c.key_dim >= 1 &&
                           c.value_dim >= 1,
                       "pooling: sizes must be positive");
  return c;
}

}  // namespace selffilm
