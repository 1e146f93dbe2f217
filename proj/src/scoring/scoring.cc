// src/scoring/scoring.cc

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

#include "selffilm/scoring/scoring.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "selffilm/base/common.h"

namespace selffilm {

namespace fs = std::filesystem;

void ValidateTrialScores(const TrialScores &t) {
  Require(t.scores.size() == t.labels.size(), "trial scores: ", t.scores.size(),
          " scores but ", t.labels.size(), " labels");
  Require(t.scores.size() >= 2, "trial scores: need at least 2 trials");
  const auto targets = std::count(t.labels.begin(), t.labels.end(), true);
  Require(targets > 0 && targets < static_cast<int64_t>(t.labels.size()),
          "trial scores: need both target and nontarget trials");
  for (double s : t.scores) Require(std::isfinite(s), "trial scores: non-finite score");
}

namespace {

struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

// Operating points for every unique threshold, ascending, followed by
// "accept nothing" (threshold +inf).
std::vector<OperatingPoint> OperatingPoints(const TrialScores &t) {
  ValidateTrialScores(t);
  std::vector<size_t> order(t.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return t.scores[a] < t.scores[b]; });
  const double n_tar = static_cast<double>(std::count(t.labels.begin(), t.labels.end(), true));
  const double n_non = static_cast<double>(t.labels.size()) - n_tar;
  std::vector<OperatingPoint> points;
  int64_t below_tar = 0, below_non = 0;  // trials with score < threshold
  size_t i = 0;
  while (i < order.size()) {
    const double thr = t.scores[order[i]];
    points.push_back({thr, below_tar / n_tar, (n_non - below_non) / n_non});
    for (; i < order.size() && t.scores[order[i]] == thr; ++i)
      (t.labels[order[i]] ? below_tar : below_non)++;
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return points;
}

double Cost(const OperatingPoint &p, const DcfOptions &o) {
  const double norm = std::min(o.p_target * o.c_miss, (1.0 - o.p_target) * o.c_fa);
  return (o.p_target * o.c_miss * p.p_miss + (1.0 - o.p_target) * o.c_fa * p.p_fa) / norm;
}

void ValidateDcfOptions(const DcfOptions &o) {
  Require(o.p_target > 0.0 && o.p_target < 1.0, "p_target must lie in (0, 1)");
  Require(o.c_miss > 0.0 && o.c_fa > 0.0, "detection costs must be positive");
}

}  // namespace

EerResult ComputeEer(const TrialScores &t) {
  const auto points = OperatingPoints(t);
  // p_miss - p_fa rises from -1 (accept all) to +1 (accept nothing).
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const auto &lo = points[i], &hi = points[i + 1];
    const double d_lo = lo.p_miss - lo.p_fa, d_hi = hi.p_miss - hi.p_fa;
    if (d_lo == 0.0) return {lo.p_miss, lo.threshold};
    if (d_hi < 0.0) continue;
    const double f = d_lo / (d_lo - d_hi);
    return {lo.p_miss + f * (hi.p_miss - lo.p_miss), hi.threshold};
  }
  throw Error("ComputeEer: no crossing found");
}

double DetectionCost(const TrialScores &t, double threshold, const DcfOptions &opts) {
  ValidateTrialScores(t);
  ValidateDcfOptions(opts);
  double n_tar = 0, n_non = 0, miss = 0, fa = 0;
  for (size_t i = 0; i < t.scores.size(); ++i) {
    const bool accept = t.scores[i] >= threshold;
    if (t.labels[i]) {
      ++n_tar;
      miss += !accept;
    } else {
      ++n_non;
      fa += accept;
    }
  }
  return Cost({threshold, miss / n_tar, fa / n_non}, opts);
}

double MinDcf(const TrialScores &t, const DcfOptions &opts) {
  ValidateDcfOptions(opts);
  double best = std::numeric_limits<double>::infinity();
  for (const auto &p : OperatingPoints(t)) best = std::min(best, Cost(p, opts));
  return best;
}

std::vector<int> EncodeLabels(const std::vector<std::string> &labels,
                              std::vector<std::string> *names) {
  std::map<std::string, int> index;
  std::vector<std::string> order;
  std::vector<int> out;
  for (const auto &l : labels) {
    auto [it, inserted] = index.emplace(l, static_cast<int>(order.size()));
    if (inserted) order.push_back(l);
    out.push_back(it->second);
  }
  if (names) *names = order;
  return out;
}

double Silhouette(const LabeledSet &set) {
  const int64_t n = set.vectors.rows();
  Require(static_cast<int64_t>(set.labels.size()) == n, "silhouette: ", n,
          " vectors but ", set.labels.size(), " labels");
  std::map<int, int64_t> counts;
  for (int l : set.labels) ++counts[l];
  Require(counts.size() >= 2, "silhouette: need at least 2 classes");
  for (const auto &[label, c] : counts)
    Require(c >= 2, "silhouette: class ", label, " has a single point");

  Eigen::MatrixXd d(n, n);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) d(i, j) = (set.vectors.row(i) - set.vectors.row(j)).norm();

  const int classes = counts.rbegin()->first + 1;
  double total = 0.0;
  std::vector<double> sum(classes);
  for (int64_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (int64_t j = 0; j < n; ++j) sum[set.labels[j]] += d(i, j);
    const int own = set.labels[i];
    const double a = sum[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto &[label, c] : counts)
      if (label != own) b = std::min(b, sum[label] / static_cast<double>(c));
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

double ShuffledSilhouette(const LabeledSet &set, int shuffles, uint64_t seed) {
  Require(shuffles >= 1, "ShuffledSilhouette: need at least one shuffle");
  std::mt19937_64 rng(seed);
  LabeledSet shuffled = set;
  double total = 0.0;
  for (int s = 0; s < shuffles; ++s) {
    std::shuffle(shuffled.labels.begin(), shuffled.labels.end(), rng);
    total += Silhouette(shuffled);
  }
  return total / shuffles;
}

ProjectionMethod ParseProjectionMethod(const std::string &name) {
  if (name == "pca") return ProjectionMethod::kPca;
  if (name == "tsne") return ProjectionMethod::kTsne;
  throw ConfigError(StrCat("unknown projection '", name, "' (expected pca or tsne)"));
}

std::string ProjectionMethodName(ProjectionMethod m) {
  return m == ProjectionMethod::kPca ? "pca" : "tsne";
}

RowMatrix PcaProject(const RowMatrix &x) {
  Require(x.rows() >= 2 && x.cols() >= 1, "PCA needs at least 2 points");
  const RowMatrix centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  RowMatrix out = RowMatrix::Zero(x.rows(), 2);
  const int64_t k = cov.rows();
  for (int64_t c = 0; c < 2 && c < k; ++c) {
    Eigen::VectorXd axis = eig.eigenvectors().col(k - 1 - c);  // descending variance
    Eigen::Index arg;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    out.col(c) = centered * axis;
  }
  return out;
}

namespace {

// Row-stochastic affinities with the requested perplexity, symmetrized.
Eigen::MatrixXd TsneAffinities(const RowMatrix &x, double perplexity) {
  const int64_t n = x.rows();
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * x * x.transpose();
  d.colwise() += sq;
  d.rowwise() += sq.transpose();
  d = d.cwiseMax(0.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  const double target = std::log(perplexity);
  for (int64_t i = 0; i < n; ++i) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), beta = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double sum = 0.0, dot = 0.0;
      for (int64_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * d(i, j));
        p(i, j) = w;
        sum += w;
        dot += w * d(i, j);
      }
      sum = std::max(sum, 1e-300);
      const double entropy = std::log(sum) + beta * dot / sum;
      p.row(i) /= sum;
      if (std::abs(entropy - target) < 1e-6) break;
      if (entropy > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
  }
  Eigen::MatrixXd sym = (p + p.transpose()) / (2.0 * static_cast<double>(n));
  return sym.cwiseMax(1e-12);
}

}  // namespace

RowMatrix TsneProject(const RowMatrix &x, const TsneOptions &opts) {
  const int64_t n = x.rows();
  Require(n >= 4, "t-SNE needs at least 4 points");
  const double perplexity = std::min(opts.perplexity, (n - 1) / 3.0);
  const Eigen::MatrixXd p = TsneAffinities(x, perplexity);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1e-4);
  Eigen::MatrixXd y(n, 2), velocity = Eigen::MatrixXd::Zero(n, 2);
  for (int64_t i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) y(i, c) = normal(rng);

  Eigen::MatrixXd grad(n, 2);
  for (int iter = 0; iter < opts.iterations; ++iter) {
    const double exaggeration = iter < opts.exaggeration_iterations ? opts.exaggeration : 1.0;
    const double momentum = iter < 250 ? 0.5 : 0.8;
    const Eigen::VectorXd sq = y.rowwise().squaredNorm();
    Eigen::MatrixXd num = -2.0 * y * y.transpose();
    num.colwise() += sq;
    num.rowwise() += sq.transpose();
    num = (num.array() + 1.0).inverse().matrix();
    num.diagonal().setZero();
    const double z = std::max(num.sum(), 1e-300);
    // dC/dy_i = 4 sum_j (p_ij - q_ij) num_ij (y_i - y_j)
    Eigen::MatrixXd w = (exaggeration * p - num / z).cwiseProduct(num);
    w.diagonal().setZero();
    grad = 4.0 * (w.rowwise().sum().asDiagonal() * y - w * y);
    velocity = momentum * velocity - opts.learning_rate * grad;
    y += velocity;
    y.rowwise() -= y.colwise().mean();
  }
  return y;
}

RowMatrix Project2d(const RowMatrix &x, ProjectionMethod method, uint64_t seed) {
  if (method == ProjectionMethod::kPca) return PcaProject(x);
  TsneOptions opts;
  opts.seed = seed;
  return TsneProject(x, opts);
}

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) fields.push_back(f);
  return fields;
}

std::ofstream OpenOutput(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::trunc);
  Require<Error>(out.good(), "cannot write ", path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

void WriteScores(const std::string &path, const std::vector<ScoredTrial> &scores) {
  std::ofstream out = OpenOutput(path);
  for (const auto &s : scores) out << s.enroll << '\t' << s.test << '\t' << s.score << '\n';
}

std::vector<ScoredTrial> ReadScores(const std::string &path) {
  Require<MissingArtifact>(fs::exists(path), "missing score file ", path);
  std::ifstream in(path);
  std::vector<ScoredTrial> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    Require(f.size() == 3, path, ":", lineno, ": expected 'enroll<TAB>test<TAB>score'");
    out.push_back({f[0], f[1], std::stod(f[2])});
  }
  return out;
}

void WriteProjection(const std::string &path, const std::vector<std::string> &utts,
                     const RowMatrix &coords, const std::vector<std::string> &labels) {
  Require(coords.rows() == static_cast<int64_t>(utts.size()) &&
              utts.size() == labels.size() && coords.cols() == 2,
          "WriteProjection: inconsistent sizes");
  std::ofstream out = OpenOutput(path);
  for (size_t i = 0; i < utts.size(); ++i)
    out << utts[i] << '\t' << coords(i, 0) << '\t' << coords(i, 1) << '\t' << labels[i] << '\n';
}

void WriteScatterSvg(const std::string &path, const std::string &title,
                     const RowMatrix &coords, const std::vector<std::string> &labels) {
  Require(coords.rows() == static_cast<int64_t>(labels.size()) && coords.cols() == 2,
          "WriteScatterSvg: inconsistent sizes");
  static const char *kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  std::vector<std::string> names;
  const std::vector<int> ids = EncodeLabels(labels, &names);
  const double w = 640, h = 480, margin = 40, legend = 140;
  const double x0 = coords.col(0).minCoeff(), x1 = coords.col(0).maxCoeff();
  const double y0 = coords.col(1).minCoeff(), y1 = coords.col(1).maxCoeff();
  auto sx = [&](double v) {
    return margin + (x1 > x0 ? (v - x0) / (x1 - x0) : 0.5) * (w - 2 * margin - legend);
  };
  auto sy = [&](double v) {
    return h - margin - (y1 > y0 ? (v - y0) / (y1 - y0) : 0.5) * (h - 2 * margin);
  };
  std::ofstream out = OpenOutput(path);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  for (int64_t i = 0; i < coords.rows(); ++i)
    out << "<circle cx=\"" << sx(coords(i, 0)) << "\" cy=\"" << sy(coords(i, 1))
        << "\" r=\"3.5\" fill=\"" << kPalette[ids[i] % 10] << "\" fill-opacity=\"0.8\"/>\n";
  for (size_t k = 0; k < names.size(); ++k) {
    const double ly = margin + 18.0 * static_cast<double>(k);
    out << "<circle cx=\"" << w - legend + 10 << "\" cy=\"" << ly << "\" r=\"5\" fill=\""
        << kPalette[k % 10] << "\"/>\n<text x=\"" << w - legend + 20 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << names[k] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace selffilm
