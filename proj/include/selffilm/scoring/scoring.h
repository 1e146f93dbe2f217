// include/selffilm/scoring/scoring.h

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

#ifndef SELFFILM_SCORING_SCORING_H_
#define SELFFILM_SCORING_SCORING_H_

#include <string>
#include <vector>

#include "selffilm/autograd/tensor.h"

namespace selffilm {

/// Verification scores; labels[i] is true for a target (same speaker) trial.
struct TrialScores {
  std::vector<double> scores;
  std::vector<bool> labels;
};

/// Requires equal lengths, finite scores and both classes present.
void ValidateTrialScores(const TrialScores &t);

/**
   Equal error rate. A trial is accepted when score >= threshold; thresholds
   sweep the sorted unique scores plus "accept nothing". Where the miss and
   false-alarm rates cross between two adjacent operating points the EER is
   linearly interpolated along the segment joining them.
 */
struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;  // threshold of the operating point at or after the crossing
};
EerResult ComputeEer(const TrialScores &t);
inline double Eer(const TrialScores &t) { return ComputeEer(t).eer; }

struct DcfOptions {
  double p_target = 0.05;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

/// Normalized detection cost when accepting scores >= threshold.
double DetectionCost(const TrialScores &t, double threshold, const DcfOptions &opts = {});
/// Minimum of DetectionCost over the operating points of ComputeEer.
double MinDcf(const TrialScores &t, const DcfOptions &opts = {});

/// Vectors [N, K] with one integer class label per row.
struct LabeledSet {
  RowMatrix vectors;
  std::vector<int> labels;
};

/// Maps string labels to dense integers in order of first appearance.
std::vector<int> EncodeLabels(const std::vector<std::string> &labels,
                              std::vector<std::string> *names = nullptr);

/// Mean silhouette with Euclidean distance. Every class needs >= 2 points and
/// there must be >= 2 classes.
double Silhouette(const LabeledSet &set);
/// Mean silhouette over `shuffles` random permutations of the labels.
double ShuffledSilhouette(const LabeledSet &set, int shuffles, uint64_t seed);

enum class ProjectionMethod { kPca, kTsne };
ProjectionMethod ParseProjectionMethod(const std::string &name);  // "pca"/"tsne"
std::string ProjectionMethodName(ProjectionMethod m);

/// First two principal components [N, 2]; each axis is signed so that its
/// largest-magnitude loading is positive.
RowMatrix PcaProject(const RowMatrix &x);

struct TsneOptions {
  double perplexity = 30.0;  // clipped to (N - 1) / 3
  int iterations = 750;
  int exaggeration_iterations = 100;
  double exaggeration = 12.0;
  double learning_rate = 100.0;
  uint64_t seed = 1;
};
/// Exact-gradient t-SNE embedding [N, 2], deterministic given the seed.
RowMatrix TsneProject(const RowMatrix &x, const TsneOptions &opts = {});

RowMatrix Project2d(const RowMatrix &x, ProjectionMethod method, uint64_t seed);

// Line-delimited text files.
struct ScoredTrial {
  std::string enroll;
  std::string test;
  double score = 0.0;
};
void WriteScores(const std::string &path, const std::vector<ScoredTrial> &scores);
std::vector<ScoredTrial> ReadScores(const std::string &path);

/// utt <TAB> x <TAB> y <TAB> label
void WriteProjection(const std::string &path, const std::vector<std::string> &utts,
                     const RowMatrix &coords, const std::vector<std::string> &labels);

/// Minimal SVG scatter plot, one colour per label.
void WriteScatterSvg(const std::string &path, const std::string &title,
                     const RowMatrix &coords, const std::vector<std::string> &labels);

}  // namespace selffilm

#endif  // SELFFILM_SCORING_SCORING_H_
