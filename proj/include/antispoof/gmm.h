// antispoof/include/antispoof/gmm.h

// Copyright 2026  The antispoof Authors

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

// Diagonal-covariance Gaussian mixture models and the two-model
// log-likelihood-ratio scorer.
//
// Model file layout, little-endian:
//   0   4      magic "GMMD"
//   4   4      u32 version (1)
//   8   4      u32 n_components K
//   12  4      u32 dim D
//   16  8K     f64 weights
//   ..  8KD    f64 means, component-major
//   ..  8KD    f64 variances, component-major

#ifndef ANTISPOOF_GMM_H_
#define ANTISPOOF_GMM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "antispoof/features.h"
#include "antispoof/matrix.h"

namespace antispoof {

struct GmmModel {
  std::vector<double> weights;  // K
  Matrix means;                 // K x D
  Matrix variances;             // K x D

  size_t NumComponents() const { return weights.size(); }
  size_t Dim() const { return means.NumCols(); }

  /// Checks shapes, that weights sum to 1 within 1e-9 and that every
  /// variance is >= floor.  Throws DataError on failure.
  void Check(double variance_floor = 0.0) const;

  bool operator==(const GmmModel &) const = default;
};

struct GmmConfig {
  int n_components = 64;
  int max_iters = 100;
  double tol = 1e-5;             // relative change of the mean log-likelihood
  double variance_floor = 1e-4;
  int kmeans_iters = 10;         // Lloyd refinements after k-means++ seeding
};

struct GmmTrainResult {
  GmmModel model;
  /// Mean per-frame log-likelihood evaluated in each E-step, i.e. of the
  /// parameters in force at the start of that iteration.  The final entry
  /// is the log-likelihood of the returned model.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  int reseeded_components = 0;
};

/// Fits a mixture to `frames` (one frame per row).  A component whose
/// responsibilities vanish is re-seeded on the frame worst explained by the
/// current model, with a warning.  Throws std::invalid_argument on empty
/// input or fewer frames than components.
GmmTrainResult GmmTrain(const Matrix &frames, const GmmConfig &cfg, uint64_t seed);

double GmmFrameLogLikelihood(const GmmModel &model, std::span<const double> frame);

/// Mean per-frame log-likelihood over the rows of `frames`.
double GmmMeanLogLikelihood(const GmmModel &model, const Matrix &frames);

/// Mean over frames of log p(x | bonafide) - log p(x | spoof).  Throws
/// DataError when the dimensions disagree.
double GmmLlrScore(const GmmModel &bonafide, const GmmModel &spoof,
                   const FeatureMatrix &features);

/// Frames as rows: a [freq x time] matrix becomes [time x freq].  Throws
/// std::invalid_argument on an empty matrix.
Matrix PoolFeatures(const FeatureMatrix &m);

std::vector<uint8_t> EncodeGmm(const GmmModel &model);
GmmModel DecodeGmm(std::span<const uint8_t> bytes);
void WriteGmm(const GmmModel &model, const std::filesystem::path &path);
GmmModel ReadGmm(const std::filesystem::path &path);

}  // namespace antispoof

#endif  // ANTISPOOF_GMM_H_
