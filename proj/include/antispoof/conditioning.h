// antispoof/include/antispoof/conditioning.h

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

#ifndef ANTISPOOF_CONDITIONING_H_
#define ANTISPOOF_CONDITIONING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antispoof/features.h"

namespace antispoof {

// Per-utterance ("online") normalization and masking of feature matrices.
// Statistics are always taken over the whole matrix of the single sample.

enum class NormalizationKind { kNone, kMinMax, kMean, kStandard };

std::string NormalizationName(NormalizationKind kind);
NormalizationKind ParseNormalization(const std::string &name);

/// min_max: (x - min) / (max - min)
/// mean:    (x - mean) / (max - min)
/// standard:(x - mean) / std   (population std)
/// A constant matrix (max == min, std == 0) maps to all zeros.
FeatureMatrix Normalize(const FeatureMatrix &m, NormalizationKind kind);

enum class MaskMethod { kNone, kSpecAugment, kSpecAverage };

struct MaskPolicy {
  std::string name;
  MaskMethod method = MaskMethod::kNone;
  std::string feature;  // feature family the policy was designed for
  int num_freq_masks = 0;   // m_f
  int num_time_masks = 0;   // m_t
  int max_freq_width = 0;   // F, in bins / coefficients
  int max_time_width = 0;   // T, in frames

  bool operator==(const MaskPolicy &) const = default;
};

/// The eight named training policies.
const std::vector<MaskPolicy> &PolicyTable();

/// Looks up a named policy, or parses a five-field custom entry
/// "method,m_f,m_t,F,T" with method one of spec_augment, spec_average, none.
/// Throws UsageError for unknown names and malformed entries.
MaskPolicy ParseMaskPolicy(const std::string &text);

struct MaskBand {
  size_t start = 0;
  size_t width = 0;  // may be zero
};

struct MaskPlan {
  std::vector<MaskBand> freq;  // row bands
  std::vector<MaskBand> time;  // column bands
};

/// Draws the mask geometry: for each frequency mask f ~ U{0..F} then
/// f0 ~ U{0..freq_dim-f-1}; then for each time mask t ~ U{0..T},
/// t0 ~ U{0..time_dim-t-1}.  Requires F < freq_dim and T < time_dim
/// whenever the corresponding mask count is positive.
MaskPlan DrawMasks(const MaskPolicy &policy, size_t freq_dim, size_t time_dim,
                   uint64_t seed);

/// Applies DrawMasks(policy, ..., seed).  SpecAugment fills with 0,
/// SpecAverage with the mean of the input matrix taken before any masking.
FeatureMatrix ApplyMasks(const FeatureMatrix &m, const MaskPolicy &policy,
                         uint64_t seed);

}  // namespace antispoof

#endif  // ANTISPOOF_CONDITIONING_H_
