// antispoof/src/conditioning.cc

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

#include "antispoof/conditioning.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "antispoof/common.h"

namespace antispoof {

namespace {

// Mean accumulated as offsets from the minimum, so a constant matrix yields
// exactly its constant.
double OffsetMean(const std::vector<double> &v, double lo) {
  double acc = 0.0;
  for (double x : v) acc += x - lo;
  return lo + acc / static_cast<double>(v.size());
}

}  // namespace

std::string NormalizationName(NormalizationKind kind) {
  switch (kind) {
    case NormalizationKind::kNone: return "none";
    case NormalizationKind::kMinMax: return "min_max";
    case NormalizationKind::kMean: return "mean";
    case NormalizationKind::kStandard: return "standard";
  }
  return "none";
}

NormalizationKind ParseNormalization(const std::string &name) {
  if (name == "none") return NormalizationKind::kNone;
  if (name == "min_max" || name == "minmax") return NormalizationKind::kMinMax;
  if (name == "mean") return NormalizationKind::kMean;
  if (name == "standard" || name == "std") return NormalizationKind::kStandard;
  throw UsageError("unknown normalization: " + name);
}

FeatureMatrix Normalize(const FeatureMatrix &m, NormalizationKind kind) {
  FeatureMatrix out = m;
  std::vector<double> &v = out.values.Data();
  if (kind == NormalizationKind::kNone || v.empty()) return out;

  const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *min_it, hi = *max_it;
  const double range = hi - lo;
  const double mean = OffsetMean(v, lo);

  switch (kind) {
    case NormalizationKind::kMinMax:
      if (!(range > 0.0)) { std::fill(v.begin(), v.end(), 0.0); break; }
      for (double &x : v) x = (x - lo) / range;
      break;
    case NormalizationKind::kMean:
      if (!(range > 0.0)) { std::fill(v.begin(), v.end(), 0.0); break; }
      for (double &x : v) x = (x - mean) / range;
      break;
    case NormalizationKind::kStandard: {
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = std::sqrt(var / static_cast<double>(v.size()));
      if (!(sd > 0.0)) { std::fill(v.begin(), v.end(), 0.0); break; }
      for (double &x : v) x = (x - mean) / sd;
      break;
    }
    case NormalizationKind::kNone:
      break;
  }
  return out;
}

const std::vector<MaskPolicy> &PolicyTable() {
  using M = MaskMethod;
  // name, method, feature, m_f, m_t, F, T
  static const std::vector<MaskPolicy> table = {
      {"None", M::kNone, "-", 0, 0, 0, 0},
      {"SAv1", M::kSpecAverage, "LFCC", 1, 0, 12, 0},
      {"SAu1", M::kSpecAugment, "LFCC", 1, 0, 12, 0},
      {"SAv2", M::kSpecAverage, "LFCC", 1, 1, 12, 80},
      {"SAv3", M::kSpecAverage, "LogSpec", 0, 1, 0, 10},
      {"SAu3", M::kSpecAugment, "LogSpec", 0, 1, 0, 10},
      {"SAv4", M::kSpecAverage, "LogSpec", 1, 0, 10, 0},
      {"SAu4", M::kSpecAugment, "LogSpec", 1, 0, 10, 0},
  };
  return table;
}

MaskPolicy ParseMaskPolicy(const std::string &text) {
  for (const MaskPolicy &p : PolicyTable())
    if (p.name == text) return p;
  if (text == "none") return PolicyTable().front();

  std::vector<std::string> fields;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) fields.push_back(Trim(item));
  if (fields.size() != 5)
    throw UsageError("unknown mask policy '" + text +
                     "' (expected a table name or method,m_f,m_t,F,T)");
  MaskPolicy p;
  p.name = text;
  p.feature = "custom";
  if (fields[0] == "spec_augment") p.method = MaskMethod::kSpecAugment;
  else if (fields[0] == "spec_average") p.method = MaskMethod::kSpecAverage;
  else if (fields[0] == "none") p.method = MaskMethod::kNone;
  else throw UsageError("unknown mask method '" + fields[0] + "'");
  int vals[4];
  for (int i = 0; i < 4; ++i) {
    try {
      size_t used = 0;
      vals[i] = std::stoi(fields[i + 1], &used);
      if (used != fields[i + 1].size() || vals[i] < 0) throw std::invalid_argument("");
    } catch (const std::exception &) {
      throw UsageError("bad integer field '" + fields[i + 1] + "' in mask policy");
    }
  }
  p.num_freq_masks = vals[0];
  p.num_time_masks = vals[1];
  p.max_freq_width = vals[2];
  p.max_time_width = vals[3];
  if (p.method == MaskMethod::kNone &&
      (vals[0] || vals[1] || vals[2] || vals[3]))
    throw UsageError("mask method none requires all counts to be zero");
  return p;
}

MaskPlan DrawMasks(const MaskPolicy &policy, size_t freq_dim, size_t time_dim,
                   uint64_t seed) {
  MaskPlan plan;
  if (policy.method == MaskMethod::kNone) return plan;
  if (policy.num_freq_masks > 0 &&
      static_cast<size_t>(policy.max_freq_width) >= freq_dim)
    throw std::invalid_argument("DrawMasks: F must be smaller than freq_dim");
  if (policy.num_time_masks > 0 &&
      static_cast<size_t>(policy.max_time_width) >= time_dim)
    throw std::invalid_argument("DrawMasks: T must be smaller than time_dim");
  Rng rng(seed);
  for (int i = 0; i < policy.num_freq_masks; ++i) {
    MaskBand b;
    b.width = static_cast<size_t>(rng.UniformInt(0, policy.max_freq_width));
    b.start = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(freq_dim - b.width) - 1));
    plan.freq.push_back(b);
  }
  for (int i = 0; i < policy.num_time_masks; ++i) {
    MaskBand b;
    b.width = static_cast<size_t>(rng.UniformInt(0, policy.max_time_width));
    b.start = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(time_dim - b.width) - 1));
    plan.time.push_back(b);
  }
  return plan;
}

FeatureMatrix ApplyMasks(const FeatureMatrix &m, const MaskPolicy &policy,
                         uint64_t seed) {
  FeatureMatrix out = m;
  if (policy.method == MaskMethod::kNone || m.values.Empty()) return out;
  const MaskPlan plan = DrawMasks(policy, m.FreqDim(), m.TimeDim(), seed);
  double fill = 0.0;
  if (policy.method == MaskMethod::kSpecAverage) {
    const std::vector<double> &v = m.values.Data();
    fill = OffsetMean(v, *std::min_element(v.begin(), v.end()));
  }
  for (const MaskBand &b : plan.freq)
    for (size_t r = b.start; r < b.start + b.width; ++r)
      for (size_t t = 0; t < out.TimeDim(); ++t) out.values(r, t) = fill;
  for (const MaskBand &b : plan.time)
    for (size_t t = b.start; t < b.start + b.width; ++t)
      for (size_t r = 0; r < out.FreqDim(); ++r) out.values(r, t) = fill;
  return out;
}

}  // namespace antispoof
