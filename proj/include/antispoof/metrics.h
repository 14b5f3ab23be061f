// antispoof/include/antispoof/metrics.h

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

// Detection metrics, score fusion and the protocol / score text formats.
//
// Scores follow the "higher means more bonafide" convention.  For a
// threshold t a trial is accepted as bonafide when score >= t, so
//   P_miss(t) = #{bonafide scores < t} / #bonafide
//   P_fa(t)   = #{spoof scores >= t} / #spoof.
// Both metrics sweep t over every distinct score plus +infinity; the lowest
// score reproduces the accept-all policy and +infinity the reject-all one.
//
// Protocol lines:  speaker_id utt_id condition attack_id key [extra...]
// where condition and attack_id may be "-" and key is bonafide or spoof.
// Score lines:     utt_id score   (score written with six decimals)

#ifndef ANTISPOOF_METRICS_H_
#define ANTISPOOF_METRICS_H_

#include <algorithm>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antispoof/config.h"

namespace antispoof {

enum class TrialKey { kBonafide, kSpoof };

std::string TrialKeyName(TrialKey key);
/// "bonafide" / "spoof"; throws DataError otherwise.
TrialKey ParseTrialKey(const std::string &s);

struct TrialRecord {
  std::string speaker_id = "-";
  std::string utt_id;
  TrialKey key = TrialKey::kBonafide;
  std::optional<std::string> condition;
  std::optional<std::string> attack_id;
};

struct ScoreRecord {
  std::string utt_id;
  double score = 0.0;
};

struct EerResult {
  double eer_pct = 0.0;
  double threshold = 0.0;
  /// EER above 50%: the scores are probably of inverted polarity.
  bool polarity_warning = false;
};

struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

/// Points of the sweep in increasing threshold order; the last one has
/// threshold +infinity.  Throws DataError when a class is empty.
std::vector<OperatingPoint> DetCurve(std::span<const double> bonafide,
                                     std::span<const double> spoof);

/// Equal error rate, interpolated linearly between the two adjacent sweep
/// points where P_miss - P_fa changes sign.  Throws DataError when a class
/// is empty.
EerResult ComputeEer(std::span<const double> bonafide, std::span<const double> spoof);

struct TdcfCosts {
  double c_miss = 1.0;        // ASV miss of a target speaker
  double c_fa = 10.0;         // ASV acceptance of a non-target
  double c_fa_spoof = 10.0;   // ASV acceptance of a spoof
  double pi_spoof = 0.05;
  double pi_target = 0.95 * 0.99;
  double pi_nontarget = 0.95 * 0.01;
  double asv_pmiss = 0.0;
  double asv_pfa = 0.0;
  double asv_pmiss_spoof = 0.0;

  /// Throws UsageError on non-positive costs or probabilities outside [0,1].
  void Check() const;

  /// Reads keys tdcf.c_miss, tdcf.c_fa, tdcf.c_fa_spoof, tdcf.pi_spoof,
  /// tdcf.pi_target, tdcf.pi_nontarget, tdcf.asv_pmiss, tdcf.asv_pfa and
  /// tdcf.asv_pmiss_spoof, each defaulting to the value above.
  static TdcfCosts FromConfig(const KeyValueConfig &cfg);
};

/// Coefficients of t-DCF(t) = c0 + c1 P_miss(t) + c2 P_fa(t), together with
/// the default-decision cost c0 + min(c1, c2) used for normalization.
struct TdcfCoefficients {
  double c0, c1, c2;
  double Default() const { return c0 + std::min(c1, c2); }
};

/// Throws UsageError when c1 or c2 is not positive.
TdcfCoefficients ComputeTdcfCoefficients(const TdcfCosts &costs);

struct TdcfResult {
  double min_tdcf = 0.0;  // normalized
  double threshold = 0.0;
};

TdcfResult ComputeMinTdcf(std::span<const double> bonafide, std::span<const double> spoof,
                          const TdcfCosts &costs);

/// Splits scores by the key of the matching trial.  Every trial needs a
/// score (DataError otherwise); scores without a trial are ignored with a
/// warning.
void SplitScores(const std::vector<ScoreRecord> &scores,
                 const std::vector<TrialRecord> &trials, std::vector<double> *bonafide,
                 std::vector<double> *spoof);

EerResult Eer(const std::vector<ScoreRecord> &scores, const std::vector<TrialRecord> &trials);
TdcfResult MinTdcf(const std::vector<ScoreRecord> &scores,
                   const std::vector<TrialRecord> &trials, const TdcfCosts &costs);

/// Per-utterance mean.  All systems must cover the same utterance ids; the
/// output follows the order of the first system.  Throws DataError on
/// misalignment.
std::vector<ScoreRecord> FuseMean(const std::vector<std::vector<ScoreRecord>> &systems);

enum class FusionObjective { kEer, kMinTdcf };
std::string FusionObjectiveName(FusionObjective o);
FusionObjective ParseFusionObjective(const std::string &s);

/// Weight vectors with components n_i / N, N = round(1 / step), summing to
/// one, in ascending lexicographic order.  Throws UsageError unless 1/step
/// is (within 1e-9) a positive integer.
std::vector<std::vector<double>> SimplexGrid(size_t num_systems, double step);

struct WeightedFusionResult {
  std::vector<double> weights;
  double objective = 0.0;
  std::vector<ScoreRecord> fused;  // weights applied to every utterance
};

/// Exhaustive grid search: the objective is evaluated on the utterances of
/// `dev_trials` and the first (lexicographically smallest) weight vector
/// attaining the minimum wins.
WeightedFusionResult FuseWeightedGrid(const std::vector<std::vector<ScoreRecord>> &systems,
                                      const std::vector<TrialRecord> &dev_trials,
                                      double grid_step, FusionObjective objective,
                                      const TdcfCosts &costs = {});

/// Applies fixed weights (aligned as for FuseMean).
std::vector<ScoreRecord> FuseWeighted(const std::vector<std::vector<ScoreRecord>> &systems,
                                      std::span<const double> weights);

/// Parses protocol text.  Malformed lines raise DataError naming the line in
/// strict mode and are skipped with a warning otherwise.  Duplicate utterance
/// ids are always an error.
std::vector<TrialRecord> ParseProtocol(const std::string &text, bool strict = true,
                                       const std::string &origin = "<protocol>");
std::vector<TrialRecord> ReadProtocol(const std::filesystem::path &path, bool strict = true);
void WriteProtocol(const std::vector<TrialRecord> &trials, const std::filesystem::path &path);

std::vector<ScoreRecord> ParseScores(const std::string &text, bool strict = true,
                                     const std::string &origin = "<scores>");
std::vector<ScoreRecord> ReadScores(const std::filesystem::path &path, bool strict = true);
std::string FormatScores(const std::vector<ScoreRecord> &scores);
void WriteScores(const std::vector<ScoreRecord> &scores, const std::filesystem::path &path);

struct ConditionRow {
  std::string condition;  // "pooled" for the union of all trials
  size_t n_bonafide = 0;
  size_t n_spoof = 0;
  std::optional<double> eer_pct;   // empty when a class is missing
  std::optional<double> min_tdcf;
};

/// One row per distinct condition (sorted), trials without a condition
/// grouped under "-", followed by the pooled row.
std::vector<ConditionRow> ConditionReport(const std::vector<ScoreRecord> &scores,
                                          const std::vector<TrialRecord> &trials,
                                          const TdcfCosts &costs = {});

/// CSV with header condition,n_bonafide,n_spoof,eer_pct,min_tdcf; missing
/// values are written as N/A.
std::string FormatConditionCsv(const std::vector<ConditionRow> &rows);

}  // namespace antispoof

#endif  // ANTISPOOF_METRICS_H_
