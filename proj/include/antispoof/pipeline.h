// antispoof/include/antispoof/pipeline.h

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

// Manifest-driven batch stages behind the command-line tool.
//
// Dataset manifest (JSON):
//   {"root": ".", "seed": 7,
//    "entries": [{"utt_id": "u1", "wav_path": "u1.wav", "key": "bonafide",
//                 "split": "train", "condition": "C1",          (optional)
//                 "speaker_id": "S1", "attack_id": "A07",        (optional)
//                 "source_utt": "u0", "recipe_id": "df_mp3_16",  (augmented)
//                 "recipe": {...}}]}                             (augmented)
// Relative wav paths are resolved against root, and a relative root against
// the directory holding the manifest.  Every stage writes its outputs with
// relative paths so that reruns in other directories are byte-identical.
//
// Campaign (JSON):
//   {"output_root": "aug", "include_original": true, "mode": "all",
//    "workers": 0, "max_failure_fraction": 0.01,
//    "recipes": [{"type": "df", "format": "mp3", "bitrate": 16},
//                {"type": "la", "channel": "landline", "target_rate": 16000,
//                 "weight": 2},
//                {"type": "custom", "id": "ulaw_nb", "steps": [...]}]}
// mode "all" applies every recipe to every utterance, "sample" draws one
// recipe per utterance with probability proportional to "weight".

#ifndef ANTISPOOF_PIPELINE_H_
#define ANTISPOOF_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "antispoof/audio-io.h"
#include "antispoof/channel-sim.h"
#include "antispoof/conditioning.h"
#include "antispoof/config.h"
#include "antispoof/features.h"
#include "antispoof/gmm.h"
#include "antispoof/metrics.h"
#include "json.hpp"

namespace antispoof {

class ExternalCodecClient;

enum class Split { kTrain, kDev, kEval };
std::string SplitName(Split s);
/// Throws DataError for anything but train/dev/eval.
Split ParseSplit(const std::string &s);

struct ManifestEntry {
  std::string utt_id;
  std::string wav_path;
  TrialKey key = TrialKey::kBonafide;
  Split split = Split::kTrain;
  std::optional<std::string> condition;
  std::optional<std::string> speaker_id;
  std::optional<std::string> attack_id;
  std::optional<std::string> source_utt;
  std::optional<std::string> recipe_id;
  std::optional<nlohmann::json> recipe;
};

struct DatasetManifest {
  std::string root = ".";
  uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
  /// Directory of the manifest file; not serialized.
  std::filesystem::path base_dir = ".";

  std::filesystem::path Resolve(const ManifestEntry &e) const;

  /// Unique, non-empty utterance ids without path separators; throws
  /// DataError otherwise.
  void Check() const;

  nlohmann::json ToJson() const;
  static DatasetManifest FromJson(const nlohmann::json &j,
                                  const std::filesystem::path &base_dir = ".");
  static DatasetManifest Load(const std::filesystem::path &path);
  void Save(const std::filesystem::path &path) const;

  /// Trial list of the entries in `split` (all entries when unset).
  std::vector<TrialRecord> Trials(std::optional<Split> split = std::nullopt) const;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0: hardware
/// concurrency).  The first exception, by index, is rethrown.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn);

struct CampaignRecipe {
  std::string id;
  double weight = 1.0;
  nlohmann::json spec;
};

struct CampaignConfig {
  std::vector<CampaignRecipe> recipes;
  std::filesystem::path output_root;
  bool include_original = true;
  std::string mode = "all";
  int workers = 0;
  double max_failure_fraction = 0.01;
  LaRecipeOptions la_options;

  /// Throws UsageError on malformed campaigns (unknown recipe types,
  /// duplicate ids, negative or all-zero weights, ...).
  void Check() const;
  static CampaignConfig FromJson(const nlohmann::json &j,
                                 const std::filesystem::path &base_dir = ".");
  static CampaignConfig Load(const std::filesystem::path &path);
};

/// Channel-recipe options from config keys la.gain_min_dbfs,
/// la.gain_max_dbfs, la.packet_loss_max, la.packet_frame_ms and
/// la.bitrates.<family> (comma-separated kbps, e.g. la.bitrates.g726).
LaRecipeOptions LaOptionsFromConfig(const KeyValueConfig &cfg);

/// Concrete recipe for one utterance and campaign entry.  Seeded by
/// DeriveSeed(master_seed, {utt_id, recipe id}).
AugmentationRecipe InstantiateRecipe(const CampaignRecipe &r, const std::string &utt_id,
                                     uint64_t master_seed, int source_rate,
                                     const LaRecipeOptions &la_options);

struct AugmentResult {
  DatasetManifest manifest;
  size_t attempted = 0;
  size_t failed = 0;
};

/// Materializes the campaign under output_root, writing
/// output_root/manifest.json.  Aborts with ToolError (or DataError when no
/// tool was involved) when more than max_failure_fraction of the outputs
/// fail.
AugmentResult CmdAugment(const DatasetManifest &manifest, const CampaignConfig &campaign,
                         uint64_t master_seed, ExternalCodecClient *codecs);

struct ExtractOptions {
  FeatureKind kind = FeatureKind::kLfccStack;
  NormalizationKind norm = NormalizationKind::kNone;
  MaskPolicy policy;  // method kNone: no masking
  uint64_t seed = 0;
  StftConfig stft;
  LfccConfig lfcc;
  /// LogSpec only: force every utterance to this many seconds (0 keeps the
  /// natural length).
  double logspec_duration = 0.0;
  DurationMode duration_mode = DurationMode::kRepeatPad;
  int workers = 0;
};

struct FeatureIndexEntry {
  std::string utt_id;
  std::string path;  // relative to the index directory
  TrialKey key = TrialKey::kBonafide;
  Split split = Split::kTrain;
  std::optional<std::string> condition;
  bool masked = false;
};

struct FeatureIndex {
  FeatureKind kind = FeatureKind::kLfccStack;
  std::string norm;
  std::string mask_policy;
  uint64_t seed = 0;
  std::vector<FeatureIndexEntry> entries;
  std::filesystem::path base_dir = ".";  // not serialized

  std::filesystem::path Resolve(const FeatureIndexEntry &e) const { return base_dir / e.path; }
  nlohmann::json ToJson() const;
  static FeatureIndex Load(const std::filesystem::path &path);
  void Save(const std::filesystem::path &path) const;
};

/// Computes one feature file per readable utterance into out_dir and writes
/// out_dir/index.json.  Masks are drawn only for train entries, seeded by
/// DeriveSeed(seed, {"mask", utt_id}).  Unreadable audio is skipped with a
/// warning.
FeatureIndex CmdExtract(const DatasetManifest &manifest, const ExtractOptions &opts,
                        const std::filesystem::path &out_dir);

/// Applies the feature, normalization and masking chain of CmdExtract to one
/// buffer.
FeatureMatrix ExtractFeatures(const AudioBuffer &buf, const ExtractOptions &opts,
                              const std::string &utt_id, bool apply_masks);

struct TrainGmmOptions {
  GmmConfig gmm;
  uint64_t seed = 0;
};

/// Trains one model per class on the pooled frames of the train split and
/// writes bonafide.gmm, spoof.gmm and model.json into out_dir.
void CmdTrainGmm(const FeatureIndex &index, const TrainGmmOptions &opts,
                 const std::filesystem::path &out_dir);

/// Scores every index entry of `split` (all when unset) and writes the score
/// file.
std::vector<ScoreRecord> CmdScore(const std::filesystem::path &model_dir,
                                  const FeatureIndex &index, std::optional<Split> split,
                                  const std::filesystem::path &out_path, int workers = 0);

struct EvaluateOptions {
  TdcfCosts costs;
  std::filesystem::path det_out;         // optional DET point dump (CSV)
  std::filesystem::path audit_features;  // optional index.json to audit
};

/// Writes the condition report CSV.  With audit_features set, any masked
/// feature outside the train split raises DataError.
std::vector<ConditionRow> CmdEvaluate(const std::filesystem::path &scores_path,
                                      const std::filesystem::path &protocol_path,
                                      const std::filesystem::path &report_path,
                                      const EvaluateOptions &opts);

struct FuseOptions {
  std::string method = "mean";  // mean | weighted_grid
  FusionObjective objective = FusionObjective::kEer;
  double grid_step = 0.1;
  std::filesystem::path dev_protocol;  // required for weighted_grid
  TdcfCosts costs;
};

/// Writes the fused scores and a JSON weights record.  Returns the weights.
std::vector<double> CmdFuse(const std::vector<std::filesystem::path> &score_paths,
                            const FuseOptions &opts, const std::filesystem::path &out_path,
                            const std::filesystem::path &weights_path);

struct ValidationReport {
  size_t num_entries = 0;
  std::vector<std::string> warnings;
};

/// Checks ids and that every wav file exists and parses.  Warns when every
/// codec bitrate used in dev also appears in train.  Throws DataError on
/// hard failures; optionally writes the whole manifest as a protocol file.
ValidationReport ValidateManifest(const DatasetManifest &manifest,
                                  const std::filesystem::path &protocol_out = {});

/// Writes `j` as two-space-indented JSON followed by a newline.
void WriteJson(const nlohmann::json &j, const std::filesystem::path &path);
nlohmann::json ReadJson(const std::filesystem::path &path);

}  // namespace antispoof

#endif  // ANTISPOOF_PIPELINE_H_
