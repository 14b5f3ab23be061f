// antispoof/src/pipeline.cc

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

#include "antispoof/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "antispoof/common.h"
#include "antispoof/external-codec.h"
#include "antispoof/feature-io.h"

namespace antispoof {

namespace {

using nlohmann::json;

bool IsSafeId(const std::string &id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id)
    if (c == '/' || c == '\\' || std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

std::optional<std::string> OptString(const json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

std::string FormatKbps(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// Mutex-free per-index message collection, flushed in index order so that
// logs do not depend on thread scheduling.
struct IndexedLog {
  explicit IndexedLog(size_t n) : messages(n) {}
  void Flush() const {
    for (const auto &list : messages)
      for (const std::string &m : list) LogWarning(m);
  }
  std::vector<std::vector<std::string>> messages;
};

}  // namespace

std::string SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kEval: return "eval";
  }
  return "train";
}

Split ParseSplit(const std::string &s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "eval") return Split::kEval;
  throw DataError("unknown split '" + s + "' (train, dev or eval)");
}

void WriteJson(const json &j, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

json ReadJson(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifest

std::filesystem::path DatasetManifest::Resolve(const ManifestEntry &e) const {
  const std::filesystem::path wav(e.wav_path);
  if (wav.is_absolute()) return wav;
  const std::filesystem::path r(root);
  return (r.is_absolute() ? r : base_dir / r) / wav;
}

void DatasetManifest::Check() const {
  std::set<std::string> seen;
  for (const ManifestEntry &e : entries) {
    if (!IsSafeId(e.utt_id))
      throw DataError("invalid utterance id '" + e.utt_id + "' in manifest");
    if (e.wav_path.empty()) throw DataError("utterance " + e.utt_id + " has no wav_path");
    if (!seen.insert(e.utt_id).second)
      throw DataError("duplicate utterance id " + e.utt_id + " in manifest");
  }
}

json DatasetManifest::ToJson() const {
  json arr = json::array();
  for (const ManifestEntry &e : entries) {
    json j = {{"utt_id", e.utt_id}, {"wav_path", e.wav_path},
              {"key", TrialKeyName(e.key)}, {"split", SplitName(e.split)}};
    if (e.condition) j["condition"] = *e.condition;
    if (e.speaker_id) j["speaker_id"] = *e.speaker_id;
    if (e.attack_id) j["attack_id"] = *e.attack_id;
    if (e.source_utt) j["source_utt"] = *e.source_utt;
    if (e.recipe_id) j["recipe_id"] = *e.recipe_id;
    if (e.recipe) j["recipe"] = *e.recipe;
    arr.push_back(std::move(j));
  }
  return {{"root", root}, {"seed", seed}, {"entries", arr}};
}

DatasetManifest DatasetManifest::FromJson(const json &j,
                                          const std::filesystem::path &base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.root = j.value("root", std::string("."));
    m.seed = j.value("seed", uint64_t{0});
    for (const json &e : j.at("entries")) {
      ManifestEntry entry;
      entry.utt_id = e.at("utt_id").get<std::string>();
      entry.wav_path = e.at("wav_path").get<std::string>();
      entry.key = ParseTrialKey(e.at("key").get<std::string>());
      entry.split = ParseSplit(e.value("split", std::string("train")));
      entry.condition = OptString(e, "condition");
      entry.speaker_id = OptString(e, "speaker_id");
      entry.attack_id = OptString(e, "attack_id");
      entry.source_utt = OptString(e, "source_utt");
      entry.recipe_id = OptString(e, "recipe_id");
      if (e.contains("recipe")) entry.recipe = e.at("recipe");
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  m.Check();
  return m;
}

DatasetManifest DatasetManifest::Load(const std::filesystem::path &path) {
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : ".";
  return FromJson(ReadJson(path), dir);
}

void DatasetManifest::Save(const std::filesystem::path &path) const {
  WriteJson(ToJson(), path);
}

std::vector<TrialRecord> DatasetManifest::Trials(std::optional<Split> split) const {
  std::vector<TrialRecord> out;
  for (const ManifestEntry &e : entries) {
    if (split && e.split != *split) continue;
    TrialRecord t;
    t.speaker_id = e.speaker_id.value_or("-");
    t.utt_id = e.utt_id;
    t.key = e.key;
    t.condition = e.condition;
    t.attack_id = e.attack_id;
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Worker pool

void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn) {
  if (n == 0) return;
  size_t threads = workers > 0 ? static_cast<size_t>(workers)
                               : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Campaigns

void CampaignConfig::Check() const {
  if (mode != "all" && mode != "sample")
    throw UsageError("campaign mode must be 'all' or 'sample', not '" + mode + "'");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
    throw UsageError("max_failure_fraction must lie in [0, 1]");
  if (output_root.empty()) throw UsageError("campaign needs an output_root");
  std::set<std::string> ids;
  double total = 0.0;
  for (const CampaignRecipe &r : recipes) {
    if (!IsSafeId(r.id)) throw UsageError("invalid recipe id '" + r.id + "'");
    if (!ids.insert(r.id).second) throw UsageError("duplicate recipe id " + r.id);
    if (!(r.weight >= 0.0)) throw UsageError("recipe " + r.id + " has a negative weight");
    total += r.weight;
    const std::string type = r.spec.value("type", std::string());
    if (type != "df" && type != "la" && type != "custom")
      throw UsageError("recipe " + r.id + ": unknown type '" + type + "'");
  }
  if (!recipes.empty() && !(total > 0.0))
    throw UsageError("campaign recipe weights are all zero");
  if (recipes.empty() && !include_original)
    throw UsageError("campaign has no recipes and does not keep the originals");
}

CampaignConfig CampaignConfig::FromJson(const json &j, const std::filesystem::path &base_dir) {
  CampaignConfig c;
  try {
    const std::filesystem::path out(j.at("output_root").get<std::string>());
    c.output_root = out.is_absolute() ? out : base_dir / out;
    c.include_original = j.value("include_original", true);
    c.mode = j.value("mode", std::string("all"));
    c.workers = j.value("workers", 0);
    c.max_failure_fraction = j.value("max_failure_fraction", 0.01);
    for (const json &r : j.value("recipes", json::array())) {
      CampaignRecipe rec;
      rec.spec = r;
      rec.weight = r.value("weight", 1.0);
      const std::string type = r.value("type", std::string());
      if (r.contains("id")) {
        rec.id = r.at("id").get<std::string>();
      } else if (type == "df") {
        rec.id = "df_" + ExternalFormatName(ParseExternalFormat(r.at("format").get<std::string>())) +
                 "_" + FormatKbps(r.at("bitrate").get<double>());
      } else if (type == "la") {
        rec.id = "la_" + ChannelClassName(ParseChannelClass(r.at("channel").get<std::string>()));
      } else {
        throw UsageError("campaign recipe of type '" + type + "' needs an explicit id");
      }
      c.recipes.push_back(std::move(rec));
    }
  } catch (const json::exception &e) {
    throw UsageError(std::string("malformed campaign: ") + e.what());
  }
  c.Check();
  return c;
}

CampaignConfig CampaignConfig::Load(const std::filesystem::path &path) {
  json j;
  try {
    j = ReadJson(path);
  } catch (const DataError &e) {
    throw UsageError(e.what());
  }
  return FromJson(j, path.has_parent_path() ? path.parent_path() : ".");
}

LaRecipeOptions LaOptionsFromConfig(const KeyValueConfig &cfg) {
  LaRecipeOptions o;
  o.gain_min_dbfs = cfg.GetDouble("la.gain_min_dbfs", o.gain_min_dbfs);
  o.gain_max_dbfs = cfg.GetDouble("la.gain_max_dbfs", o.gain_max_dbfs);
  o.packet_loss_max = cfg.GetDouble("la.packet_loss_max", o.packet_loss_max);
  o.packet_frame_ms = cfg.GetDouble("la.packet_frame_ms", o.packet_frame_ms);
  for (const auto &[family, rates] : DefaultLaBitrates()) {
    const std::string key = "la.bitrates." + LaCodecName(family);
    if (cfg.Has(key)) o.bitrates[family] = cfg.GetDoubleList(key, rates);
  }
  for (const std::string &key : cfg.KeysWithPrefix("la.bitrates.")) {
    bool known = false;
    for (const auto &entry : DefaultLaBitrates())
      known = known || key == "la.bitrates." + LaCodecName(entry.first);
    if (!known) throw UsageError("unknown codec family in config key " + key);
  }
  return o;
}

AugmentationRecipe InstantiateRecipe(const CampaignRecipe &r, const std::string &utt_id,
                                     uint64_t master_seed, int source_rate,
                                     const LaRecipeOptions &la_options) {
  const uint64_t seed = DeriveSeed(master_seed, {utt_id, r.id});
  const json &s = r.spec;
  AugmentationRecipe recipe;
  try {
    const std::string type = s.at("type").get<std::string>();
    if (type == "df") {
      recipe = BuildDfRecipe(ParseExternalFormat(s.at("format").get<std::string>()),
                             s.at("bitrate").get<double>(), s.value("strict", true));
    } else if (type == "la") {
      LaRecipeOptions opts = la_options;
      opts.target_rate = s.value("target_rate", source_rate);
      opts.gain_min_dbfs = s.value("gain_min_dbfs", opts.gain_min_dbfs);
      opts.gain_max_dbfs = s.value("gain_max_dbfs", opts.gain_max_dbfs);
      opts.packet_loss_max = s.value("packet_loss_max", opts.packet_loss_max);
      recipe = BuildLaRecipe(ParseChannelClass(s.at("channel").get<std::string>()), seed, opts);
    } else if (type == "custom") {
      recipe = RecipeFromJson(s);
    } else {
      throw UsageError("unknown recipe type '" + type + "'");
    }
  } catch (const json::exception &e) {
    throw UsageError("recipe " + r.id + ": " + e.what());
  }
  recipe.seed = seed;
  recipe.recipe_id = r.id;
  return recipe;
}

AugmentResult CmdAugment(const DatasetManifest &manifest, const CampaignConfig &campaign,
                         uint64_t master_seed, ExternalCodecClient *codecs) {
  manifest.Check();
  campaign.Check();
  std::filesystem::create_directories(campaign.output_root);

  struct Outcome {
    std::vector<ManifestEntry> produced;
    size_t attempted = 0;
    size_t failed = 0;
    bool tool_failure = false;
  };
  const size_t n = manifest.entries.size();
  std::vector<Outcome> outcomes(n);
  IndexedLog log(n);

  double total_weight = 0.0;
  for (const CampaignRecipe &r : campaign.recipes) total_weight += r.weight;

  ParallelFor(n, campaign.workers, [&](size_t i) {
    const ManifestEntry &src = manifest.entries[i];
    Outcome &out = outcomes[i];
    const std::filesystem::path src_path = manifest.Resolve(src);

    std::vector<const CampaignRecipe *> chosen;
    if (campaign.mode == "all") {
      for (const CampaignRecipe &r : campaign.recipes) chosen.push_back(&r);
    } else if (!campaign.recipes.empty()) {
      Rng rng(DeriveSeed(master_seed, {src.utt_id, "campaign_choice"}));
      const double u = rng.Uniform01() * total_weight;
      double acc = 0.0;
      const CampaignRecipe *pick = nullptr;
      for (const CampaignRecipe &r : campaign.recipes) {
        acc += r.weight;
        if (r.weight > 0.0 && acc > u) {
          pick = &r;
          break;
        }
      }
      if (pick == nullptr)
        for (const CampaignRecipe &r : campaign.recipes)
          if (r.weight > 0.0) pick = &r;
      chosen.push_back(pick);
    }

    std::optional<AudioBuffer> audio;
    std::string read_error;
    try {
      audio = ReadWav(src_path);
      audio->source_id = src.utt_id;
    } catch (const DataError &e) {
      read_error = e.what();
    }

    if (campaign.include_original) {
      ++out.attempted;
      if (audio) {
        ManifestEntry e = src;
        e.wav_path = src.utt_id + ".wav";
        std::filesystem::copy_file(src_path, campaign.output_root / e.wav_path,
                                   std::filesystem::copy_options::overwrite_existing);
        out.produced.push_back(std::move(e));
      } else {
        ++out.failed;
        log.messages[i].push_back(src.utt_id + ": " + read_error);
      }
    }

    for (const CampaignRecipe *r : chosen) {
      ++out.attempted;
      const std::string utt = src.utt_id + "__" + r->id;
      if (!audio) {
        ++out.failed;
        log.messages[i].push_back(utt + ": " + read_error);
        continue;
      }
      try {
        const AugmentationRecipe recipe =
            InstantiateRecipe(*r, src.utt_id, master_seed, audio->sample_rate,
                              campaign.la_options);
        const AudioBuffer y = ApplyRecipe(*audio, recipe, codecs);
        ManifestEntry e = src;
        e.utt_id = utt;
        e.wav_path = utt + ".wav";
        e.source_utt = src.utt_id;
        e.recipe_id = r->id;
        e.recipe = RecipeToJson(recipe);
        WriteWav(y, campaign.output_root / e.wav_path);
        out.produced.push_back(std::move(e));
      } catch (const ToolError &ex) {
        ++out.failed;
        out.tool_failure = true;
        log.messages[i].push_back(utt + ": " + ex.what());
      } catch (const DataError &ex) {
        ++out.failed;
        log.messages[i].push_back(utt + ": " + ex.what());
      } catch (const std::invalid_argument &ex) {
        ++out.failed;
        log.messages[i].push_back(utt + ": " + ex.what());
      }
    }
  });
  log.Flush();

  AugmentResult result;
  result.manifest.root = ".";
  result.manifest.seed = master_seed;
  result.manifest.base_dir = campaign.output_root;
  bool tool_failure = false;
  for (Outcome &o : outcomes) {
    result.attempted += o.attempted;
    result.failed += o.failed;
    tool_failure = tool_failure || o.tool_failure;
    for (ManifestEntry &e : o.produced) result.manifest.entries.push_back(std::move(e));
  }
  if (result.failed > 0)
    LogWarning("augmentation: " + std::to_string(result.failed) + " of " +
               std::to_string(result.attempted) + " outputs failed and were excluded");
  if (result.attempted > 0 &&
      static_cast<double>(result.failed) >
          campaign.max_failure_fraction * static_cast<double>(result.attempted)) {
    const std::string msg = "augmentation aborted: " + std::to_string(result.failed) + " of " +
                            std::to_string(result.attempted) +
                            " outputs failed (limit " +
                            FormatKbps(100.0 * campaign.max_failure_fraction) + "%)";
    if (tool_failure) throw ToolError(msg);
    throw DataError(msg);
  }
  result.manifest.Check();
  result.manifest.Save(campaign.output_root / "manifest.json");
  return result;
}

// ---------------------------------------------------------------------------
// Feature extraction

FeatureMatrix ExtractFeatures(const AudioBuffer &buf, const ExtractOptions &opts,
                              const std::string &utt_id, bool apply_masks) {
  FeatureMatrix m;
  if (opts.kind == FeatureKind::kLfccStack) {
    m = Lfcc(buf, opts.lfcc, DeriveSeed(opts.seed, {"frames", utt_id}));
  } else {
    AudioBuffer b = buf;
    if (opts.logspec_duration > 0.0)
      b = FixDuration(buf, opts.logspec_duration, opts.duration_mode,
                      DeriveSeed(opts.seed, {"duration", utt_id}));
    m = LogSpec(b, opts.stft, opts.kind == FeatureKind::kLogSpecDoubleSided);
  }
  m = Normalize(m, opts.norm);
  if (apply_masks && opts.policy.method != MaskMethod::kNone)
    m = ApplyMasks(m, opts.policy, DeriveSeed(opts.seed, {"mask", utt_id}));
  return m;
}

json FeatureIndex::ToJson() const {
  json arr = json::array();
  for (const FeatureIndexEntry &e : entries) {
    json j = {{"utt_id", e.utt_id}, {"path", e.path}, {"key", TrialKeyName(e.key)},
              {"split", SplitName(e.split)}, {"masked", e.masked}};
    if (e.condition) j["condition"] = *e.condition;
    arr.push_back(std::move(j));
  }
  return {{"feature", FeatureKindName(kind)}, {"norm", norm}, {"mask_policy", mask_policy},
          {"seed", seed}, {"entries", arr}};
}

FeatureIndex FeatureIndex::Load(const std::filesystem::path &path) {
  const json j = ReadJson(path);
  FeatureIndex idx;
  idx.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  try {
    idx.kind = ParseFeatureKind(j.at("feature").get<std::string>());
    idx.norm = j.value("norm", std::string("none"));
    idx.mask_policy = j.value("mask_policy", std::string("None"));
    idx.seed = j.value("seed", uint64_t{0});
    for (const json &e : j.at("entries")) {
      FeatureIndexEntry entry;
      entry.utt_id = e.at("utt_id").get<std::string>();
      entry.path = e.at("path").get<std::string>();
      entry.key = ParseTrialKey(e.at("key").get<std::string>());
      entry.split = ParseSplit(e.at("split").get<std::string>());
      entry.masked = e.at("masked").get<bool>();
      entry.condition = OptString(e, "condition");
      idx.entries.push_back(std::move(entry));
    }
  } catch (const json::exception &e) {
    throw DataError(path.string() + ": malformed feature index: " + e.what());
  } catch (const UsageError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return idx;
}

void FeatureIndex::Save(const std::filesystem::path &path) const { WriteJson(ToJson(), path); }

FeatureIndex CmdExtract(const DatasetManifest &manifest, const ExtractOptions &opts,
                        const std::filesystem::path &out_dir) {
  manifest.Check();
  std::filesystem::create_directories(out_dir);

  const bool lfcc = opts.kind == FeatureKind::kLfccStack;
  const bool masking = opts.policy.method != MaskMethod::kNone &&
                       (opts.policy.num_freq_masks > 0 || opts.policy.num_time_masks > 0);
  if (masking && !opts.policy.feature.empty()) {
    const bool policy_lfcc = opts.policy.feature == "LFCC";
    if (policy_lfcc != lfcc)
      LogWarning("mask policy " + opts.policy.name + " was designed for " +
                 opts.policy.feature + " features, extracting " + FeatureKindName(opts.kind));
  }

  const size_t n = manifest.entries.size();
  std::vector<std::optional<FeatureIndexEntry>> results(n);
  IndexedLog log(n);
  ParallelFor(n, opts.workers, [&](size_t i) {
    const ManifestEntry &e = manifest.entries[i];
    const bool train = e.split == Split::kTrain;
    try {
      AudioBuffer buf = ReadWav(manifest.Resolve(e));
      buf.source_id = e.utt_id;
      const FeatureMatrix m = ExtractFeatures(buf, opts, e.utt_id, train && masking);
      FeatureIndexEntry out;
      out.utt_id = e.utt_id;
      out.path = e.utt_id + ".feat";
      out.key = e.key;
      out.split = e.split;
      out.condition = e.condition;
      out.masked = train && masking;
      WriteFeatureMatrix(m, out_dir / out.path);
      results[i] = std::move(out);
    } catch (const DataError &ex) {
      log.messages[i].push_back(e.utt_id + ": skipped, " + ex.what());
    } catch (const std::invalid_argument &ex) {
      log.messages[i].push_back(e.utt_id + ": skipped, " + ex.what());
    }
  });
  log.Flush();

  FeatureIndex idx;
  idx.kind = opts.kind;
  idx.norm = NormalizationName(opts.norm);
  idx.mask_policy = opts.policy.name.empty() ? "None" : opts.policy.name;
  idx.seed = opts.seed;
  idx.base_dir = out_dir;
  for (auto &r : results)
    if (r) idx.entries.push_back(std::move(*r));
  if (idx.entries.size() < n)
    LogWarning("extract: " + std::to_string(n - idx.entries.size()) + " of " +
               std::to_string(n) + " utterances skipped");
  idx.Save(out_dir / "index.json");
  return idx;
}

// ---------------------------------------------------------------------------
// Training and scoring

namespace {

Matrix PoolClassFrames(const FeatureIndex &index, TrialKey key, size_t *num_files) {
  std::vector<Matrix> parts;
  size_t rows = 0, dim = 0;
  for (const FeatureIndexEntry &e : index.entries) {
    if (e.split != Split::kTrain || e.key != key) continue;
    Matrix f = PoolFeatures(ReadFeatureMatrix(index.Resolve(e)));
    if (dim == 0) dim = f.NumCols();
    if (f.NumCols() != dim)
      throw DataError("feature " + e.utt_id + " has dimension " +
                      std::to_string(f.NumCols()) + ", expected " + std::to_string(dim));
    rows += f.NumRows();
    parts.push_back(std::move(f));
  }
  *num_files = parts.size();
  Matrix out(rows, dim);
  size_t r = 0;
  for (const Matrix &p : parts) {
    std::copy(p.Data().begin(), p.Data().end(), out.Data().begin() + r * dim);
    r += p.NumRows();
  }
  return out;
}

json TrainSummary(const GmmTrainResult &r, size_t files, size_t frames) {
  return {{"files", files},
          {"frames", frames},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"reseeded_components", r.reseeded_components},
          {"log_likelihood", r.log_likelihood}};
}

}  // namespace

void CmdTrainGmm(const FeatureIndex &index, const TrainGmmOptions &opts,
                 const std::filesystem::path &out_dir) {
  size_t nb = 0, ns = 0;
  const Matrix bona = PoolClassFrames(index, TrialKey::kBonafide, &nb);
  const Matrix spoof = PoolClassFrames(index, TrialKey::kSpoof, &ns);
  if (nb == 0 || ns == 0)
    throw DataError("train split needs both bonafide and spoof features (" +
                    std::to_string(nb) + " bonafide, " + std::to_string(ns) + " spoof files)");
  if (bona.NumCols() != spoof.NumCols())
    throw DataError("bonafide and spoof features have different dimensions");
  for (const Matrix *m : {&bona, &spoof})
    if (m->NumRows() < static_cast<size_t>(opts.gmm.n_components))
      throw UsageError("only " + std::to_string(m->NumRows()) + " frames for " +
                       std::to_string(opts.gmm.n_components) + " GMM components");

  const GmmTrainResult rb = GmmTrain(bona, opts.gmm, DeriveSeed(opts.seed, {"gmm", "bonafide"}));
  const GmmTrainResult rs = GmmTrain(spoof, opts.gmm, DeriveSeed(opts.seed, {"gmm", "spoof"}));

  std::filesystem::create_directories(out_dir);
  WriteGmm(rb.model, out_dir / "bonafide.gmm");
  WriteGmm(rs.model, out_dir / "spoof.gmm");
  const json meta = {
      {"format", "GMMD"},
      {"version", 1},
      {"config",
       {{"n_components", opts.gmm.n_components},
        {"max_iters", opts.gmm.max_iters},
        {"tol", opts.gmm.tol},
        {"variance_floor", opts.gmm.variance_floor},
        {"kmeans_iters", opts.gmm.kmeans_iters}}},
      {"seed", opts.seed},
      {"feature", FeatureKindName(index.kind)},
      {"dim", bona.NumCols()},
      {"feature_index_hash", HexU64(Fnv1a64(index.ToJson().dump()))},
      {"bonafide", TrainSummary(rb, nb, bona.NumRows())},
      {"spoof", TrainSummary(rs, ns, spoof.NumRows())},
  };
  WriteJson(meta, out_dir / "model.json");
}

std::vector<ScoreRecord> CmdScore(const std::filesystem::path &model_dir,
                                  const FeatureIndex &index, std::optional<Split> split,
                                  const std::filesystem::path &out_path, int workers) {
  const GmmModel bona = ReadGmm(model_dir / "bonafide.gmm");
  const GmmModel spoof = ReadGmm(model_dir / "spoof.gmm");
  if (bona.Dim() != spoof.Dim())
    throw DataError("bonafide and spoof models have different dimensions");
  std::vector<const FeatureIndexEntry *> todo;
  for (const FeatureIndexEntry &e : index.entries)
    if (!split || e.split == *split) todo.push_back(&e);
  std::vector<ScoreRecord> scores(todo.size());
  ParallelFor(todo.size(), workers, [&](size_t i) {
    const FeatureMatrix m = ReadFeatureMatrix(index.Resolve(*todo[i]));
    scores[i] = {todo[i]->utt_id, GmmLlrScore(bona, spoof, m)};
  });
  WriteScores(scores, out_path);
  return scores;
}

// ---------------------------------------------------------------------------
// Evaluation and fusion

std::vector<ConditionRow> CmdEvaluate(const std::filesystem::path &scores_path,
                                      const std::filesystem::path &protocol_path,
                                      const std::filesystem::path &report_path,
                                      const EvaluateOptions &opts) {
  if (!opts.audit_features.empty()) {
    const FeatureIndex idx = FeatureIndex::Load(opts.audit_features);
    size_t bad = 0;
    std::string first;
    for (const FeatureIndexEntry &e : idx.entries)
      if (e.masked && e.split != Split::kTrain && bad++ == 0) first = e.utt_id;
    if (bad > 0)
      throw DataError(std::to_string(bad) + " masked features outside the train split (first: " +
                      first + ")");
  }
  const std::vector<ScoreRecord> scores = ReadScores(scores_path);
  const std::vector<TrialRecord> trials = ReadProtocol(protocol_path);
  const std::vector<ConditionRow> rows = ConditionReport(scores, trials, opts.costs);
  if (rows.back().eer_pct && *rows.back().eer_pct > 50.0)
    LogWarning("pooled EER above 50%: check score polarity (higher must mean bonafide)");

  std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + report_path.string());
  out << FormatConditionCsv(rows);

  if (!opts.det_out.empty()) {
    std::vector<double> b, s;
    SplitScores(scores, trials, &b, &s);
    std::ofstream det(opts.det_out, std::ios::binary | std::ios::trunc);
    if (!det) throw DataError("cannot write " + opts.det_out.string());
    det << "threshold,p_miss,p_fa\n";
    char buf[96];
    for (const OperatingPoint &p : DetCurve(b, s)) {
      if (std::isfinite(p.threshold))
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", p.threshold, p.p_miss, p.p_fa);
      else
        std::snprintf(buf, sizeof(buf), "inf,%.6f,%.6f\n", p.p_miss, p.p_fa);
      det << buf;
    }
  }
  return rows;
}

std::vector<double> CmdFuse(const std::vector<std::filesystem::path> &score_paths,
                            const FuseOptions &opts, const std::filesystem::path &out_path,
                            const std::filesystem::path &weights_path) {
  if (score_paths.size() < 2) throw UsageError("fusion needs at least two score files");
  std::vector<std::vector<ScoreRecord>> systems;
  for (const auto &p : score_paths) systems.push_back(ReadScores(p));

  std::vector<double> weights;
  std::vector<ScoreRecord> fused;
  json record = {{"method", opts.method}};
  if (opts.method == "mean") {
    fused = FuseMean(systems);
    weights.assign(systems.size(), 1.0 / static_cast<double>(systems.size()));
  } else if (opts.method == "weighted_grid") {
    if (opts.dev_protocol.empty())
      throw UsageError("weighted_grid fusion needs a development protocol");
    const WeightedFusionResult r = FuseWeightedGrid(systems, ReadProtocol(opts.dev_protocol),
                                                    opts.grid_step, opts.objective, opts.costs);
    fused = r.fused;
    weights = r.weights;
    record["objective"] = FusionObjectiveName(opts.objective);
    record["grid_step"] = opts.grid_step;
    record["dev_objective_value"] = r.objective;
  } else {
    throw UsageError("unknown fusion method '" + opts.method + "' (mean or weighted_grid)");
  }
  json systems_json = json::array();
  for (const auto &p : score_paths) systems_json.push_back(p.filename().string());
  record["systems"] = systems_json;
  record["weights"] = weights;
  WriteScores(fused, out_path);
  if (!weights_path.empty()) WriteJson(record, weights_path);
  return weights;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

using BitrateKey = std::pair<std::string, double>;

std::set<BitrateKey> CodecBitrates(const DatasetManifest &m, Split split) {
  std::set<BitrateKey> out;
  for (const ManifestEntry &e : m.entries) {
    if (e.split != split || !e.recipe || !e.recipe->contains("steps")) continue;
    for (const json &s : e.recipe->at("steps"))
      if (s.value("type", std::string()) == "codec" && s.contains("bitrate_kbps"))
        out.insert({s.value("codec", std::string()), s.at("bitrate_kbps").get<double>()});
  }
  return out;
}

}  // namespace

ValidationReport ValidateManifest(const DatasetManifest &manifest,
                                  const std::filesystem::path &protocol_out) {
  manifest.Check();
  ValidationReport report;
  report.num_entries = manifest.entries.size();
  std::vector<std::string> errors;
  for (const ManifestEntry &e : manifest.entries) {
    try {
      (void)ReadWav(manifest.Resolve(e));
    } catch (const DataError &ex) {
      errors.push_back(e.utt_id + ": " + ex.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " manifest entries are unreadable:";
    for (size_t i = 0; i < errors.size() && i < 5; ++i) msg += "\n  " + errors[i];
    throw DataError(msg);
  }

  const std::set<BitrateKey> train = CodecBitrates(manifest, Split::kTrain);
  const std::set<BitrateKey> dev = CodecBitrates(manifest, Split::kDev);
  if (!dev.empty() && std::includes(train.begin(), train.end(), dev.begin(), dev.end()))
    report.warnings.push_back(
        "every codec bitrate in the dev split also occurs in train; a dev set with unseen "
        "bitrates gives a better estimate of generalization");
  for (const std::string &w : report.warnings) LogWarning(w);

  if (!protocol_out.empty()) WriteProtocol(manifest.Trials(), protocol_out);
  return report;
}

}  // namespace antispoof
