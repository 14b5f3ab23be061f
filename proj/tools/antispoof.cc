// antispoof/tools/antispoof.cc

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

// Command-line front end.  Exit codes: 0 success, 1 usage error, 2 data
// error, 3 external-tool error.

#include <cstdio>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "antispoof/common.h"
#include "antispoof/config.h"
#include "antispoof/external-codec.h"
#include "antispoof/pipeline.h"

namespace {

using namespace antispoof;

struct GlobalOptions {
  std::string config_path;
  bool quiet = false;
  int workers = -1;
};

KeyValueConfig LoadConfig(const GlobalOptions &g) {
  if (g.config_path.empty()) return KeyValueConfig();
  return KeyValueConfig::Load(g.config_path);
}

int Workers(const GlobalOptions &g, const KeyValueConfig &cfg) {
  if (g.workers >= 0) return g.workers;
  return static_cast<int>(cfg.GetInt("workers", 0));
}

std::optional<Split> ParseSplitOption(const std::string &s) {
  if (s == "all") return std::nullopt;
  try {
    return ParseSplit(s);
  } catch (const DataError &e) {
    throw UsageError(e.what());
  }
}

DurationMode ParseDurationMode(const std::string &s) {
  if (s == "repeat_pad") return DurationMode::kRepeatPad;
  if (s == "random_slice") return DurationMode::kRandomSlice;
  throw UsageError("unknown duration mode '" + s + "' (repeat_pad or random_slice)");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"antispoof: spoofed-speech countermeasure data pipeline"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_flag("-q,--quiet", g.quiet, "suppress warnings");
  app.add_option("--workers", g.workers, "worker threads (0: all cores)");

  // augment
  auto *aug = app.add_subcommand("augment", "materialize an augmentation campaign");
  std::string aug_manifest, aug_campaign, aug_out;
  std::optional<uint64_t> aug_seed;
  aug->add_option("--manifest", aug_manifest, "input dataset manifest")->required();
  aug->add_option("--campaign", aug_campaign, "campaign JSON")->required();
  aug->add_option("--output-root", aug_out, "override the campaign output_root");
  aug->add_option("--seed", aug_seed, "master seed (default: manifest seed)");

  // extract
  auto *ext = app.add_subcommand("extract", "compute feature matrices");
  std::string ext_manifest, ext_out, ext_feature = "lfcc", ext_norm = "none",
                                     ext_policy = "None", ext_duration_mode = "repeat_pad";
  uint64_t ext_seed = 0;
  int ext_frames = 450;
  double ext_duration = 0.0;
  ext->add_option("--manifest", ext_manifest, "dataset manifest")->required();
  ext->add_option("--out", ext_out, "feature store directory")->required();
  ext->add_option("--feature", ext_feature, "lfcc, logspec_onesided or logspec_doublesided");
  ext->add_option("--norm", ext_norm, "none, min_max, mean or standard");
  ext->add_option("--mask-policy", ext_policy,
                  "policy name (None, SAv1, ...) or 'method,m_f,m_t,F,T'");
  ext->add_option("--seed", ext_seed, "masking and slicing seed");
  ext->add_option("--lfcc-frames", ext_frames, "LFCC frames per utterance (<= 0: natural)");
  ext->add_option("--logspec-duration", ext_duration,
                  "LogSpec: fix every utterance to this many seconds (0: natural)");
  ext->add_option("--duration-mode", ext_duration_mode, "repeat_pad or random_slice");

  // train-gmm
  auto *tr = app.add_subcommand("train-gmm", "train bonafide and spoof GMMs");
  std::string tr_features, tr_out;
  TrainGmmOptions tr_opts;
  std::optional<int> tr_components, tr_iters;
  std::optional<double> tr_tol, tr_floor;
  tr->add_option("--features", tr_features, "feature index.json")->required();
  tr->add_option("--out", tr_out, "model directory")->required();
  tr->add_option("--components", tr_components, "mixture components (default 64)");
  tr->add_option("--max-iters", tr_iters, "EM iterations (default 100)");
  tr->add_option("--tol", tr_tol, "relative log-likelihood tolerance (default 1e-5)");
  tr->add_option("--variance-floor", tr_floor, "variance floor (default 1e-4)");
  tr->add_option("--seed", tr_opts.seed, "training seed");

  // score
  auto *sc = app.add_subcommand("score", "score features with a GMM pair");
  std::string sc_models, sc_features, sc_out, sc_split = "eval";
  sc->add_option("--models", sc_models, "model directory")->required();
  sc->add_option("--features", sc_features, "feature index.json")->required();
  sc->add_option("--out", sc_out, "score file")->required();
  sc->add_option("--split", sc_split, "train, dev, eval or all")
      ->check(CLI::IsMember({"train", "dev", "eval", "all"}));

  // evaluate
  auto *ev = app.add_subcommand("evaluate", "EER / min t-DCF report");
  std::string ev_scores, ev_protocol, ev_report, ev_det, ev_audit;
  ev->add_option("--scores", ev_scores, "score file")->required();
  ev->add_option("--protocol", ev_protocol, "protocol file")->required();
  ev->add_option("--report", ev_report, "CSV report path")->required();
  ev->add_option("--det-out", ev_det, "write DET operating points (CSV)");
  ev->add_option("--audit-features", ev_audit,
                 "feature index.json whose masking flags are audited");

  // fuse
  auto *fu = app.add_subcommand("fuse", "score-level fusion");
  std::vector<std::string> fu_scores;
  std::string fu_out, fu_weights, fu_method = "mean", fu_protocol, fu_objective = "eer";
  double fu_step = 0.1;
  fu->add_option("--scores", fu_scores, "score files")->required()->expected(2, 64);
  fu->add_option("--out", fu_out, "fused score file")->required();
  fu->add_option("--weights-out", fu_weights, "weights JSON");
  fu->add_option("--method", fu_method, "mean or weighted_grid")
      ->check(CLI::IsMember({"mean", "weighted_grid"}));
  fu->add_option("--protocol", fu_protocol, "development protocol (weighted_grid)");
  fu->add_option("--objective", fu_objective, "eer or min_tdcf (weighted_grid)")
      ->check(CLI::IsMember({"eer", "min_tdcf", "tdcf"}));
  fu->add_option("--grid-step", fu_step, "weight increment (weighted_grid)");

  // validate-manifest
  auto *va = app.add_subcommand("validate-manifest", "check a dataset manifest");
  std::string va_manifest, va_protocol;
  va->add_option("--manifest", va_manifest, "dataset manifest")->required();
  va->add_option("--protocol-out", va_protocol, "write the manifest as a protocol file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    SetWarningsEnabled(!g.quiet);
    const KeyValueConfig cfg = LoadConfig(g);
    const int workers = Workers(g, cfg);

    if (*aug) {
      const DatasetManifest manifest = DatasetManifest::Load(aug_manifest);
      CampaignConfig campaign = CampaignConfig::Load(aug_campaign);
      if (!aug_out.empty()) campaign.output_root = aug_out;
      if (g.workers >= 0 || cfg.Has("workers")) campaign.workers = workers;
      campaign.la_options = LaOptionsFromConfig(cfg);
      ExternalCodecConfig codec_cfg = ExternalCodecConfig::FromConfig(cfg);
      if (codec_cfg.provenance_log.empty())
        codec_cfg.provenance_log = campaign.output_root / "provenance.jsonl";
      std::filesystem::create_directories(campaign.output_root);
      ExternalCodecClient codecs(codec_cfg);
      const AugmentResult r =
          CmdAugment(manifest, campaign, aug_seed.value_or(manifest.seed), &codecs);
      std::printf("augment: %zu entries written, %zu of %zu outputs failed\n",
                  r.manifest.entries.size(), r.failed, r.attempted);
    } else if (*ext) {
      ExtractOptions o;
      o.kind = ParseFeatureKind(ext_feature);
      o.norm = ParseNormalization(ext_norm);
      o.policy = ParseMaskPolicy(ext_policy);
      o.seed = ext_seed;
      o.lfcc.target_frames = ext_frames;
      o.logspec_duration = ext_duration;
      o.duration_mode = ParseDurationMode(ext_duration_mode);
      o.workers = workers;
      const FeatureIndex idx = CmdExtract(DatasetManifest::Load(ext_manifest), o, ext_out);
      std::printf("extract: %zu feature files\n", idx.entries.size());
    } else if (*tr) {
      GmmConfig &gc = tr_opts.gmm;
      gc.n_components = tr_components.value_or(static_cast<int>(cfg.GetInt("gmm.n_components", 64)));
      gc.max_iters = tr_iters.value_or(static_cast<int>(cfg.GetInt("gmm.max_iters", 100)));
      gc.tol = tr_tol.value_or(cfg.GetDouble("gmm.tol", 1e-5));
      gc.variance_floor = tr_floor.value_or(cfg.GetDouble("gmm.variance_floor", 1e-4));
      CmdTrainGmm(FeatureIndex::Load(tr_features), tr_opts, tr_out);
      std::printf("train-gmm: models written to %s\n", tr_out.c_str());
    } else if (*sc) {
      const auto scores = CmdScore(sc_models, FeatureIndex::Load(sc_features),
                                   ParseSplitOption(sc_split), sc_out, workers);
      std::printf("score: %zu utterances\n", scores.size());
    } else if (*ev) {
      EvaluateOptions o;
      o.costs = TdcfCosts::FromConfig(cfg);
      o.det_out = ev_det;
      o.audit_features = ev_audit;
      const auto rows = CmdEvaluate(ev_scores, ev_protocol, ev_report, o);
      std::fputs(FormatConditionCsv(rows).c_str(), stdout);
    } else if (*fu) {
      FuseOptions o;
      o.method = fu_method;
      o.objective = ParseFusionObjective(fu_objective);
      o.grid_step = fu_step;
      o.dev_protocol = fu_protocol;
      o.costs = TdcfCosts::FromConfig(cfg);
      std::vector<std::filesystem::path> paths(fu_scores.begin(), fu_scores.end());
      const auto w = CmdFuse(paths, o, fu_out, fu_weights);
      std::printf("fuse: weights");
      for (double v : w) std::printf(" %.4f", v);
      std::printf("\n");
    } else if (*va) {
      const ValidationReport r = ValidateManifest(DatasetManifest::Load(va_manifest), va_protocol);
      std::printf("validate-manifest: %zu entries ok, %zu warnings\n", r.num_entries,
                  r.warnings.size());
    }
    return 0;
  } catch (const UsageError &e) {
    std::fprintf(stderr, "antispoof: usage error: %s\n", e.what());
    return 1;
  } catch (const DataError &e) {
    std::fprintf(stderr, "antispoof: data error: %s\n", e.what());
    return 2;
  } catch (const ToolError &e) {
    std::fprintf(stderr, "antispoof: external tool error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "antispoof: usage error: %s\n", e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error &e) {
    std::fprintf(stderr, "antispoof: data error: %s\n", e.what());
    return 2;
  }
}
