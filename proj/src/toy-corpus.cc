// antispoof/src/toy-corpus.cc

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


#include "antispoof/toy-corpus.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "antispoof/channel-sim.h"
#include "antispoof/common.h"

namespace antispoof {

AudioBuffer MakeToyUtterance(TrialKey key, const std::string &utt_id, uint64_t seed,
                             int sample_rate, double seconds) {
  if (sample_rate <= 0 || !(seconds > 0.0))
    throw std::invalid_argument("toy utterance needs a positive rate and duration");
  const bool spoof = key == TrialKey::kSpoof;
  Rng rng(DeriveSeed(seed, {"toy", utt_id, TrialKeyName(key)}));
  const size_t n = static_cast<size_t>(std::llround(seconds * sample_rate));
  const double two_pi = 2.0 * std::numbers::pi;
  const double f0 = rng.Uniform(100.0, 180.0);
  const double env_rate = rng.Uniform(2.0, 5.0);
  const double env_phase = rng.Uniform(0.0, two_pi);
  const double top = std::min(7500.0, 0.45 * sample_rate);

  std::vector<double> source(n, 0.0);
  for (int k = 1; k * f0 < top; ++k) {
    const double amp = (1.0 / k) * rng.Uniform(0.7, 1.3);
    const double phase = rng.Uniform(0.0, two_pi);
    const double w = two_pi * k * f0 / sample_rate;
    for (size_t i = 0; i < n; ++i) source[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
  double power = 0.0;
  for (size_t i = 0; i < n; ++i) {
    source[i] *= 0.6 + 0.4 * std::sin(two_pi * env_rate * static_cast<double>(i) / sample_rate +
                                      env_phase);
    power += source[i] * source[i];
  }
  const double src_rms = std::sqrt(power / static_cast<double>(n));
  const double snr_db = spoof ? 12.0 : 30.0;
  const double noise_rms = src_rms * std::pow(10.0, -snr_db / 20.0);

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.source_id = utt_id;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.samples[i] = source[i] + noise_rms * rng.Gaussian();

  if (spoof && sample_rate >= 16000) {
    AudioBuffer hf;
    hf.sample_rate = sample_rate;
    hf.samples.resize(n);
    for (double &v : hf.samples) v = rng.Gaussian();
    hf = Bandlimit(hf, 4500.0, top);
    const double hf_rms = std::max(Rms(hf.samples), 1e-12);
    const double gain = 0.5 * src_rms / hf_rms;
    for (size_t i = 0; i < n; ++i) out.samples[i] += gain * hf.samples[i];
  }

  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  const double scale = rng.Uniform(0.3, 0.7) / std::max(peak, 1e-12);
  for (double &v : out.samples) v *= scale;
  return out;
}

DatasetManifest WriteToyCorpus(const std::filesystem::path &dir, const ToyCorpusOptions &opts) {
  std::filesystem::create_directories(dir / "wav");
  DatasetManifest m;
  m.root = ".";
  m.seed = opts.seed;
  m.base_dir = dir;
  const struct {
    Split split;
    size_t count;
  } splits[] = {{Split::kTrain, opts.train_per_class},
                {Split::kDev, opts.dev_per_class},
                {Split::kEval, opts.eval_per_class}};
  for (const auto &s : splits)
    for (size_t i = 0; i < s.count; ++i)
      for (TrialKey key : {TrialKey::kBonafide, TrialKey::kSpoof}) {
        char id[96];
        std::snprintf(id, sizeof(id), "toy_%s_%s_%04zu", SplitName(s.split).c_str(),
                      key == TrialKey::kBonafide ? "bona" : "spoof", i);
        ManifestEntry e;
        e.utt_id = id;
        e.wav_path = "wav/" + e.utt_id + ".wav";
        e.key = key;
        e.split = s.split;
        e.speaker_id = "toy" + std::to_string(i % 4);
        if (key == TrialKey::kSpoof) e.attack_id = "T01";
        WriteWav(MakeToyUtterance(key, e.utt_id, opts.seed, opts.sample_rate, opts.seconds),
                 dir / e.wav_path);
        m.entries.push_back(std::move(e));
      }
  m.Save(dir / "manifest.json");
  return m;
}

}  // namespace antispoof
