// antispoof/include/antispoof/toy-corpus.h

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


// Synthetic two-class corpus for smoke tests and desk-scale experiments.
//
// Both classes are voiced harmonic sources (random f0 in 100-180 Hz,
// harmonics up to 7.5 kHz with 1/k roll-off, a slow amplitude envelope).
// Bonafide utterances add white noise 30 dB below the source.  Spoof
// utterances add white noise only 12 dB below the source plus a band of
// 4.5-7.5 kHz noise, a cue that telephone channels remove.

#ifndef ANTISPOOF_TOY_CORPUS_H_
#define ANTISPOOF_TOY_CORPUS_H_

#include <cstdint>
#include <filesystem>

#include "antispoof/audio-io.h"
#include "antispoof/metrics.h"
#include "antispoof/pipeline.h"

namespace antispoof {

struct ToyCorpusOptions {
  size_t train_per_class = 20;
  size_t dev_per_class = 0;
  size_t eval_per_class = 10;
  int sample_rate = 16000;
  double seconds = 1.0;
  uint64_t seed = 1;
};

/// One utterance, fully determined by (seed, utt_id, key).
AudioBuffer MakeToyUtterance(TrialKey key, const std::string &utt_id, uint64_t seed,
                             int sample_rate, double seconds);

/// Writes <dir>/wav/<utt>.wav for every utterance and <dir>/manifest.json
/// (utt ids toy_<split>_<key>_<n>).  Returns the manifest.
DatasetManifest WriteToyCorpus(const std::filesystem::path &dir, const ToyCorpusOptions &opts);

}  // namespace antispoof

#endif  // ANTISPOOF_TOY_CORPUS_H_
