// antispoof/tools/make-toy-corpus.cc

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


// Writes a synthetic two-class corpus with its manifest and protocol.

#include <cstdio>

#include "CLI11.hpp"
#include "antispoof/common.h"
#include "antispoof/toy-corpus.h"

int main(int argc, char **argv) {
  using namespace antispoof;
  CLI::App app{"make-toy-corpus: synthetic bonafide/spoof corpus"};
  std::string out;
  ToyCorpusOptions o;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--train", o.train_per_class, "train utterances per class");
  app.add_option("--dev", o.dev_per_class, "dev utterances per class");
  app.add_option("--eval", o.eval_per_class, "eval utterances per class");
  app.add_option("--rate", o.sample_rate, "sample rate in Hz");
  app.add_option("--seconds", o.seconds, "utterance duration");
  app.add_option("--seed", o.seed, "corpus seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const DatasetManifest m = WriteToyCorpus(out, o);
    WriteProtocol(m.Trials(), std::filesystem::path(out) / "protocol.txt");
    WriteProtocol(m.Trials(Split::kEval), std::filesystem::path(out) / "protocol_eval.txt");
    if (o.dev_per_class > 0)
      WriteProtocol(m.Trials(Split::kDev), std::filesystem::path(out) / "protocol_dev.txt");
    std::printf("make-toy-corpus: %zu utterances in %s\n", m.entries.size(), out.c_str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "make-toy-corpus: %s\n", e.what());
    return 2;
  }
  return 0;
}
