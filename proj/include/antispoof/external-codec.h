// antispoof/include/antispoof/external-codec.h

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

// Subprocess client for codecs that are not implemented natively.
//
// Each format has three shell command templates.  Placeholders:
//   {tool_root}  tool directory with a trailing '/', or empty
//   {in} {out}   shell-quoted input / output paths
//   {bitrate}    bitrate in kbps (e.g. "16", "12.2")
//   {rate}       sample rate of the buffer being encoded
// Config keys (see KeyValueConfig):
//   tool_root                      (overridden by $ANTISPOOF_TOOL_ROOT)
//   codec.<format>.encode          WAV {in} -> compressed {out}
//   codec.<format>.decode          compressed {in} -> PCM WAV {out}
//   codec.<format>.ext             file extension of the compressed file
//   codec.<format>.version         command whose first output line is
//                                  recorded as the tool version
//   provenance_log                 JSON-lines log path (optional)
// Defaults drive ffmpeg for every format it can encode.

#ifndef ANTISPOOF_EXTERNAL_CODEC_H_
#define ANTISPOOF_EXTERNAL_CODEC_H_

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "antispoof/audio-io.h"
#include "antispoof/channel-sim.h"
#include "antispoof/config.h"

namespace antispoof {

struct CodecTemplate {
  std::string encode;
  std::string decode;
  std::string ext;
  std::string version;
};

struct ExternalCodecConfig {
  std::string tool_root;  // empty: rely on $PATH
  std::map<ExternalFormat, CodecTemplate> templates;
  std::filesystem::path temp_dir;        // empty: system temp directory
  std::filesystem::path provenance_log;  // empty: no log file

  /// ffmpeg-based templates; tool_root from $ANTISPOOF_TOOL_ROOT if set.
  static ExternalCodecConfig Defaults();
  /// Defaults() overlaid with the codec.* / tool_root / provenance_log keys.
  static ExternalCodecConfig FromConfig(const KeyValueConfig &cfg);
};

struct ProcessResult {
  int exit_status = -1;  // 127 when the shell could not run the command
  std::string output;    // stdout followed by stderr
  double duration_ms = 0.0;
};

/// Runs `command` through /bin/sh -c with stdin from /dev/null.
ProcessResult RunShellCommand(const std::string &command,
                              const std::filesystem::path &scratch_dir);

/// Single-quotes a path for the shell.
std::string ShellQuote(const std::string &s);

class ExternalCodecClient {
 public:
  explicit ExternalCodecClient(ExternalCodecConfig cfg);
  ~ExternalCodecClient();

  ExternalCodecClient(const ExternalCodecClient &) = delete;
  ExternalCodecClient &operator=(const ExternalCodecClient &) = delete;

  /// Runs the version command once per format and caches the result.
  /// Throws ToolError when the format has no template or the tool is missing.
  std::string Probe(ExternalFormat format);

  /// True when Probe() succeeds; never throws.
  bool Available(ExternalFormat format);

  /// Encodes at `bitrate_kbps` and decodes back.  The output keeps the input
  /// sample rate (decoded audio at another rate is resampled, with a
  /// warning) and is trimmed or zero-padded to the input length.  Throws
  /// ToolError when a command exits non-zero.
  AudioBuffer RoundTrip(const AudioBuffer &buf, ExternalFormat format,
                        std::optional<double> bitrate_kbps,
                        const std::string &recipe_id = "");

  const ExternalCodecConfig &Config() const { return cfg_; }

 private:
  std::string Expand(const std::string &tmpl, const std::string &in,
                     const std::string &out, const std::string &bitrate,
                     int rate) const;
  std::filesystem::path MakeScratchDir();
  void LogInvocation(const std::string &recipe_id, const std::string &utterance,
                     ExternalFormat format, const std::string &stage,
                     const std::string &command, const ProcessResult &res);

  ExternalCodecConfig cfg_;
  std::filesystem::path temp_root_;
  std::atomic<uint64_t> counter_{0};
  std::mutex mutex_;  // guards versions_ and the provenance log
  std::map<ExternalFormat, std::string> versions_;
};

}  // namespace antispoof

#endif  // ANTISPOOF_EXTERNAL_CODEC_H_
