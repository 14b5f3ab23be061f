// antispoof/src/external-codec.cc

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

#include "antispoof/external-codec.h"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "antispoof/common.h"
#include "json.hpp"

extern char **environ;

namespace antispoof {

namespace {

const char kFfmpegHead[] = "{tool_root}ffmpeg -nostdin -hide_banner -loglevel error -y -i {in} ";
const char kFfmpegDecode[] =
    "{tool_root}ffmpeg -nostdin -hide_banner -loglevel error -y -i {in} "
    "-map_metadata -1 -fflags +bitexact -flags:a +bitexact -ac 1 -c:a pcm_s16le {out}";
const char kFfmpegVersion[] = "{tool_root}ffmpeg -version";

CodecTemplate Ffmpeg(const std::string &encode_args, const std::string &ext) {
  return CodecTemplate{std::string(kFfmpegHead) + encode_args + " {out}", kFfmpegDecode,
                       ext, kFfmpegVersion};
}

std::string NormalizeToolRoot(std::string root) {
  if (!root.empty() && root.back() != '/') root.push_back('/');
  return root;
}

std::string BitrateString(std::optional<double> kbps) {
  if (!kbps) return "";
  std::ostringstream ss;
  ss << *kbps;
  return ss.str();
}

void ReplaceAll(std::string &s, const std::string &from, const std::string &to) {
  for (size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

std::string FirstLine(const std::string &text) {
  const size_t nl = text.find('\n');
  return Trim(nl == std::string::npos ? text : text.substr(0, nl));
}

}  // namespace

ExternalCodecConfig ExternalCodecConfig::Defaults() {
  ExternalCodecConfig cfg;
  if (const char *env = std::getenv("ANTISPOOF_TOOL_ROOT")) cfg.tool_root = env;
  auto &t = cfg.templates;
  t[ExternalFormat::kMp3] = Ffmpeg("-c:a libmp3lame -b:a {bitrate}k", "mp3");
  t[ExternalFormat::kM4aAac] = Ffmpeg("-c:a aac -b:a {bitrate}k", "m4a");
  t[ExternalFormat::kOggVorbis] = Ffmpeg("-c:a libvorbis -b:a {bitrate}k", "ogg");
  t[ExternalFormat::kOpus] = Ffmpeg("-c:a libopus -b:a {bitrate}k", "opus");
  t[ExternalFormat::kAmr] = Ffmpeg("-ar 8000 -c:a libopencore_amrnb -b:a {bitrate}k", "amr");
  t[ExternalFormat::kAmrWb] = Ffmpeg("-ar 16000 -c:a libvo_amrwbenc -b:a {bitrate}k", "amr");
  t[ExternalFormat::kG722] = Ffmpeg("-ar 16000 -c:a g722", "wav");
  t[ExternalFormat::kG726] = Ffmpeg("-ar 8000 -c:a g726 -b:a {bitrate}k", "wav");
  t[ExternalFormat::kFlac] = Ffmpeg("-c:a flac", "flac");
  return cfg;
}

ExternalCodecConfig ExternalCodecConfig::FromConfig(const KeyValueConfig &kv) {
  ExternalCodecConfig cfg = Defaults();
  if (!std::getenv("ANTISPOOF_TOOL_ROOT"))
    cfg.tool_root = kv.GetString("tool_root", cfg.tool_root);
  cfg.temp_dir = kv.GetString("temp_dir", "");
  cfg.provenance_log = kv.GetString("provenance_log", "");
  for (const std::string &key : kv.KeysWithPrefix("codec.")) {
    const size_t dot = key.rfind('.');
    if (dot <= 6) throw UsageError("malformed codec key: " + key);
    const ExternalFormat fmt = ParseExternalFormat(key.substr(6, dot - 6));
    const std::string field = key.substr(dot + 1);
    const std::string value = kv.GetString(key, "");
    CodecTemplate &tmpl = cfg.templates[fmt];
    if (field == "encode") tmpl.encode = value;
    else if (field == "decode") tmpl.decode = value;
    else if (field == "ext") tmpl.ext = value;
    else if (field == "version") tmpl.version = value;
    else throw UsageError("unknown codec field in key " + key);
  }
  return cfg;
}

std::string ShellQuote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

ProcessResult RunShellCommand(const std::string &command,
                              const std::filesystem::path &scratch_dir) {
  const std::filesystem::path log_path = scratch_dir / "process.log";
  const std::string log_str = log_path.string();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 1, log_str.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, 1, 2);

  std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
  char *argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};

  ProcessResult res;
  const auto start = std::chrono::steady_clock::now();
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    res.exit_status = 127;
    res.output = "posix_spawn failed";
    return res;
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      res.exit_status = 127;
      return res;
    }
  }
  res.duration_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start).count();
  if (WIFEXITED(status)) res.exit_status = WEXITSTATUS(status);
  else res.exit_status = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);

  std::ifstream in(log_path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  return res;
}

ExternalCodecClient::ExternalCodecClient(ExternalCodecConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.tool_root = NormalizeToolRoot(cfg_.tool_root);
  const std::filesystem::path base =
      cfg_.temp_dir.empty() ? std::filesystem::temp_directory_path() : cfg_.temp_dir;
  const uint64_t tag = Mix64(static_cast<uint64_t>(getpid()) ^
                             reinterpret_cast<uintptr_t>(this));
  temp_root_ = base / ("antispoof-codec-" + HexU64(tag));
  std::error_code ec;
  std::filesystem::create_directories(temp_root_, ec);
  if (ec) throw ToolError("cannot create codec scratch directory " + temp_root_.string());
}

ExternalCodecClient::~ExternalCodecClient() {
  std::error_code ec;
  std::filesystem::remove_all(temp_root_, ec);
}

std::string ExternalCodecClient::Expand(const std::string &tmpl, const std::string &in,
                                        const std::string &out,
                                        const std::string &bitrate, int rate) const {
  std::string s = tmpl;
  ReplaceAll(s, "{tool_root}", cfg_.tool_root);
  ReplaceAll(s, "{in}", ShellQuote(in));
  ReplaceAll(s, "{out}", ShellQuote(out));
  ReplaceAll(s, "{bitrate}", bitrate);
  ReplaceAll(s, "{rate}", std::to_string(rate));
  return s;
}

std::filesystem::path ExternalCodecClient::MakeScratchDir() {
  const uint64_t id = counter_.fetch_add(1);
  std::filesystem::path dir = temp_root_ / ("call" + std::to_string(id));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string ExternalCodecClient::Probe(ExternalFormat format) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = versions_.find(format);
    if (it != versions_.end()) return it->second;
  }
  auto t = cfg_.templates.find(format);
  if (t == cfg_.templates.end() || t->second.encode.empty() || t->second.decode.empty())
    throw ToolError("no external tool configured for format " + ExternalFormatName(format));
  std::string version = "unversioned";
  if (!t->second.version.empty()) {
    const std::filesystem::path dir = MakeScratchDir();
    const ProcessResult res = RunShellCommand(Expand(t->second.version, "", "", "", 0), dir);
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    if (res.exit_status != 0)
      throw ToolError("external tool for " + ExternalFormatName(format) +
                      " is not runnable (exit " + std::to_string(res.exit_status) +
                      "): " + FirstLine(res.output));
    version = FirstLine(res.output);
  }
  std::lock_guard<std::mutex> lock(mutex_);
  versions_[format] = version;
  return version;
}

bool ExternalCodecClient::Available(ExternalFormat format) {
  try {
    Probe(format);
    return true;
  } catch (const ToolError &) {
    return false;
  }
}

void ExternalCodecClient::LogInvocation(const std::string &recipe_id,
                                        const std::string &utterance,
                                        ExternalFormat format, const std::string &stage,
                                        const std::string &command,
                                        const ProcessResult &res) {
  if (cfg_.provenance_log.empty()) return;
  nlohmann::json j = {
      {"recipe_id", recipe_id},
      {"utterance", utterance},
      {"format", ExternalFormatName(format)},
      {"stage", stage},
      {"tool_version", versions_.count(format) ? versions_.at(format) : ""},
      {"command", command},
      {"exit_status", res.exit_status},
      {"duration_ms", res.duration_ms},
      {"stderr", res.output},
  };
  std::ofstream out(cfg_.provenance_log, std::ios::app);
  out << j.dump() << '\n';
}

AudioBuffer ExternalCodecClient::RoundTrip(const AudioBuffer &buf, ExternalFormat format,
                                           std::optional<double> bitrate_kbps,
                                           const std::string &recipe_id) {
  Probe(format);
  const CodecTemplate &tmpl = cfg_.templates.at(format);
  const std::filesystem::path dir = MakeScratchDir();
  struct Cleanup {
    std::filesystem::path dir;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  } cleanup{dir};

  const std::string in_path = (dir / "input.wav").string();
  const std::string enc_path = (dir / ("encoded." + (tmpl.ext.empty() ? "bin" : tmpl.ext))).string();
  const std::string dec_path = (dir / "decoded.wav").string();
  WriteWav(buf, in_path);
  const std::string bitrate = BitrateString(bitrate_kbps);

  const std::pair<std::string, std::string> stages[] = {
      {"encode", Expand(tmpl.encode, in_path, enc_path, bitrate, buf.sample_rate)},
      {"decode", Expand(tmpl.decode, enc_path, dec_path, bitrate, buf.sample_rate)},
  };
  for (const auto &[stage, command] : stages) {
    const ProcessResult res = RunShellCommand(command, dir);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      LogInvocation(recipe_id, buf.source_id, format, stage, command, res);
    }
    if (res.exit_status != 0)
      throw ToolError(ExternalFormatName(format) + " " + stage + " failed for " +
                      (buf.source_id.empty() ? std::string("<buffer>") : buf.source_id) +
                      " (exit " + std::to_string(res.exit_status) + "): " +
                      FirstLine(res.output));
  }

  AudioBuffer out;
  try {
    out = ReadWav(dec_path);
  } catch (const DataError &e) {
    throw ToolError(ExternalFormatName(format) + " decoder produced unreadable audio: " +
                    e.what());
  }
  if (out.sample_rate != buf.sample_rate) {
    LogWarning(ExternalFormatName(format) + " decoded at " + std::to_string(out.sample_rate) +
               " Hz, resampling to " + std::to_string(buf.sample_rate) + " Hz");
    out = Resample(out, buf.sample_rate);
  }
  out.samples.resize(buf.size(), 0.0);
  out.source_id = buf.source_id;
  return out;
}

}  // namespace antispoof
