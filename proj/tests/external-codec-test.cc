// antispoof/tests/external-codec-test.cc

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

#include <cstdlib>
#include <fstream>
#include <thread>

#include "antispoof/channel-sim.h"
#include "antispoof/common.h"
#include "antispoof/external-codec.h"
#include "doctest.h"
#include "json.hpp"
#include "test-util.h"

using namespace antispoof;
using namespace antispoof::testing;

namespace {

ExternalCodecConfig FakeConfig(const TempDir &dir) {
  ExternalCodecConfig cfg;
  cfg.temp_dir = dir.path();
  cfg.provenance_log = dir / "provenance.jsonl";
  cfg.templates[ExternalFormat::kFlac] = {"cp {in} {out}", "cp {in} {out}", "bin",
                                          "echo fakecodec 1.2.3"};
  cfg.templates[ExternalFormat::kOpus] = {"exit 3", "cp {in} {out}", "bin", ""};
  cfg.templates[ExternalFormat::kOggVorbis] = {"cp {in} {out}", "cp {in} {out}", "bin",
                                               "/nonexistent/tool -version"};
  cfg.templates[ExternalFormat::kAmr] = {"cp {in} {out}", "echo garbage > {out}", "bin", ""};
  cfg.templates[ExternalFormat::kMp3] = {
      "echo rate={rate} kbps={bitrate} >&2; cp {in} {out}", "cp {in} {out}", "mp3", ""};
  return cfg;
}

std::vector<nlohmann::json> ReadLog(const std::filesystem::path &p) {
  std::vector<nlohmann::json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

AudioBuffer Quantized(AudioBuffer b) {
  for (double &s : b.samples) s = QuantizeSample(s) / 32768.0;
  return b;
}

}  // namespace

TEST_CASE("shell quoting") {
  CHECK(ShellQuote("a b") == "'a b'");
  CHECK(ShellQuote("it's") == "'it'\\''s'");
}

TEST_CASE("subprocess exit status and output capture") {
  TempDir dir("proc");
  const ProcessResult ok = RunShellCommand("echo hello; echo oops >&2", dir.path());
  CHECK(ok.exit_status == 0);
  CHECK(ok.output == "hello\noops\n");
  CHECK(RunShellCommand("exit 5", dir.path()).exit_status == 5);
  CHECK(RunShellCommand("/nonexistent/binary", dir.path()).exit_status == 127);
  CHECK(RunShellCommand("cat", dir.path()).exit_status == 0);  // stdin is /dev/null
}

TEST_CASE("lossless fake codec round trip with provenance") {
  TempDir dir("codec");
  ExternalCodecClient client(FakeConfig(dir));
  CHECK(client.Probe(ExternalFormat::kFlac) == "fakecodec 1.2.3");
  AudioBuffer x = MakeNoise(1, 16000, 0.25);
  x.source_id = "utt1";
  const AudioBuffer y = client.RoundTrip(x, ExternalFormat::kFlac, std::nullopt, "rid");
  CHECK(y.samples == Quantized(x).samples);
  CHECK(y.sample_rate == 16000);
  CHECK(y.source_id == "utt1");

  const auto log = ReadLog(dir / "provenance.jsonl");
  REQUIRE(log.size() == 2);
  CHECK(log[0]["stage"] == "encode");
  CHECK(log[1]["stage"] == "decode");
  for (const auto &j : log) {
    CHECK(j["recipe_id"] == "rid");
    CHECK(j["utterance"] == "utt1");
    CHECK(j["format"] == "flac");
    CHECK(j["tool_version"] == "fakecodec 1.2.3");
    CHECK(j["exit_status"] == 0);
    CHECK(j.contains("command"));
    CHECK(j.contains("duration_ms"));
    CHECK(j.contains("stderr"));
  }
}

TEST_CASE("placeholders are expanded") {
  TempDir dir("codec");
  ExternalCodecClient client(FakeConfig(dir));
  client.RoundTrip(MakeNoise(1, 8000, 0.1), ExternalFormat::kMp3, 12.2, "r");
  const auto log = ReadLog(dir / "provenance.jsonl");
  REQUIRE(log.size() == 2);
  CHECK(log[0]["stderr"] == "rate=8000 kbps=12.2\n");
  const std::string cmd = log[0]["command"];
  CHECK(cmd.find("encoded.mp3'") != std::string::npos);
  CHECK(cmd.find('{') == std::string::npos);
}

TEST_CASE("tool failures are tool errors") {
  TempDir dir("codec");
  ExternalCodecClient client(FakeConfig(dir));
  const AudioBuffer x = MakeNoise(1, 16000, 0.1);
  CHECK_THROWS_AS(client.RoundTrip(x, ExternalFormat::kOpus, 32.0), ToolError);
  const auto log = ReadLog(dir / "provenance.jsonl");
  REQUIRE(log.size() == 1);
  CHECK(log[0]["exit_status"] == 3);

  CHECK_THROWS_AS(client.Probe(ExternalFormat::kOggVorbis), ToolError);
  CHECK_FALSE(client.Available(ExternalFormat::kOggVorbis));
  CHECK_THROWS_AS(client.RoundTrip(x, ExternalFormat::kOggVorbis, 64.0), ToolError);
  CHECK_THROWS_AS(client.Probe(ExternalFormat::kGsm), ToolError);
  CHECK_THROWS_AS(client.RoundTrip(x, ExternalFormat::kAmr, 12.2), ToolError);
  CHECK(client.Available(ExternalFormat::kFlac));
}

TEST_CASE("scratch space is removed") {
  TempDir dir("codec");
  {
    ExternalCodecClient client(FakeConfig(dir));
    client.RoundTrip(MakeNoise(1, 16000, 0.1), ExternalFormat::kFlac, std::nullopt);
    size_t entries = 0;
    for (const auto &root : std::filesystem::directory_iterator(dir.path()))
      if (root.is_directory())
        entries += std::distance(std::filesystem::directory_iterator(root.path()),
                                 std::filesystem::directory_iterator());
    CHECK(entries == 0);
  }
  for (const auto &e : std::filesystem::directory_iterator(dir.path()))
    CHECK_FALSE(e.is_directory());
}

TEST_CASE("concurrent round trips") {
  TempDir dir("codec");
  ExternalCodecClient client(FakeConfig(dir));
  std::vector<AudioBuffer> in, out(8);
  for (int i = 0; i < 8; ++i) in.push_back(MakeNoise(10 + i, 16000, 0.2));
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&, i] {
      out[i] = client.RoundTrip(in[i], ExternalFormat::kFlac, std::nullopt);
    });
  for (auto &t : threads) t.join();
  for (int i = 0; i < 8; ++i) CHECK(out[i].samples == Quantized(in[i]).samples);
  CHECK(ReadLog(dir / "provenance.jsonl").size() == 16);
}

TEST_CASE("configuration keys and tool root override") {
  const auto kv = KeyValueConfig::Parse(
      "tool_root = /opt/tools\n"
      "codec.silk.encode = silkenc {in} {out} {bitrate}\n"
      "codec.silk.decode = silkdec {in} {out}\n"
      "codec.silk.ext = bit\n"
      "codec.m4a.version = echo v\n"
      "provenance_log = /tmp/p.jsonl\n");
  unsetenv("ANTISPOOF_TOOL_ROOT");
  const ExternalCodecConfig cfg = ExternalCodecConfig::FromConfig(kv);
  CHECK(cfg.tool_root == "/opt/tools");
  CHECK(cfg.templates.at(ExternalFormat::kSilk).encode == "silkenc {in} {out} {bitrate}");
  CHECK(cfg.templates.at(ExternalFormat::kSilk).ext == "bit");
  CHECK(cfg.templates.at(ExternalFormat::kM4aAac).version == "echo v");
  CHECK(cfg.templates.at(ExternalFormat::kMp3).encode.find("libmp3lame") != std::string::npos);
  CHECK(cfg.provenance_log == "/tmp/p.jsonl");
  CHECK(cfg.templates.count(ExternalFormat::kGsm) == 0);

  setenv("ANTISPOOF_TOOL_ROOT", "/env/root", 1);
  CHECK(ExternalCodecConfig::FromConfig(kv).tool_root == "/env/root");
  CHECK(ExternalCodecConfig::Defaults().tool_root == "/env/root");
  unsetenv("ANTISPOOF_TOOL_ROOT");

  CHECK_THROWS_AS(ExternalCodecConfig::FromConfig(KeyValueConfig::Parse("codec.mp3.level = 3")),
                  UsageError);
  CHECK_THROWS_AS(ExternalCodecConfig::FromConfig(KeyValueConfig::Parse("codec.wma.encode = x")),
                  UsageError);
}

TEST_CASE("tool root prefixes the default commands") {
  TempDir dir("root");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.tool_root = (dir / "bin").string();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);
  // No ffmpeg under the fake root.
  CHECK_FALSE(client.Available(ExternalFormat::kMp3));
}

// The remaining cases drive the real encoders and are skipped without ffmpeg.

TEST_CASE("ffmpeg: FLAC is lossless") {
  if (!HaveFfmpeg()) { MESSAGE("ffmpeg not found, skipped"); return; }
  TempDir dir("ff");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);
  const AudioBuffer x = MakeSpeechLike(3, 16000, 1.0);
  CHECK(client.RoundTrip(x, ExternalFormat::kFlac, std::nullopt).samples ==
        Quantized(x).samples);
}

TEST_CASE("ffmpeg: MP3 levels, bandwidth and quality ordering") {
  if (!HaveFfmpeg()) { MESSAGE("ffmpeg not found, skipped"); return; }
  TempDir dir("ff");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);

  const AudioBuffer tone = MakeTone(1000, 16000, 2.0, 0.5);
  const AudioBuffer t160 = client.RoundTrip(tone, ExternalFormat::kMp3, 160.0);
  CHECK(t160.size() == tone.size());
  CHECK(std::abs(Db(ToneAmplitude(t160.samples, 1000, 16000) / 0.5)) <= 1.0);

  const AudioBuffer noise = MakeNoise(5, 16000, 2.0, 0.1);
  const AudioBuffer n16 = client.RoundTrip(noise, ExternalFormat::kMp3, 16.0);
  // Compare band energies over the same 0.5 s window in the middle.
  const std::span<const double> a(noise.samples.data() + 8000, 4096);
  const std::span<const double> b(n16.samples.data() + 8000, 4096);
  // LAME's 16 kbps low-pass sits near 6 kHz; 5-6 kHz is only partly cut.
  const double in_hi = NaiveBandEnergy(a, 16000, 6000, 8000, 4096);
  const double out_hi = NaiveBandEnergy(b, 16000, 6000, 8000, 4096);
  CHECK(10 * std::log10(in_hi / out_hi) >= 20.0);
  const double in_mid = NaiveBandEnergy(a, 16000, 5000, 8000, 4096);
  const double out_mid = NaiveBandEnergy(b, 16000, 5000, 8000, 4096);
  MESSAGE("mp3 16 kbps attenuation above 5 kHz: " << 10 * std::log10(in_mid / out_mid) << " dB");

  const AudioBuffer speech = MakeSpeechLike(4, 16000, 2.0);
  const double s160 = SnrDb(speech.samples, client.RoundTrip(speech, ExternalFormat::kMp3, 160.0).samples);
  const double s48 = SnrDb(speech.samples, client.RoundTrip(speech, ExternalFormat::kMp3, 48.0).samples);
  const double s16 = SnrDb(speech.samples, client.RoundTrip(speech, ExternalFormat::kMp3, 16.0).samples);
  CHECK(s160 >= s48);
  CHECK(s48 >= s16);

  const AudioBuffer r1 = client.RoundTrip(speech, ExternalFormat::kMp3, 48.0);
  const AudioBuffer r2 = client.RoundTrip(speech, ExternalFormat::kMp3, 48.0);
  CHECK(r1.samples == r2.samples);
}

TEST_CASE("ffmpeg: compression recipe outputs 16 kHz") {
  if (!HaveFfmpeg()) { MESSAGE("ffmpeg not found, skipped"); return; }
  TempDir dir("ff");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);
  const AudioBuffer x = MakeSpeechLike(6, 16000, 1.0);
  for (auto [fmt, br] : {std::pair{ExternalFormat::kMp3, 96.0}, {ExternalFormat::kM4aAac, 64.0}}) {
    const AudioBuffer y = ApplyRecipe(x, BuildDfRecipe(fmt, br), &client);
    CHECK(y.sample_rate == 16000);
    CHECK(y.size() == x.size());
    CHECK(SnrDb(x.samples, y.samples) > 5.0);
  }
}

TEST_CASE("ffmpeg: decoded rate mismatch is resampled") {
  if (!HaveFfmpeg()) { MESSAGE("ffmpeg not found, skipped"); return; }
  TempDir dir("ff");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);
  // The AMR-NB template encodes at 8 kHz, so a 16 kHz input decodes at 8 kHz.
  const AudioBuffer x = MakeTone(500, 16000, 1.0, 0.3);
  const AudioBuffer y = client.RoundTrip(x, ExternalFormat::kAmr, 12.2);
  CHECK(y.sample_rate == 16000);
  CHECK(y.size() == x.size());
}

TEST_CASE("ffmpeg: telephony codecs") {
  if (!HaveFfmpeg()) { MESSAGE("ffmpeg not found, skipped"); return; }
  TempDir dir("ff");
  ExternalCodecConfig cfg = ExternalCodecConfig::Defaults();
  cfg.temp_dir = dir.path();
  ExternalCodecClient client(cfg);
  const AudioBuffer nb = MakeSpeechLike(7, 8000, 1.0);
  const AudioBuffer wb = MakeSpeechLike(7, 16000, 1.0);
  CHECK(client.RoundTrip(nb, ExternalFormat::kG726, 32.0).size() == nb.size());
  CHECK(client.RoundTrip(wb, ExternalFormat::kG722, 64.0).size() == wb.size());
  CHECK(client.RoundTrip(wb, ExternalFormat::kAmrWb, 12.65).size() == wb.size());
  CHECK(client.RoundTrip(wb, ExternalFormat::kOpus, 24.0).size() == wb.size());
  CHECK(client.RoundTrip(wb, ExternalFormat::kOggVorbis, 64.0).size() == wb.size());
}
