// antispoof/tests/audio-io-test.cc

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

#include <cmath>
#include <cstring>
#include <random>

#include "antispoof/audio-io.h"
#include "antispoof/common.h"
#include "antispoof/feature-io.h"
#include "doctest.h"
#include "test-util.h"

using namespace antispoof;
using namespace antispoof::testing;

namespace {

// Canonical 44-byte header built field by field, independent of EncodeWav.
std::vector<uint8_t> HandWav(const std::vector<int16_t> &pcm, uint32_t rate,
                             uint16_t channels = 1, uint16_t bits = 16,
                             uint16_t format = 1) {
  std::vector<uint8_t> b;
  auto u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(uint8_t(v >> (8 * i)));
  };
  auto u16 = [&](uint16_t v) {
    b.push_back(uint8_t(v));
    b.push_back(uint8_t(v >> 8));
  };
  auto tag = [&](const char *t) { b.insert(b.end(), t, t + 4); };
  const uint32_t data = static_cast<uint32_t>(pcm.size() * 2);
  tag("RIFF");
  u32(36 + data);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<uint16_t>(channels * bits / 8));
  u16(bits);
  tag("data");
  u32(data);
  for (int16_t s : pcm) u16(static_cast<uint16_t>(s));
  return b;
}

}  // namespace

TEST_CASE("read scales by 1/32768") {
  const auto buf = DecodeWav(HandWav({32767, -32768, 0, 1}, 16000));
  REQUIRE(buf.size() == 4);
  CHECK(buf.samples[0] == 32767.0 / 32768.0);
  CHECK(buf.samples[1] == -1.0);
  CHECK(buf.samples[2] == 0.0);
  CHECK(buf.samples[3] == 1.0 / 32768.0);
  CHECK(buf.sample_rate == 16000);

  const auto zeros = DecodeWav(HandWav(std::vector<int16_t>(123, 0), 8000));
  CHECK(zeros.size() == 123);
  for (double s : zeros.samples) CHECK(s == 0.0);
}

TEST_CASE("quantization rounds half away from zero and clamps") {
  CHECK(QuantizeSample(1.0) == 32767);
  CHECK(QuantizeSample(2.0) == 32767);
  CHECK(QuantizeSample(-1.0) == -32768);
  CHECK(QuantizeSample(-3.0) == -32768);
  CHECK(QuantizeSample(0.0) == 0);
  CHECK(QuantizeSample(0.5) == 16384);
  CHECK(QuantizeSample(0.5 / 32768.0) == 1);
  CHECK(QuantizeSample(-0.5 / 32768.0) == -1);
  CHECK(QuantizeSample(1.49 / 32768.0) == 1);
  CHECK(QuantizeSample(std::nan("")) == -32768);
}

TEST_CASE("write then read reproduces the sample payload bit-exactly") {
  TempDir dir("wav");
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> d(-32768, 32767);
  std::vector<int16_t> pcm(4001);
  for (auto &s : pcm) s = static_cast<int16_t>(d(gen));
  const auto original = HandWav(pcm, 16000);
  WriteFileBytes(original, dir / "in.wav");
  const AudioBuffer buf = ReadWav(dir / "in.wav");
  WriteWav(buf, dir / "out.wav");
  CHECK(ReadFileBytes(dir / "out.wav") == original);
  CHECK(EncodeWav(buf) == original);
}

TEST_CASE("malformed WAV input is rejected") {
  CHECK_THROWS_AS(DecodeWav(HandWav({1, 2, 3, 4}, 16000, 2)), DataError);
  CHECK_THROWS_AS(DecodeWav(HandWav({1, 2}, 16000, 1, 8)), DataError);
  CHECK_THROWS_AS(DecodeWav(HandWav({1, 2}, 16000, 1, 16, 3)), DataError);
  std::vector<uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0};
  CHECK_THROWS_AS(DecodeWav(junk), DataError);
  CHECK_THROWS_AS(ReadWav("/nonexistent/x.wav"), DataError);
}

TEST_CASE("resample identity and length rule") {
  const AudioBuffer tone = MakeTone(440, 16000, 0.3);
  const AudioBuffer same = Resample(tone, 16000);
  CHECK(same.samples == tone.samples);
  for (size_t len : {1u, 7u, 999u, 16001u}) {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(len, 0.1);
    CHECK(Resample(b, 8000).size() == static_cast<size_t>(std::llround(len / 2.0)));
    CHECK(Resample(b, 22050).size() ==
          static_cast<size_t>(std::llround(len * 22050.0 / 16000.0)));
    const AudioBuffer once = Resample(b, 8000);
    CHECK(Resample(once, 8000).size() == once.size());
  }
  CHECK_THROWS_AS(Resample(tone, 0), std::invalid_argument);
}

TEST_CASE("resample keeps in-band tones and suppresses aliases") {
  const AudioBuffer in = MakeTone(1000, 16000, 1.0, 0.5);
  const AudioBuffer out = Resample(in, 8000);
  CHECK(out.sample_rate == 8000);
  const double a_in = ToneAmplitude(in.samples, 1000, 16000);
  const double a_out = ToneAmplitude(out.samples, 1000, 8000);
  CHECK(std::abs(Db(a_out / a_in)) < 1.0);

  // 3 kHz is below 0.8 * 4000 Hz and must also survive.
  const AudioBuffer in3 = MakeTone(3000, 16000, 1.0, 0.5);
  CHECK(std::abs(Db(ToneAmplitude(Resample(in3, 8000).samples, 3000, 8000) /
                    ToneAmplitude(in3.samples, 3000, 16000))) < 1.0);

  // A 7 kHz tone folds to 1 kHz at 8 kHz; that alias must be >= 30 dB down.
  const AudioBuffer hi = MakeTone(7000, 16000, 1.0, 0.5);
  const AudioBuffer dec = Resample(hi, 8000);
  CHECK(Db(ToneAmplitude(dec.samples, 1000, 8000) / ToneAmplitude(hi.samples, 7000, 16000)) <=
        -30.0);

  // Upsampling keeps the tone too.
  const AudioBuffer up = Resample(MakeTone(1000, 8000, 1.0, 0.5), 16000);
  CHECK(std::abs(Db(ToneAmplitude(up.samples, 1000, 16000) / 0.5)) < 1.0);
}

TEST_CASE("rms normalization") {
  const AudioBuffer sine = MakeTone(500, 16000, 1.0, 1.0);
  const AudioBuffer out = RmsNormalize(sine, -10.0);
  CHECK(Rms(out.samples) == doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-9));
  CHECK(std::abs(20.0 * std::log10(Rms(out.samples)) + 10.0) < 1e-6);

  const AudioBuffer again = RmsNormalize(out, -10.0);
  for (size_t i = 0; i < out.size(); ++i)
    CHECK(std::abs(again.samples[i] - out.samples[i]) < 1e-6);
  CHECK(RmsGain(out, -10.0) == doctest::Approx(1.0).epsilon(1e-12));

  AudioBuffer noise;
  noise.samples.resize(32000);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (double &s : noise.samples) s = nd(gen);
  const double r = Rms(noise.samples);
  for (double &s : noise.samples) s /= r;
  CHECK(Rms(RmsNormalize(noise, -30.0).samples) ==
        doctest::Approx(0.031622776601683794).epsilon(1e-9));

  // Loud targets clip at full scale.
  const AudioBuffer loud = RmsNormalize(sine, 6.0);
  for (double s : loud.samples) CHECK(std::abs(s) <= 1.0);

  AudioBuffer silent;
  silent.samples.assign(100, 0.0);
  CHECK_THROWS_AS(RmsNormalize(silent, -20.0), DataError);
}

TEST_CASE("fix duration") {
  const AudioBuffer five = MakeNoise(1, 1000, 5.0);
  CHECK(FixDuration(five, 5.0, DurationMode::kRepeatPad, 0).samples == five.samples);
  CHECK(FixDuration(five, 5.0, DurationMode::kRandomSlice, 9).samples == five.samples);

  const AudioBuffer two = MakeNoise(2, 1000, 2.0);
  const AudioBuffer tiled = FixDuration(two, 5.0, DurationMode::kRepeatPad, 0);
  REQUIRE(tiled.size() == 5000);
  for (size_t i = 0; i < tiled.size(); ++i) CHECK(tiled.samples[i] == two.samples[i % 2000]);

  const AudioBuffer ten = MakeNoise(3, 1000, 10.0);
  const auto s1 = FixDuration(ten, 5.0, DurationMode::kRandomSlice, 77);
  const auto s2 = FixDuration(ten, 5.0, DurationMode::kRandomSlice, 77);
  CHECK(s1.samples == s2.samples);
  REQUIRE(s1.size() == 5000);
  // The slice is a contiguous window of the input.
  const auto it = std::search(ten.samples.begin(), ten.samples.end(), s1.samples.begin(),
                              s1.samples.end());
  CHECK(it != ten.samples.end());
  bool any_other = false;
  for (uint64_t seed = 0; seed < 8; ++seed)
    any_other |= FixDuration(ten, 5.0, DurationMode::kRandomSlice, seed).samples != s1.samples;
  CHECK(any_other);

  for (size_t len = 1; len < 50; ++len) {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(len, 0.25);
    CHECK(FixDuration(b, 0.01, DurationMode::kRepeatPad, 0).size() == 160);
    CHECK(FixDuration(b, 0.01, DurationMode::kRandomSlice, len).size() == 160);
  }
  CHECK_THROWS_AS(FixDuration(AudioBuffer{}, 1.0, DurationMode::kRepeatPad, 0),
                  std::invalid_argument);
}
