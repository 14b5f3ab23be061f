// antispoof/src/g711.cc

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

#include "antispoof/g711.h"

#include <bit>

namespace antispoof {

namespace {

constexpr int kUlawBias = 0x84;   // 132 on the 16-bit scale, 33 on 14 bits
constexpr int kUlawClip = 8159;   // 14-bit magnitude clip

// Segment number from the position of the leading one: values below 2^(k+1)
// sit in segment k - 5 (u-law, biased 14-bit) or k - 4 (A-law, 13-bit).
int SegmentOf(int value, int first_bit) {
  const int width = std::bit_width(static_cast<unsigned>(value));
  int seg = width - first_bit;
  return seg < 0 ? 0 : seg;
}

}  // namespace

uint8_t LinearToUlaw(int16_t pcm) {
  int v = pcm >> 2;
  int mask;
  if (v < 0) {
    v = -v;
    mask = 0x7F;
  } else {
    mask = 0xFF;
  }
  if (v > kUlawClip) v = kUlawClip;
  v += kUlawBias >> 2;
  const int seg = SegmentOf(v, 6);  // biased values 32..63 are segment 0
  if (seg >= 8) return static_cast<uint8_t>(0x7F ^ mask);
  const int code = (seg << 4) | ((v >> (seg + 1)) & 0xF);
  return static_cast<uint8_t>(code ^ mask);
}

int16_t UlawToLinear(uint8_t code) {
  const int u = ~code & 0xFF;
  int t = ((u & 0x0F) << 3) + kUlawBias;
  t <<= (u & 0x70) >> 4;
  return static_cast<int16_t>((u & 0x80) ? (kUlawBias - t) : (t - kUlawBias));
}

uint8_t LinearToAlaw(int16_t pcm) {
  int v = pcm >> 3;
  int mask;
  if (v >= 0) {
    mask = 0xD5;  // sign bit set plus even-bit inversion
  } else {
    mask = 0x55;
    v = -v - 1;
  }
  const int seg = SegmentOf(v, 5);  // 0..31 -> 0, 32..63 -> 1, ...
  if (seg >= 8) return static_cast<uint8_t>(0x7F ^ mask);
  int code = seg << 4;
  code |= (seg < 2 ? (v >> 1) : (v >> seg)) & 0x0F;
  return static_cast<uint8_t>(code ^ mask);
}

int16_t AlawToLinear(uint8_t code) {
  const int a = code ^ 0x55;
  int t = (a & 0x0F) << 4;
  const int seg = (a & 0x70) >> 4;
  switch (seg) {
    case 0:
      t += 8;
      break;
    case 1:
      t += 0x108;
      break;
    default:
      t += 0x108;
      t <<= seg - 1;
  }
  return static_cast<int16_t>((a & 0x80) ? t : -t);
}

namespace {

template <typename Encode, typename Decode>
AudioBuffer RoundTrip(const AudioBuffer &buf, Encode enc, Decode dec) {
  AudioBuffer out = buf;
  for (double &x : out.samples) x = dec(enc(QuantizeSample(x))) / 32768.0;
  return out;
}

}  // namespace

AudioBuffer MulawRoundTrip(const AudioBuffer &buf) {
  return RoundTrip(buf, LinearToUlaw, UlawToLinear);
}

AudioBuffer AlawRoundTrip(const AudioBuffer &buf) {
  return RoundTrip(buf, LinearToAlaw, AlawToLinear);
}

}  // namespace antispoof
