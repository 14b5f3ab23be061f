// antispoof/include/antispoof/g711.h

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

// ITU-T G.711 companding on 16-bit linear PCM.  The encoders follow the
// usual software convention: u-law works on the top 14 bits (x >> 2) with
// bias 33 and clips magnitudes at 8159, A-law works on the top 13 bits
// (x >> 3).  Code words are returned with the standard line inversions
// applied (u-law bits inverted, A-law even bits toggled with 0x55).

#ifndef ANTISPOOF_G711_H_
#define ANTISPOOF_G711_H_

#include <cstdint>

#include "antispoof/audio-io.h"

namespace antispoof {

uint8_t LinearToUlaw(int16_t pcm);
int16_t UlawToLinear(uint8_t code);

uint8_t LinearToAlaw(int16_t pcm);
int16_t AlawToLinear(uint8_t code);

/// Quantizes each sample to 16 bits (QuantizeSample), companding round trip,
/// back to [-1, 1].  Sample rate unchanged.
AudioBuffer MulawRoundTrip(const AudioBuffer &buf);
AudioBuffer AlawRoundTrip(const AudioBuffer &buf);

}  // namespace antispoof

#endif  // ANTISPOOF_G711_H_
