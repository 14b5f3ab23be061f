// antispoof/include/antispoof/feature-io.h

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

// Binary container for FeatureMatrix, all fields little-endian:
//
//   offset  size  field
//   0       4     magic "ASFM"
//   4       4     u32 format version (1)
//   8       4     u32 kind (1 logspec_onesided, 2 logspec_doublesided, 3 lfcc_stack)
//   12      4     u32 sample rate
//   16      4     u32 freq_dim (rows)
//   20      4     u32 time_dim (cols)
//   24      4*R*C IEEE-754 float32 values, row-major (frequency-major)
//
// The CSV debug dump has one line per frequency row, time values separated
// by commas, preceded by a "# kind=<name> freq_dim=<R> time_dim=<C>
// sample_rate=<Hz>" comment line.

#ifndef ANTISPOOF_FEATURE_IO_H_
#define ANTISPOOF_FEATURE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "antispoof/features.h"

namespace antispoof {

std::vector<uint8_t> EncodeFeatureMatrix(const FeatureMatrix &m);
FeatureMatrix DecodeFeatureMatrix(std::span<const uint8_t> bytes);

void WriteFeatureMatrix(const FeatureMatrix &m, const std::filesystem::path &path);
FeatureMatrix ReadFeatureMatrix(const std::filesystem::path &path);

void WriteFeatureCsv(const FeatureMatrix &m, const std::filesystem::path &path);

/// Reads a whole file; throws DataError when it cannot be opened.
std::vector<uint8_t> ReadFileBytes(const std::filesystem::path &path);
void WriteFileBytes(std::span<const uint8_t> bytes,
                    const std::filesystem::path &path);

}  // namespace antispoof

#endif  // ANTISPOOF_FEATURE_IO_H_
