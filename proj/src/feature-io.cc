// antispoof/src/feature-io.cc

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

#include "antispoof/feature-io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "antispoof/common.h"

namespace antispoof {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'F', 'M'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderBytes = 24;

void PutU32(std::vector<uint8_t> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(uint8_t(v >> (8 * i)));
}

uint32_t GetU32(const uint8_t *p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

}  // namespace

std::vector<uint8_t> EncodeFeatureMatrix(const FeatureMatrix &m) {
  std::vector<uint8_t> out;
  const size_t n = m.FreqDim() * m.TimeDim();
  out.reserve(kHeaderBytes + 4 * n);
  out.insert(out.end(), kMagic, kMagic + 4);
  PutU32(&out, kVersion);
  PutU32(&out, static_cast<uint32_t>(m.kind));
  PutU32(&out, static_cast<uint32_t>(m.sample_rate));
  PutU32(&out, static_cast<uint32_t>(m.FreqDim()));
  PutU32(&out, static_cast<uint32_t>(m.TimeDim()));
  for (double v : m.values.Data())
    PutU32(&out, std::bit_cast<uint32_t>(static_cast<float>(v)));
  return out;
}

FeatureMatrix DecodeFeatureMatrix(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw DataError("not a feature matrix file (bad magic)");
  const uint8_t *p = bytes.data();
  if (GetU32(p + 4) != kVersion)
    throw DataError("unsupported feature matrix version " +
                    std::to_string(GetU32(p + 4)));
  const uint32_t kind = GetU32(p + 8);
  if (kind < 1 || kind > 3)
    throw DataError("unknown feature kind tag " + std::to_string(kind));
  FeatureMatrix m;
  m.kind = static_cast<FeatureKind>(kind);
  m.sample_rate = static_cast<int>(GetU32(p + 12));
  const size_t rows = GetU32(p + 16), cols = GetU32(p + 20);
  if (bytes.size() != kHeaderBytes + 4 * rows * cols)
    throw DataError("feature matrix payload size does not match header");
  m.values = Matrix(rows, cols);
  const uint8_t *d = p + kHeaderBytes;
  for (size_t i = 0; i < rows * cols; ++i)
    m.values.Data()[i] = std::bit_cast<float>(GetU32(d + 4 * i));
  return m;
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(std::span<const uint8_t> bytes,
                    const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

void WriteFeatureMatrix(const FeatureMatrix &m, const std::filesystem::path &path) {
  WriteFileBytes(EncodeFeatureMatrix(m), path);
}

FeatureMatrix ReadFeatureMatrix(const std::filesystem::path &path) {
  try {
    return DecodeFeatureMatrix(ReadFileBytes(path));
  } catch (const DataError &e) {
    throw DataError(std::string(e.what()) + ": " + path.string());
  }
}

void WriteFeatureCsv(const FeatureMatrix &m, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << "# kind=" << FeatureKindName(m.kind) << " freq_dim=" << m.FreqDim()
      << " time_dim=" << m.TimeDim() << " sample_rate=" << m.sample_rate << "\n";
  out << std::setprecision(9);
  for (size_t r = 0; r < m.FreqDim(); ++r) {
    for (size_t c = 0; c < m.TimeDim(); ++c) {
      if (c) out << ',';
      out << static_cast<float>(m.values(r, c));
    }
    out << '\n';
  }
}

}  // namespace antispoof
