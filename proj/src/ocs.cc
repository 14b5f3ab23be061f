// antispoof/src/ocs.cc

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

#include "antispoof/ocs.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace antispoof {

namespace {

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckShapes(const Matrix &x, std::span<const int> labels, const OcsParams &p) {
  if (x.NumRows() == 0) throw std::invalid_argument("OCS: empty batch");
  if (labels.size() != x.NumRows())
    throw std::invalid_argument("OCS: one label per embedding required");
  if (p.w0_hat.size() != x.NumCols())
    throw std::invalid_argument("OCS: weight and embedding dimensions differ");
  for (int y : labels)
    if (y != 0 && y != 1) throw std::invalid_argument("OCS: labels must be 0 or 1");
}

void CheckNormalized(const Matrix &x) {
  for (size_t i = 0; i < x.NumRows(); ++i)
    if (std::abs(Norm(x.Row(i)) - 1.0) > 1e-6)
      throw std::invalid_argument("OCS: embedding row " + std::to_string(i) +
                                  " is not unit norm");
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// z_i and dz_i/ds_i for one sample.
std::pair<double, double> Exponent(double s, int y, const OcsParams &p) {
  const double sign = y == 0 ? 1.0 : -1.0;
  const double m = y == 0 ? p.m0 : p.m1;
  return {p.alpha * (m - s) * sign, -p.alpha * sign};
}

}  // namespace

void OcsParams::Check() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("OCS: alpha must be positive");
  if (!(m0 <= 1.0 && m1 >= -1.0 && m0 > m1))
    throw std::invalid_argument("OCS: margins need -1 <= m1 < m0 <= 1");
  if (w0_hat.empty() || std::abs(Norm(w0_hat) - 1.0) > 1e-9)
    throw std::invalid_argument("OCS: w0_hat must be unit norm");
}

double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double OcsLossUnchecked(const Matrix &x, std::span<const int> labels, const OcsParams &p) {
  CheckShapes(x, labels, p);
  double total = 0.0;
  for (size_t i = 0; i < x.NumRows(); ++i)
    total += Softplus(Exponent(Dot(p.w0_hat, x.Row(i)), labels[i], p).first);
  return total / static_cast<double>(x.NumRows());
}

OcsGradient OcsGradUnchecked(const Matrix &x, std::span<const int> labels,
                             const OcsParams &p) {
  CheckShapes(x, labels, p);
  const size_t n = x.NumRows(), d = x.NumCols();
  OcsGradient g{Matrix(n, d), std::vector<double>(d, 0.0)};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    const auto [z, dz_ds] = Exponent(Dot(p.w0_hat, x.Row(i)), labels[i], p);
    const double coef = inv_n * Sigmoid(z) * dz_ds;
    for (size_t j = 0; j < d; ++j) {
      g.d_embeddings(i, j) = coef * p.w0_hat[j];
      g.d_w0[j] += coef * x(i, j);
    }
  }
  return g;
}

double OcsLoss(const Matrix &x, std::span<const int> labels, const OcsParams &p) {
  p.Check();
  CheckShapes(x, labels, p);
  CheckNormalized(x);
  return OcsLossUnchecked(x, labels, p);
}

OcsGradient OcsGrad(const Matrix &x, std::span<const int> labels, const OcsParams &p) {
  p.Check();
  CheckShapes(x, labels, p);
  CheckNormalized(x);
  return OcsGradUnchecked(x, labels, p);
}

}  // namespace antispoof
