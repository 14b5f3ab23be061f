// antispoof/tests/ocs-test.cc

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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "antispoof/common.h"
#include "antispoof/ocs.h"
#include "doctest.h"

namespace antispoof {
namespace {

std::vector<double> RandomUnit(Rng *rng, size_t d) {
  std::vector<double> v(d);
  double n = 0.0;
  for (double &x : v) {
    x = rng->Gaussian();
    n += x * x;
  }
  for (double &x : v) x /= std::sqrt(n);
  return v;
}

struct Batch {
  Matrix x;
  std::vector<int> labels;
  OcsParams p;
};

Batch RandomBatch(uint64_t seed, size_t n = 8, size_t d = 16) {
  Rng rng(seed);
  Batch b;
  b.p.w0_hat = RandomUnit(&rng, d);
  b.x = Matrix(n, d);
  for (size_t i = 0; i < n; ++i) {
    // Mix in w0 so some scores land near the margins instead of near zero.
    std::vector<double> r = RandomUnit(&rng, d);
    const double t = rng.Uniform(-1.0, 1.0);
    double norm = 0.0;
    for (size_t j = 0; j < d; ++j) {
      r[j] = t * b.p.w0_hat[j] + (1.0 - std::abs(t)) * r[j];
      norm += r[j] * r[j];
    }
    for (size_t j = 0; j < d; ++j) b.x(i, j) = r[j] / std::sqrt(norm);
    b.labels.push_back(rng.Bernoulli(0.5) ? 1 : 0);
  }
  return b;
}

bool Close(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  return diff <= 1e-6 || diff <= 1e-4 * std::max(std::abs(analytic), std::abs(numeric));
}

TEST_CASE("softplus is stable at both extremes") {
  CHECK(Softplus(0.0) == std::log(2.0));
  CHECK(Softplus(800.0) == 800.0);
  CHECK(Softplus(-800.0) == 0.0);
  CHECK(Softplus(-30.0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
  CHECK(Softplus(3.0) == doctest::Approx(std::log(1.0 + std::exp(3.0))).epsilon(1e-15));
}

TEST_CASE("loss at the margin is log 2") {
  OcsParams p;
  p.w0_hat = {1.0, 0.0, 0.0};
  for (int y : {0, 1}) {
    const double m = y == 0 ? p.m0 : p.m1;
    Matrix x(1, 3);
    x(0, 0) = m;
    x(0, 1) = std::sqrt(1.0 - m * m);
    const std::vector<int> labels = {y};
    CHECK(OcsLoss(x, labels, p) == std::log(2.0));
  }
}

TEST_CASE("bonafide sample aligned with w0") {
  OcsParams p;
  p.w0_hat = {0.0, 1.0};
  Matrix x(1, 2);
  x(0, 1) = 1.0;
  const std::vector<int> labels = {0};
  const double loss = OcsLoss(x, labels, p);
  CHECK(loss == doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-12));
  CHECK(std::abs(loss - 0.1269) < 5e-5);
}

TEST_CASE("analytic gradients match central differences") {
  const double h = 1e-5;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Batch b = RandomBatch(seed);
    const OcsGradient g = OcsGrad(b.x, b.labels, b.p);
    for (size_t i = 0; i < b.x.NumRows(); ++i)
      for (size_t j = 0; j < b.x.NumCols(); ++j) {
        const double keep = b.x(i, j);
        b.x(i, j) = keep + h;
        const double up = OcsLossUnchecked(b.x, b.labels, b.p);
        b.x(i, j) = keep - h;
        const double down = OcsLossUnchecked(b.x, b.labels, b.p);
        b.x(i, j) = keep;
        const double numeric = (up - down) / (2.0 * h);
        CHECK_MESSAGE(Close(g.d_embeddings(i, j), numeric),
                      "seed " << seed << " x(" << i << "," << j << ")");
      }
    for (size_t j = 0; j < b.p.w0_hat.size(); ++j) {
      const double keep = b.p.w0_hat[j];
      b.p.w0_hat[j] = keep + h;
      const double up = OcsLossUnchecked(b.x, b.labels, b.p);
      b.p.w0_hat[j] = keep - h;
      const double down = OcsLossUnchecked(b.x, b.labels, b.p);
      b.p.w0_hat[j] = keep;
      CHECK_MESSAGE(Close(g.d_w0[j], (up - down) / (2.0 * h)), "seed " << seed << " w0 " << j);
    }
  }
}

TEST_CASE("gradient with respect to each embedding is parallel to w0") {
  const Batch b = RandomBatch(123);
  const OcsGradient g = OcsGrad(b.x, b.labels, b.p);
  for (size_t i = 0; i < b.x.NumRows(); ++i) {
    double dot = 0.0, gg = 0.0;
    for (size_t j = 0; j < b.x.NumCols(); ++j) {
      dot += g.d_embeddings(i, j) * b.p.w0_hat[j];
      gg += g.d_embeddings(i, j) * g.d_embeddings(i, j);
    }
    // |g.w0| = |g| |w0| with |w0| = 1.
    CHECK(std::abs(std::abs(dot) - std::sqrt(gg)) <= 1e-12 * std::sqrt(gg) + 1e-300);
  }
}

TEST_CASE("saturated samples have vanishing gradient") {
  OcsParams p;
  p.alpha = 400.0;
  p.w0_hat = {1.0, 0.0};
  Matrix x(2, 2);
  x(0, 0) = 1.0;   // bonafide, s = 1 > m0
  x(1, 0) = -1.0;  // spoof, s = -1 < m1
  const std::vector<int> labels = {0, 1};
  const OcsGradient g = OcsGrad(x, labels, p);
  for (double v : g.d_embeddings.Data()) CHECK(std::abs(v) < 1e-8);
  for (double v : g.d_w0) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("loss ignores batch order") {
  Batch b = RandomBatch(77, 12, 6);
  const double base = OcsLoss(b.x, b.labels, b.p);
  std::vector<size_t> perm(b.x.NumRows());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    for (size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(i)))]);
    Matrix x(b.x.NumRows(), b.x.NumCols());
    std::vector<int> labels(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) {
      labels[i] = b.labels[perm[i]];
      for (size_t j = 0; j < x.NumCols(); ++j) x(i, j) = b.x(perm[i], j);
    }
    CHECK(OcsLoss(x, labels, b.p) == doctest::Approx(base).epsilon(1e-15));
  }
}

TEST_CASE("moving past the margin strictly lowers the loss") {
  OcsParams p;
  p.w0_hat = {1.0, 0.0};
  auto loss_at = [&](double s, int y) {
    Matrix x(1, 2);
    x(0, 0) = s;
    x(0, 1) = std::sqrt(1.0 - s * s);
    const std::vector<int> labels = {y};
    return OcsLoss(x, labels, p);
  };
  double prev = loss_at(0.9, 0);
  for (double s = 0.91; s <= 1.0; s += 0.01) {
    const double cur = loss_at(std::min(s, 1.0), 0);
    CHECK(cur < prev);
    prev = cur;
  }
  prev = loss_at(0.2, 1);
  for (double s = 0.1; s >= -1.0; s -= 0.1) {
    const double cur = loss_at(std::max(s, -1.0), 1);
    CHECK(cur < prev);
    prev = cur;
  }
  // Larger alpha on the correct side drives the loss towards zero.
  double last = 1.0;
  for (double a : {5.0, 20.0, 80.0, 320.0}) {
    p.alpha = a;
    const double cur = loss_at(0.95, 0);
    CHECK(cur < last);
    last = cur;
  }
  CHECK(last < 1e-6);
}

TEST_CASE("invalid inputs are rejected") {
  OcsParams p;
  p.w0_hat = {1.0, 0.0};
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  const std::vector<int> ok = {0};
  CHECK_NOTHROW(OcsLoss(x, ok, p));

  Matrix off = x;
  off(0, 0) = 1.01;
  CHECK_THROWS_AS(OcsLoss(off, ok, p), std::invalid_argument);
  CHECK_THROWS_AS(OcsGrad(off, ok, p), std::invalid_argument);
  CHECK_NOTHROW(OcsLossUnchecked(off, ok, p));

  const std::vector<int> bad_label = {2};
  CHECK_THROWS_AS(OcsLoss(x, bad_label, p), std::invalid_argument);
  const std::vector<int> two = {0, 1};
  CHECK_THROWS_AS(OcsLoss(x, two, p), std::invalid_argument);

  OcsParams q = p;
  q.w0_hat = {1.0, 1.0};
  CHECK_THROWS_AS(OcsLoss(x, ok, q), std::invalid_argument);
  q = p;
  q.m1 = 0.95;
  CHECK_THROWS_AS(OcsLoss(x, ok, q), std::invalid_argument);
  q = p;
  q.alpha = 0.0;
  CHECK_THROWS_AS(OcsLoss(x, ok, q), std::invalid_argument);
}

}  // namespace
}  // namespace antispoof
