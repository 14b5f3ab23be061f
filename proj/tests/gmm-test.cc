// antispoof/tests/gmm-test.cc

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
#include <stdexcept>
#include <vector>

#include "antispoof/common.h"
#include "antispoof/gmm.h"
#include "doctest.h"
#include "test-util.h"

namespace antispoof {
namespace {

using testing::TempDir;

Matrix GaussianFrames(uint64_t seed, size_t n, const std::vector<double> &mean,
                      const std::vector<double> &stddev) {
  Rng rng(seed);
  Matrix x(n, mean.size());
  for (size_t i = 0; i < n; ++i)
    for (size_t d = 0; d < mean.size(); ++d) x(i, d) = mean[d] + stddev[d] * rng.Gaussian();
  return x;
}

// Two clusters in 3-D, centres (-3,0,2) and (4,1,-2), unit spread.
Matrix TwoClusters(uint64_t seed, size_t per_cluster) {
  const Matrix a = GaussianFrames(seed, per_cluster, {-3, 0, 2}, {1, 1, 1});
  const Matrix b = GaussianFrames(seed + 1000, per_cluster, {4, 1, -2}, {1, 1, 1});
  Matrix x(2 * per_cluster, 3);
  for (size_t i = 0; i < per_cluster; ++i)
    for (size_t d = 0; d < 3; ++d) {
      x(2 * i, d) = a(i, d);
      x(2 * i + 1, d) = b(i, d);
    }
  return x;
}

FeatureMatrix AsFeatures(const Matrix &frames) {
  FeatureMatrix f;
  f.kind = FeatureKind::kLfccStack;
  f.values = frames.Transpose();
  return f;
}

GmmModel SingleGaussian(std::vector<double> mean, std::vector<double> var) {
  GmmModel m;
  m.weights = {1.0};
  m.means = Matrix(1, mean.size());
  m.variances = Matrix(1, var.size());
  for (size_t d = 0; d < mean.size(); ++d) {
    m.means(0, d) = mean[d];
    m.variances(0, d) = var[d];
  }
  return m;
}

TEST_CASE("one component reproduces the sample mean and biased variance") {
  const Matrix x = GaussianFrames(3, 500, {1.5, -2.0, 0.25, 7.0}, {0.5, 2.0, 1.0, 0.1});
  GmmConfig cfg;
  cfg.n_components = 1;
  const GmmTrainResult r = GmmTrain(x, cfg, 11);
  const size_t n = x.NumRows();
  for (size_t d = 0; d < x.NumCols(); ++d) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += x(i, d);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) var += (x(i, d) - mean) * (x(i, d) - mean);
    var /= static_cast<double>(n);
    CHECK(r.model.means(0, d) == mean);
    CHECK(r.model.variances(0, d) == var);
  }
  CHECK(r.model.weights[0] == 1.0);
  CHECK(r.converged);
}

TEST_CASE("EM log-likelihood never decreases") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix x = TwoClusters(100 + seed, 150);
    GmmConfig cfg;
    cfg.n_components = 4;
    cfg.max_iters = 40;
    cfg.tol = 0.0;
    const GmmTrainResult r = GmmTrain(x, cfg, seed);
    REQUIRE(r.log_likelihood.size() >= 2);
    for (size_t i = 1; i < r.log_likelihood.size(); ++i)
      CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-8);
    r.model.Check(cfg.variance_floor);
  }
}

TEST_CASE("two separated clusters are recovered") {
  const Matrix x = TwoClusters(42, 1000);
  GmmConfig cfg;
  cfg.n_components = 2;
  const GmmTrainResult r = GmmTrain(x, cfg, 5);
  const std::vector<std::vector<double>> truth = {{-3, 0, 2}, {4, 1, -2}};
  const size_t first = r.model.means(0, 0) < 0.0 ? 0 : 1;
  for (size_t c = 0; c < 2; ++c) {
    const size_t k = c == 0 ? first : 1 - first;
    for (size_t d = 0; d < 3; ++d) CHECK(std::abs(r.model.means(k, d) - truth[c][d]) < 0.1);
    CHECK(std::abs(r.model.weights[k] - 0.5) < 0.02);
  }
}

TEST_CASE("training is deterministic for a seed") {
  const Matrix x = TwoClusters(9, 200);
  GmmConfig cfg;
  cfg.n_components = 5;
  cfg.max_iters = 15;
  CHECK(GmmTrain(x, cfg, 77).model == GmmTrain(x, cfg, 77).model);
}

TEST_CASE("variance floor holds for every trained model") {
  // The third coordinate is constant, so its variance collapses onto the floor.
  Matrix x = TwoClusters(8, 300);
  for (size_t i = 0; i < x.NumRows(); ++i) x(i, 2) = 0.5;
  GmmConfig cfg;
  cfg.n_components = 3;
  cfg.variance_floor = 1e-3;
  const GmmTrainResult r = GmmTrain(x, cfg, 1);
  for (double v : r.model.variances.Data()) CHECK(v >= cfg.variance_floor);
  for (size_t k = 0; k < 3; ++k) CHECK(r.model.variances(k, 2) == cfg.variance_floor);
}

TEST_CASE("training preconditions") {
  GmmConfig cfg;
  cfg.n_components = 4;
  CHECK_THROWS_AS(GmmTrain(Matrix(), cfg, 0), std::invalid_argument);
  CHECK_THROWS_AS(GmmTrain(Matrix(3, 2, 1.0), cfg, 0), std::invalid_argument);
}

TEST_CASE("frame log-likelihood matches the Gaussian density") {
  const GmmModel m = SingleGaussian({1.0, -1.0}, {4.0, 0.25});
  const std::vector<double> x = {2.0, 0.0};
  const double expect = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(4.0 * 0.25) -
                        0.5 * (1.0 / 4.0 + 1.0 / 0.25);
  CHECK(GmmFrameLogLikelihood(m, x) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("LLR score properties") {
  const Matrix bona_frames = GaussianFrames(1, 400, {0, 0, 0}, {1, 1, 1});
  const Matrix spoof_frames = GaussianFrames(2, 400, {1.5, -1.5, 1.0}, {1, 1, 1});
  GmmConfig cfg;
  cfg.n_components = 2;
  const GmmModel bona = GmmTrain(bona_frames, cfg, 3).model;
  const GmmModel spoof = GmmTrain(spoof_frames, cfg, 4).model;

  SUBCASE("identical models score zero") {
    for (uint64_t s = 0; s < 10; ++s)
      CHECK(GmmLlrScore(bona, bona, AsFeatures(GaussianFrames(s, 30, {2, 2, 2}, {3, 3, 3}))) ==
            0.0);
  }
  SUBCASE("swapping the models negates the score") {
    for (uint64_t s = 0; s < 10; ++s) {
      const FeatureMatrix f = AsFeatures(GaussianFrames(50 + s, 40, {0.5, 0, 0}, {1, 1, 1}));
      CHECK(GmmLlrScore(bona, spoof, f) == -GmmLlrScore(spoof, bona, f));
    }
  }
  SUBCASE("a frame at the bonafide mean scores positive") {
    const GmmModel b = SingleGaussian({0, 0, 0}, {1, 1, 1});
    const GmmModel s = SingleGaussian({10, 10, 10}, {1, 1, 1});
    CHECK(GmmLlrScore(b, s, AsFeatures(Matrix(1, 3, 0.0))) > 0.0);
  }
  SUBCASE("class-conditional scores separate by more than 4 pooled SD") {
    std::vector<double> sb, ss;
    for (uint64_t u = 0; u < 100; ++u) {
      sb.push_back(GmmLlrScore(bona, spoof,
                               AsFeatures(GaussianFrames(1000 + u, 100, {0, 0, 0}, {1, 1, 1}))));
      ss.push_back(GmmLlrScore(
          bona, spoof, AsFeatures(GaussianFrames(2000 + u, 100, {1.5, -1.5, 1.0}, {1, 1, 1}))));
    }
    auto stats = [](const std::vector<double> &v) {
      double m = 0.0, q = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      for (double x : v) q += (x - m) * (x - m);
      return std::pair{m, q / static_cast<double>(v.size() - 1)};
    };
    const auto [mb, vb] = stats(sb);
    const auto [ms, vs] = stats(ss);
    const double pooled = std::sqrt(0.5 * (vb + vs));
    CHECK((mb - ms) / pooled > 4.0);
  }
  SUBCASE("dimension mismatch is a data error") {
    CHECK_THROWS_AS(GmmLlrScore(bona, spoof, AsFeatures(Matrix(5, 2, 0.0))), DataError);
    const GmmModel other = SingleGaussian({0, 0}, {1, 1});
    CHECK_THROWS_AS(GmmLlrScore(bona, other, AsFeatures(Matrix(5, 3, 0.0))), DataError);
  }
}

TEST_CASE("pooling transposes to time-major frames") {
  FeatureMatrix lfcc;
  lfcc.values = Matrix(60, 450);
  for (size_t r = 0; r < 60; ++r)
    for (size_t c = 0; c < 450; ++c) lfcc.values(r, c) = static_cast<double>(r * 1000 + c);
  const Matrix p = PoolFeatures(lfcc);
  CHECK(p.NumRows() == 450);
  CHECK(p.NumCols() == 60);
  CHECK(p(17, 3) == lfcc.values(3, 17));

  FeatureMatrix spec;
  spec.values = Matrix(512, 498);
  const Matrix q = PoolFeatures(spec);
  CHECK(q.NumRows() == 498);
  CHECK(q.NumCols() == 512);

  CHECK_THROWS_AS(PoolFeatures(FeatureMatrix{}), std::invalid_argument);
}

TEST_CASE("model files round-trip and reject corruption") {
  GmmConfig cfg;
  cfg.n_components = 3;
  const GmmModel m = GmmTrain(TwoClusters(4, 100), cfg, 2).model;
  const std::vector<uint8_t> bytes = EncodeGmm(m);
  CHECK(bytes.size() == 16 + 8 * (3 + 2 * 3 * 3));
  CHECK(bytes[0] == 'G');
  CHECK(bytes[3] == 'D');
  CHECK(DecodeGmm(bytes) == m);

  TempDir dir("gmm");
  WriteGmm(m, dir / "m.gmm");
  CHECK(ReadGmm(dir / "m.gmm") == m);

  std::vector<uint8_t> bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(DecodeGmm(bad), DataError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(DecodeGmm(bad), DataError);
  bad = bytes;
  bad[4] = 9;
  CHECK_THROWS_AS(DecodeGmm(bad), DataError);
}

TEST_CASE("model check catches invalid parameters") {
  GmmModel m = SingleGaussian({0, 0}, {1, 1});
  CHECK_NOTHROW(m.Check(1e-4));
  m.variances(0, 1) = 1e-6;
  CHECK_THROWS_AS(m.Check(1e-4), DataError);
  m = SingleGaussian({0, 0}, {1, 1});
  m.weights[0] = 0.9;
  CHECK_THROWS_AS(m.Check(), DataError);
}

}  // namespace
}  // namespace antispoof
