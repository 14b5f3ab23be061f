// antispoof/src/gmm.cc

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

#include "antispoof/gmm.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "antispoof/common.h"
#include "antispoof/feature-io.h"

namespace antispoof {

namespace {

constexpr char kMagic[4] = {'G', 'M', 'M', 'D'};
constexpr uint32_t kVersion = 1;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Per-component constant log w_k - 0.5 sum_d log(2 pi v_kd).
std::vector<double> ComponentConstants(const GmmModel &m) {
  std::vector<double> c(m.NumComponents());
  for (size_t k = 0; k < c.size(); ++k) {
    double s = 0.0;
    for (double v : m.variances.Row(k)) s += kLog2Pi + std::log(v);
    c[k] = std::log(m.weights[k]) - 0.5 * s;
  }
  return c;
}

// Fills comp[k] with log w_k N(x; mu_k, v_k) and returns the log-sum-exp.
double ComponentLogLikelihoods(const GmmModel &m, const std::vector<double> &consts,
                               std::span<const double> x, std::vector<double> *comp) {
  const size_t dim = m.Dim();
  double best = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < m.NumComponents(); ++k) {
    const double *mu = m.means.Row(k).data();
    const double *var = m.variances.Row(k).data();
    double q = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      const double diff = x[d] - mu[d];
      q += diff * diff / var[d];
    }
    (*comp)[k] = consts[k] - 0.5 * q;
    best = std::max(best, (*comp)[k]);
  }
  double sum = 0.0;
  for (double c : *comp) sum += std::exp(c - best);
  return best + std::log(sum);
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::vector<double> GlobalVariance(const Matrix &x, double floor) {
  const size_t n = x.NumRows(), dim = x.NumCols();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t d = 0; d < dim; ++d) mean[d] += x(i, d);
  for (double &m : mean) m /= static_cast<double>(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t d = 0; d < dim; ++d) var[d] += (x(i, d) - mean[d]) * (x(i, d) - mean[d]);
  for (double &v : var) v = std::max(v / static_cast<double>(n), floor);
  return var;
}

// k-means++ seeding followed by a few Lloyd iterations; returns the hard
// assignment of every frame.
std::vector<size_t> KMeans(const Matrix &x, size_t k, int iters, Rng *rng,
                           Matrix *centers) {
  const size_t n = x.NumRows(), dim = x.NumCols();
  *centers = Matrix(k, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  size_t pick = static_cast<size_t>(rng->UniformInt(0, static_cast<int64_t>(n) - 1));
  for (size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total > 0.0) {
        const double u = rng->Uniform01() * total;
        double acc = 0.0;
        pick = n - 1;
        for (size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > u) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<size_t>(rng->UniformInt(0, static_cast<int64_t>(n) - 1));
      }
    }
    std::copy(x.Row(pick).begin(), x.Row(pick).end(), centers->Row(c).begin());
    for (size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], SquaredDistance(x.Row(i), centers->Row(c)));
  }

  std::vector<size_t> assign(n, 0);
  for (int it = 0; it <= iters; ++it) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < k; ++c) {
        const double d = SquaredDistance(x.Row(i), centers->Row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed = changed || best != assign[i];
      assign[i] = best;
    }
    if (it == iters || (it > 0 && !changed)) break;
    Matrix sums(k, dim);
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (size_t d = 0; d < dim; ++d) sums(assign[i], d) += x(i, d);
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (size_t d = 0; d < dim; ++d)
        (*centers)(c, d) = sums(c, d) / static_cast<double>(counts[c]);
    }
  }
  return assign;
}

GmmModel InitialModel(const Matrix &x, const GmmConfig &cfg, Rng *rng) {
  const size_t n = x.NumRows(), dim = x.NumCols();
  const auto k = static_cast<size_t>(cfg.n_components);
  Matrix centers;
  const std::vector<size_t> assign = KMeans(x, k, cfg.kmeans_iters, rng, &centers);
  const std::vector<double> global_var = GlobalVariance(x, cfg.variance_floor);

  GmmModel m;
  m.weights.assign(k, 0.0);
  m.means = centers;
  m.variances = Matrix(k, dim);
  std::vector<size_t> counts(k, 0);
  for (size_t i = 0; i < n; ++i) {
    ++counts[assign[i]];
    for (size_t d = 0; d < dim; ++d) {
      const double diff = x(i, d) - centers(assign[i], d);
      m.variances(assign[i], d) += diff * diff;
    }
  }
  for (size_t c = 0; c < k; ++c) {
    const size_t cnt = std::max<size_t>(counts[c], 1);
    m.weights[c] = static_cast<double>(cnt);
    for (size_t d = 0; d < dim; ++d) {
      m.variances(c, d) = counts[c] >= 2 ? m.variances(c, d) / static_cast<double>(counts[c])
                                         : global_var[d];
      m.variances(c, d) = std::max(m.variances(c, d), cfg.variance_floor);
    }
  }
  double total = 0.0;
  for (double w : m.weights) total += w;
  for (double &w : m.weights) w /= total;
  return m;
}

}  // namespace

void GmmModel::Check(double variance_floor) const {
  const size_t k = weights.size();
  if (k == 0) throw DataError("GMM has no components");
  if (means.NumRows() != k || variances.NumRows() != k ||
      variances.NumCols() != means.NumCols() || means.NumCols() == 0)
    throw DataError("GMM parameter shapes disagree");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DataError("GMM weight is negative or NaN");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("GMM weights do not sum to 1");
  for (double v : variances.Data())
    if (!(v >= variance_floor) || !(v > 0.0) || !std::isfinite(v))
      throw DataError("GMM variance below the floor");
  for (double mu : means.Data())
    if (!std::isfinite(mu)) throw DataError("GMM mean is not finite");
}

GmmTrainResult GmmTrain(const Matrix &frames, const GmmConfig &cfg, uint64_t seed) {
  const size_t n = frames.NumRows(), dim = frames.NumCols();
  if (n == 0 || dim == 0) throw std::invalid_argument("GmmTrain: empty input");
  if (cfg.n_components < 1 || static_cast<size_t>(cfg.n_components) > n)
    throw std::invalid_argument("GmmTrain: need 1 <= n_components <= frames");
  if (!(cfg.variance_floor > 0.0))
    throw std::invalid_argument("GmmTrain: variance floor must be positive");
  const auto k = static_cast<size_t>(cfg.n_components);

  Rng rng(seed);
  GmmTrainResult result;
  GmmModel &m = result.model;
  if (k == 1) {
    m.weights = {1.0};
    m.means = Matrix(1, dim);
    m.variances = Matrix(1, dim, 1.0);
  } else {
    m = InitialModel(frames, cfg, &rng);
  }
  const std::vector<double> global_var = GlobalVariance(frames, cfg.variance_floor);

  Matrix resp(n, k);
  std::vector<double> comp(k), frame_ll(n);
  auto e_step = [&]() {
    const std::vector<double> consts = ComponentConstants(m);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double lse = ComponentLogLikelihoods(m, consts, frames.Row(i), &comp);
      frame_ll[i] = lse;
      total += lse;
      for (size_t c = 0; c < k; ++c) resp(i, c) = std::exp(comp[c] - lse);
    }
    return total / static_cast<double>(n);
  };

  // A single component needs no initial guess: its first M-step is the
  // closed-form solution, so start with uniform responsibilities.
  bool have_resp = false;
  if (k == 1) {
    std::fill(resp.Data().begin(), resp.Data().end(), 1.0);
    have_resp = true;
  }

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (!have_resp) {
      const double ll = e_step();
      if (!result.log_likelihood.empty()) {
        const double prev = result.log_likelihood.back();
        result.log_likelihood.push_back(ll);
        if (std::abs(ll - prev) <= cfg.tol * std::abs(prev)) {
          result.converged = true;
          break;
        }
      } else {
        result.log_likelihood.push_back(ll);
      }
    }
    have_resp = false;
    ++result.iterations;

    // M-step.
    std::vector<double> nk(k, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < k; ++c) nk[c] += resp(i, c);
    for (size_t c = 0; c < k; ++c) {
      if (nk[c] <= 1e-10) {
        size_t worst = 0;
        for (size_t i = 1; i < n; ++i)
          if (frame_ll[i] < frame_ll[worst]) worst = i;
        LogWarning("GMM component " + std::to_string(c) +
                   " lost all responsibility; re-seeding it on frame " +
                   std::to_string(worst));
        ++result.reseeded_components;
        std::copy(frames.Row(worst).begin(), frames.Row(worst).end(), m.means.Row(c).begin());
        std::copy(global_var.begin(), global_var.end(), m.variances.Row(c).begin());
        m.weights[c] = 1.0 / static_cast<double>(n);
        frame_ll[worst] = std::numeric_limits<double>::infinity();
        continue;
      }
      m.weights[c] = nk[c] / static_cast<double>(n);
      auto mu = m.means.Row(c);
      std::fill(mu.begin(), mu.end(), 0.0);
      for (size_t i = 0; i < n; ++i) {
        const double r = resp(i, c);
        const double *x = frames.Row(i).data();
        for (size_t d = 0; d < dim; ++d) mu[d] += r * x[d];
      }
      for (double &v : mu) v /= nk[c];
      auto var = m.variances.Row(c);
      std::fill(var.begin(), var.end(), 0.0);
      for (size_t i = 0; i < n; ++i) {
        const double r = resp(i, c);
        const double *x = frames.Row(i).data();
        for (size_t d = 0; d < dim; ++d) var[d] += r * (x[d] - mu[d]) * (x[d] - mu[d]);
      }
      for (double &v : var) v = std::max(v / nk[c], cfg.variance_floor);
    }
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    if (wsum != 1.0)
      for (double &w : m.weights) w /= wsum;
  }
  if (!result.converged) result.log_likelihood.push_back(e_step());
  return result;
}

double GmmFrameLogLikelihood(const GmmModel &model, std::span<const double> frame) {
  if (frame.size() != model.Dim())
    throw DataError("frame dimension " + std::to_string(frame.size()) +
                    " does not match GMM dimension " + std::to_string(model.Dim()));
  std::vector<double> comp(model.NumComponents());
  return ComponentLogLikelihoods(model, ComponentConstants(model), frame, &comp);
}

double GmmMeanLogLikelihood(const GmmModel &model, const Matrix &frames) {
  if (frames.NumRows() == 0) throw std::invalid_argument("no frames to score");
  if (frames.NumCols() != model.Dim())
    throw DataError("frame dimension " + std::to_string(frames.NumCols()) +
                    " does not match GMM dimension " + std::to_string(model.Dim()));
  const std::vector<double> consts = ComponentConstants(model);
  std::vector<double> comp(model.NumComponents());
  double total = 0.0;
  for (size_t i = 0; i < frames.NumRows(); ++i)
    total += ComponentLogLikelihoods(model, consts, frames.Row(i), &comp);
  return total / static_cast<double>(frames.NumRows());
}

double GmmLlrScore(const GmmModel &bonafide, const GmmModel &spoof,
                   const FeatureMatrix &features) {
  if (bonafide.Dim() != spoof.Dim())
    throw DataError("bonafide and spoof models have different dimensions");
  if (features.FreqDim() != bonafide.Dim())
    throw DataError("feature dimension " + std::to_string(features.FreqDim()) +
                    " does not match model dimension " + std::to_string(bonafide.Dim()));
  const Matrix frames = PoolFeatures(features);
  const std::vector<double> cb = ComponentConstants(bonafide);
  const std::vector<double> cs = ComponentConstants(spoof);
  std::vector<double> comp_b(bonafide.NumComponents()), comp_s(spoof.NumComponents());
  double total = 0.0;
  for (size_t i = 0; i < frames.NumRows(); ++i) {
    const double lb = ComponentLogLikelihoods(bonafide, cb, frames.Row(i), &comp_b);
    const double ls = ComponentLogLikelihoods(spoof, cs, frames.Row(i), &comp_s);
    total += lb - ls;
  }
  return total / static_cast<double>(frames.NumRows());
}

Matrix PoolFeatures(const FeatureMatrix &m) {
  if (m.values.Empty()) throw std::invalid_argument("PoolFeatures: empty matrix");
  return m.values.Transpose();
}

std::vector<uint8_t> EncodeGmm(const GmmModel &model) {
  model.Check();
  std::vector<uint8_t> out(kMagic, kMagic + 4);
  auto put_u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  };
  auto put_f64 = [&](double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
  };
  put_u32(kVersion);
  put_u32(static_cast<uint32_t>(model.NumComponents()));
  put_u32(static_cast<uint32_t>(model.Dim()));
  for (double w : model.weights) put_f64(w);
  for (double v : model.means.Data()) put_f64(v);
  for (double v : model.variances.Data()) put_f64(v);
  return out;
}

GmmModel DecodeGmm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw DataError("not a GMM model file");
  auto get_u32 = [&](size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[off + i]) << (8 * i);
    return v;
  };
  if (get_u32(4) != kVersion)
    throw DataError("unsupported GMM file version " + std::to_string(get_u32(4)));
  const size_t k = get_u32(8), dim = get_u32(12);
  const size_t count = k + 2 * k * dim;
  if (bytes.size() != 16 + 8 * count) throw DataError("GMM file has the wrong size");
  size_t off = 16;
  auto get_f64 = [&]() {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(bytes[off + i]) << (8 * i);
    off += 8;
    return std::bit_cast<double>(bits);
  };
  GmmModel m;
  m.weights.resize(k);
  for (double &w : m.weights) w = get_f64();
  m.means = Matrix(k, dim);
  for (double &v : m.means.Data()) v = get_f64();
  m.variances = Matrix(k, dim);
  for (double &v : m.variances.Data()) v = get_f64();
  m.Check();
  return m;
}

void WriteGmm(const GmmModel &model, const std::filesystem::path &path) {
  WriteFileBytes(EncodeGmm(model), path);
}

GmmModel ReadGmm(const std::filesystem::path &path) {
  return DecodeGmm(ReadFileBytes(path));
}

}  // namespace antispoof
