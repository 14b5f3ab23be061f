// antispoof/src/metrics.cc

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

#include "antispoof/metrics.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "antispoof/common.h"

namespace antispoof {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void RequireBothClasses(std::span<const double> bonafide, std::span<const double> spoof) {
  if (bonafide.empty() || spoof.empty())
    throw DataError("metric needs both bonafide and spoof trials (got " +
                    std::to_string(bonafide.size()) + " bonafide, " +
                    std::to_string(spoof.size()) + " spoof)");
  for (double s : bonafide)
    if (!std::isfinite(s)) throw DataError("non-finite bonafide score");
  for (double s : spoof)
    if (!std::isfinite(s)) throw DataError("non-finite spoof score");
}

std::string ReadText(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string &text, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

// Score matrix [utterance x system] aligned on the first system's order.
std::vector<std::vector<double>> AlignSystems(
    const std::vector<std::vector<ScoreRecord>> &systems) {
  if (systems.empty()) throw UsageError("fusion needs at least one system");
  const auto &first = systems.front();
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < first.size(); ++i)
    if (!index.emplace(first[i].utt_id, i).second)
      throw DataError("duplicate utterance " + first[i].utt_id + " in system 0");
  std::vector<std::vector<double>> rows(first.size(), std::vector<double>(systems.size()));
  for (size_t s = 0; s < systems.size(); ++s) {
    if (systems[s].size() != first.size())
      throw DataError("system " + std::to_string(s) + " has " +
                      std::to_string(systems[s].size()) + " scores, system 0 has " +
                      std::to_string(first.size()));
    std::vector<bool> seen(first.size(), false);
    for (const ScoreRecord &r : systems[s]) {
      auto it = index.find(r.utt_id);
      if (it == index.end())
        throw DataError("utterance " + r.utt_id + " of system " + std::to_string(s) +
                        " is missing from system 0");
      if (seen[it->second])
        throw DataError("duplicate utterance " + r.utt_id + " in system " +
                        std::to_string(s));
      seen[it->second] = true;
      rows[it->second][s] = r.score;
    }
  }
  return rows;
}

}  // namespace

std::string TrialKeyName(TrialKey key) {
  return key == TrialKey::kBonafide ? "bonafide" : "spoof";
}

TrialKey ParseTrialKey(const std::string &s) {
  if (s == "bonafide") return TrialKey::kBonafide;
  if (s == "spoof") return TrialKey::kSpoof;
  throw DataError("unknown key '" + s + "' (expected bonafide or spoof)");
}

std::vector<OperatingPoint> DetCurve(std::span<const double> bonafide,
                                     std::span<const double> spoof) {
  RequireBothClasses(bonafide, spoof);
  std::vector<double> b(bonafide.begin(), bonafide.end());
  std::vector<double> s(spoof.begin(), spoof.end());
  std::sort(b.begin(), b.end());
  std::sort(s.begin(), s.end());
  std::vector<double> thresholds;
  thresholds.reserve(b.size() + s.size() + 1);
  std::merge(b.begin(), b.end(), s.begin(), s.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(kInf);

  const double nb = static_cast<double>(b.size()), ns = static_cast<double>(s.size());
  std::vector<OperatingPoint> points;
  points.reserve(thresholds.size());
  size_t ib = 0, is = 0;
  for (double t : thresholds) {
    while (ib < b.size() && b[ib] < t) ++ib;
    while (is < s.size() && s[is] < t) ++is;
    points.push_back({t, static_cast<double>(ib) / nb,
                      static_cast<double>(s.size() - is) / ns});
  }
  return points;
}

EerResult ComputeEer(std::span<const double> bonafide, std::span<const double> spoof) {
  const std::vector<OperatingPoint> pts = DetCurve(bonafide, spoof);
  EerResult r;
  for (size_t k = 0; k < pts.size(); ++k) {
    const double d = pts[k].p_miss - pts[k].p_fa;
    if (d < 0.0) continue;
    if (d == 0.0 || k == 0) {
      r.eer_pct = 100.0 * pts[k].p_miss;
      r.threshold = std::isfinite(pts[k].threshold) ? pts[k].threshold
                                                    : pts[k - 1].threshold;
    } else {
      const OperatingPoint &a = pts[k - 1], &c = pts[k];
      const double da = a.p_miss - a.p_fa;
      const double t = -da / (d - da);
      r.eer_pct = 100.0 * (a.p_miss + t * (c.p_miss - a.p_miss));
      r.threshold = std::isfinite(c.threshold)
                        ? a.threshold + t * (c.threshold - a.threshold)
                        : a.threshold;
    }
    break;
  }
  r.polarity_warning = r.eer_pct > 50.0;
  return r;
}

void TdcfCosts::Check() const {
  for (double c : {c_miss, c_fa, c_fa_spoof})
    if (!(c > 0.0)) throw UsageError("t-DCF costs must be positive");
  for (double p : {pi_spoof, pi_target, pi_nontarget, asv_pmiss, asv_pfa, asv_pmiss_spoof})
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("t-DCF probabilities must lie in [0, 1]");
}

TdcfCosts TdcfCosts::FromConfig(const KeyValueConfig &cfg) {
  TdcfCosts c;
  c.c_miss = cfg.GetDouble("tdcf.c_miss", c.c_miss);
  c.c_fa = cfg.GetDouble("tdcf.c_fa", c.c_fa);
  c.c_fa_spoof = cfg.GetDouble("tdcf.c_fa_spoof", c.c_fa_spoof);
  c.pi_spoof = cfg.GetDouble("tdcf.pi_spoof", c.pi_spoof);
  c.pi_target = cfg.GetDouble("tdcf.pi_target", c.pi_target);
  c.pi_nontarget = cfg.GetDouble("tdcf.pi_nontarget", c.pi_nontarget);
  c.asv_pmiss = cfg.GetDouble("tdcf.asv_pmiss", c.asv_pmiss);
  c.asv_pfa = cfg.GetDouble("tdcf.asv_pfa", c.asv_pfa);
  c.asv_pmiss_spoof = cfg.GetDouble("tdcf.asv_pmiss_spoof", c.asv_pmiss_spoof);
  c.Check();
  return c;
}

TdcfCoefficients ComputeTdcfCoefficients(const TdcfCosts &costs) {
  costs.Check();
  TdcfCoefficients k;
  k.c0 = costs.pi_target * costs.c_miss * costs.asv_pmiss +
         costs.pi_nontarget * costs.c_fa * costs.asv_pfa;
  k.c1 = costs.pi_target * costs.c_miss - k.c0;
  k.c2 = costs.pi_spoof * costs.c_fa_spoof * (1.0 - costs.asv_pmiss_spoof);
  if (!(k.c1 > 0.0) || !(k.c2 > 0.0))
    throw UsageError("degenerate t-DCF costs: C1 and C2 must be positive");
  return k;
}

TdcfResult ComputeMinTdcf(std::span<const double> bonafide, std::span<const double> spoof,
                          const TdcfCosts &costs) {
  const TdcfCoefficients k = ComputeTdcfCoefficients(costs);
  const std::vector<OperatingPoint> pts = DetCurve(bonafide, spoof);
  const double norm = k.Default();
  TdcfResult r{kInf, 0.0};
  for (const OperatingPoint &p : pts) {
    const double v = (k.c0 + k.c1 * p.p_miss + k.c2 * p.p_fa) / norm;
    if (v < r.min_tdcf) {
      r.min_tdcf = v;
      r.threshold = p.threshold;
    }
  }
  return r;
}

void SplitScores(const std::vector<ScoreRecord> &scores,
                 const std::vector<TrialRecord> &trials, std::vector<double> *bonafide,
                 std::vector<double> *spoof) {
  std::unordered_map<std::string, double> by_utt;
  for (const ScoreRecord &s : scores)
    if (!by_utt.emplace(s.utt_id, s.score).second)
      throw DataError("duplicate score for utterance " + s.utt_id);
  bonafide->clear();
  spoof->clear();
  size_t matched = 0;
  for (const TrialRecord &t : trials) {
    auto it = by_utt.find(t.utt_id);
    if (it == by_utt.end()) throw DataError("no score for trial " + t.utt_id);
    ++matched;
    (t.key == TrialKey::kBonafide ? bonafide : spoof)->push_back(it->second);
  }
  if (matched < by_utt.size())
    LogWarning(std::to_string(by_utt.size() - matched) +
               " scored utterances have no trial and were ignored");
}

EerResult Eer(const std::vector<ScoreRecord> &scores, const std::vector<TrialRecord> &trials) {
  std::vector<double> b, s;
  SplitScores(scores, trials, &b, &s);
  return ComputeEer(b, s);
}

TdcfResult MinTdcf(const std::vector<ScoreRecord> &scores,
                   const std::vector<TrialRecord> &trials, const TdcfCosts &costs) {
  std::vector<double> b, s;
  SplitScores(scores, trials, &b, &s);
  return ComputeMinTdcf(b, s, costs);
}

std::vector<ScoreRecord> FuseWeighted(const std::vector<std::vector<ScoreRecord>> &systems,
                                      std::span<const double> weights) {
  const auto rows = AlignSystems(systems);
  if (weights.size() != systems.size())
    throw UsageError("one fusion weight per system required");
  std::vector<ScoreRecord> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (size_t j = 0; j < weights.size(); ++j) s += weights[j] * rows[i][j];
    out[i] = {systems.front()[i].utt_id, s};
  }
  return out;
}

std::vector<ScoreRecord> FuseMean(const std::vector<std::vector<ScoreRecord>> &systems) {
  const auto rows = AlignSystems(systems);
  std::vector<ScoreRecord> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    // Running mean: identical inputs reproduce the input exactly.
    double m = 0.0;
    for (size_t j = 0; j < rows[i].size(); ++j)
      m += (rows[i][j] - m) / static_cast<double>(j + 1);
    out[i] = {systems.front()[i].utt_id, m};
  }
  return out;
}

std::string FusionObjectiveName(FusionObjective o) {
  return o == FusionObjective::kEer ? "eer" : "min_tdcf";
}

FusionObjective ParseFusionObjective(const std::string &s) {
  if (s == "eer") return FusionObjective::kEer;
  if (s == "min_tdcf" || s == "tdcf") return FusionObjective::kMinTdcf;
  throw UsageError("unknown fusion objective '" + s + "' (eer or min_tdcf)");
}

std::vector<std::vector<double>> SimplexGrid(size_t num_systems, double step) {
  if (num_systems == 0) throw UsageError("fusion grid needs at least one system");
  if (!(step > 0.0 && step <= 1.0)) throw UsageError("grid step must be in (0, 1]");
  const double inv = 1.0 / step;
  const long total = std::lround(inv);
  if (std::abs(inv - static_cast<double>(total)) > 1e-9 * inv)
    throw UsageError("grid step must divide 1 evenly");
  std::vector<std::vector<double>> grid;
  std::vector<long> parts(num_systems, 0);
  // Lexicographic enumeration of compositions of `total` into num_systems
  // non-negative parts, smallest first.
  std::function<void(size_t, long)> rec = [&](size_t pos, long left) {
    if (pos + 1 == num_systems) {
      parts[pos] = left;
      std::vector<double> w(num_systems);
      for (size_t i = 0; i < num_systems; ++i)
        w[i] = static_cast<double>(parts[i]) / static_cast<double>(total);
      grid.push_back(std::move(w));
      return;
    }
    for (long v = 0; v <= left; ++v) {
      parts[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
  return grid;
}

WeightedFusionResult FuseWeightedGrid(const std::vector<std::vector<ScoreRecord>> &systems,
                                      const std::vector<TrialRecord> &dev_trials,
                                      double grid_step, FusionObjective objective,
                                      const TdcfCosts &costs) {
  if (systems.size() < 2) throw UsageError("weighted fusion needs at least two systems");
  const auto rows = AlignSystems(systems);
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < systems.front().size(); ++i) index[systems.front()[i].utt_id] = i;

  std::vector<const std::vector<double> *> bona_rows, spoof_rows;
  for (const TrialRecord &t : dev_trials) {
    auto it = index.find(t.utt_id);
    if (it == index.end()) throw DataError("no score for development trial " + t.utt_id);
    (t.key == TrialKey::kBonafide ? bona_rows : spoof_rows).push_back(&rows[it->second]);
  }

  const auto grid = SimplexGrid(systems.size(), grid_step);
  std::vector<double> b(bona_rows.size()), s(spoof_rows.size());
  auto fuse = [](const std::vector<double> &row, const std::vector<double> &w) {
    double v = 0.0;
    for (size_t j = 0; j < w.size(); ++j) v += w[j] * row[j];
    return v;
  };
  WeightedFusionResult best;
  best.objective = kInf;
  for (const auto &w : grid) {
    for (size_t i = 0; i < b.size(); ++i) b[i] = fuse(*bona_rows[i], w);
    for (size_t i = 0; i < s.size(); ++i) s[i] = fuse(*spoof_rows[i], w);
    const double v = objective == FusionObjective::kEer ? ComputeEer(b, s).eer_pct
                                                        : ComputeMinTdcf(b, s, costs).min_tdcf;
    if (v < best.objective) {
      best.objective = v;
      best.weights = w;
    }
  }
  best.fused = FuseWeighted(systems, best.weights);
  return best;
}

std::vector<TrialRecord> ParseProtocol(const std::string &text, bool strict,
                                       const std::string &origin) {
  std::vector<TrialRecord> trials;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (f.size() < 5 || (f[4] != "bonafide" && f[4] != "spoof")) {
      const std::string msg = where + ": malformed protocol line '" + Trim(line) + "'";
      if (strict) throw DataError(msg);
      LogWarning(msg + " (skipped)");
      continue;
    }
    TrialRecord t;
    t.speaker_id = f[0];
    t.utt_id = f[1];
    if (f[2] != "-") t.condition = f[2];
    if (f[3] != "-") t.attack_id = f[3];
    t.key = ParseTrialKey(f[4]);
    if (!seen.insert(t.utt_id).second)
      throw DataError(where + ": duplicate utterance id " + t.utt_id);
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<TrialRecord> ReadProtocol(const std::filesystem::path &path, bool strict) {
  return ParseProtocol(ReadText(path), strict, path.string());
}

void WriteProtocol(const std::vector<TrialRecord> &trials, const std::filesystem::path &path) {
  std::string out;
  for (const TrialRecord &t : trials)
    out += t.speaker_id + " " + t.utt_id + " " + t.condition.value_or("-") + " " +
           t.attack_id.value_or("-") + " " + TrialKeyName(t.key) + "\n";
  WriteText(out, path);
}

std::vector<ScoreRecord> ParseScores(const std::string &text, bool strict,
                                     const std::string &origin) {
  std::vector<ScoreRecord> scores;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    double v = 0.0;
    bool ok = f.size() == 2;
    if (ok) {
      char *end = nullptr;
      v = std::strtod(f[1].c_str(), &end);
      ok = end != f[1].c_str() && *end == '\0' && std::isfinite(v);
    }
    if (!ok) {
      const std::string msg = where + ": malformed score line '" + Trim(line) + "'";
      if (strict) throw DataError(msg);
      LogWarning(msg + " (skipped)");
      continue;
    }
    if (!seen.insert(f[0]).second) throw DataError(where + ": duplicate utterance id " + f[0]);
    scores.push_back({f[0], v});
  }
  return scores;
}

std::vector<ScoreRecord> ReadScores(const std::filesystem::path &path, bool strict) {
  return ParseScores(ReadText(path), strict, path.string());
}

std::string FormatScores(const std::vector<ScoreRecord> &scores) {
  std::string out;
  char buf[64];
  for (const ScoreRecord &s : scores) {
    if (!std::isfinite(s.score)) throw DataError("non-finite score for " + s.utt_id);
    std::snprintf(buf, sizeof(buf), " %.6f\n", s.score);
    out += s.utt_id;
    out += buf;
  }
  return out;
}

void WriteScores(const std::vector<ScoreRecord> &scores, const std::filesystem::path &path) {
  WriteText(FormatScores(scores), path);
}

std::vector<ConditionRow> ConditionReport(const std::vector<ScoreRecord> &scores,
                                          const std::vector<TrialRecord> &trials,
                                          const TdcfCosts &costs) {
  std::unordered_map<std::string, double> by_utt;
  for (const ScoreRecord &s : scores)
    if (!by_utt.emplace(s.utt_id, s.score).second)
      throw DataError("duplicate score for utterance " + s.utt_id);
  if (by_utt.size() > trials.size())
    LogWarning(std::to_string(by_utt.size() - trials.size()) +
               " or more scored utterances have no trial and were ignored");

  auto make_row = [&](const std::string &name, const std::vector<const TrialRecord *> &subset) {
    std::vector<double> b, s;
    for (const TrialRecord *t : subset) {
      auto it = by_utt.find(t->utt_id);
      if (it == by_utt.end()) throw DataError("no score for trial " + t->utt_id);
      (t->key == TrialKey::kBonafide ? b : s).push_back(it->second);
    }
    ConditionRow row;
    row.condition = name;
    row.n_bonafide = b.size();
    row.n_spoof = s.size();
    if (!b.empty() && !s.empty()) {
      row.eer_pct = ComputeEer(b, s).eer_pct;
      row.min_tdcf = ComputeMinTdcf(b, s, costs).min_tdcf;
    }
    return row;
  };

  std::map<std::string, std::vector<const TrialRecord *>> groups;
  std::vector<const TrialRecord *> all;
  for (const TrialRecord &t : trials) {
    groups[t.condition.value_or("-")].push_back(&t);
    all.push_back(&t);
  }
  std::vector<ConditionRow> rows;
  for (const auto &[name, subset] : groups) rows.push_back(make_row(name, subset));
  rows.push_back(make_row("pooled", all));
  return rows;
}

std::string FormatConditionCsv(const std::vector<ConditionRow> &rows) {
  std::string out = "condition,n_bonafide,n_spoof,eer_pct,min_tdcf\n";
  char buf[64];
  for (const ConditionRow &r : rows) {
    out += r.condition + "," + std::to_string(r.n_bonafide) + "," +
           std::to_string(r.n_spoof) + ",";
    if (r.eer_pct) {
      std::snprintf(buf, sizeof(buf), "%.4f", *r.eer_pct);
      out += buf;
    } else {
      out += "N/A";
    }
    out += ",";
    if (r.min_tdcf) {
      std::snprintf(buf, sizeof(buf), "%.6f", *r.min_tdcf);
      out += buf;
    } else {
      out += "N/A";
    }
    out += "\n";
  }
  return out;
}

}  // namespace antispoof
