// antispoof/src/config.cc

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

#include "antispoof/config.h"

#include <fstream>
#include <sstream>

#include "antispoof/common.h"

namespace antispoof {

KeyValueConfig KeyValueConfig::Parse(const std::string &text,
                                     const std::string &origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty())
      throw UsageError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = Trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::Get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string &key,
                                      const std::string &def) const {
  return Get(key).value_or(def);
}

double KeyValueConfig::GetDouble(const std::string &key, double def) const {
  auto v = Get(key);
  if (!v) return def;
  try {
    size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception &) {
    throw UsageError("config key " + key + ": not a number: '" + *v + "'");
  }
}

long KeyValueConfig::GetInt(const std::string &key, long def) const {
  auto v = Get(key);
  if (!v) return def;
  try {
    size_t used = 0;
    long d = std::stol(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception &) {
    throw UsageError("config key " + key + ": not an integer: '" + *v + "'");
  }
}

std::vector<double> KeyValueConfig::GetDoubleList(
    const std::string &key, const std::vector<double> &def) const {
  auto v = Get(key);
  if (!v) return def;
  std::vector<double> out;
  std::stringstream ss(*v);
  for (std::string item; std::getline(ss, item, ',');) {
    const std::string t = Trim(item);
    if (t.empty()) continue;
    try {
      out.push_back(std::stod(t));
    } catch (const std::exception &) {
      throw UsageError("config key " + key + ": bad list entry '" + t + "'");
    }
  }
  return out;
}

std::vector<std::string> KeyValueConfig::KeysWithPrefix(
    const std::string &prefix) const {
  std::vector<std::string> out;
  for (auto it = values_.lower_bound(prefix);
       it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it)
    out.push_back(it->first);
  return out;
}

}  // namespace antispoof
