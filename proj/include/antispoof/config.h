// antispoof/include/antispoof/config.h

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

// Key-value configuration files.  One "key = value" per line; '#' starts a
// comment when it is the first non-blank character of a line; blank lines
// are ignored; later assignments override earlier ones.  Keys are dotted
// names such as "codec.mp3.encode" or "tdcf.pi_spoof".

#ifndef ANTISPOOF_CONFIG_H_
#define ANTISPOOF_CONFIG_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace antispoof {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  /// Throws UsageError on unreadable files or lines without '='.
  static KeyValueConfig Load(const std::filesystem::path &path);
  static KeyValueConfig Parse(const std::string &text,
                              const std::string &origin = "<string>");

  void Set(const std::string &key, const std::string &value) { values_[key] = value; }
  bool Has(const std::string &key) const { return values_.count(key) > 0; }

  std::optional<std::string> Get(const std::string &key) const;
  std::string GetString(const std::string &key, const std::string &def) const;
  double GetDouble(const std::string &key, double def) const;
  long GetInt(const std::string &key, long def) const;
  /// Comma-separated list of numbers.
  std::vector<double> GetDoubleList(const std::string &key,
                                    const std::vector<double> &def) const;

  /// Keys starting with `prefix`, in sorted order.
  std::vector<std::string> KeysWithPrefix(const std::string &prefix) const;

  const std::map<std::string, std::string> &Values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace antispoof

#endif  // ANTISPOOF_CONFIG_H_
