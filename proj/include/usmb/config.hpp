// SPDX-License-Identifier: Apache-2.0
//
// Flat "key = value" pipeline configuration. Every key is declared up front
// with a default and a one-line description; unknown keys are rejected.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace usmb {

class PipelineConfig {
 public:
  struct Entry {
    std::string value;
    std::string default_value;
    std::string description;
  };

  /// All keys at their documented defaults.
  PipelineConfig();

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  /// Throws Parse for an unknown key.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Applies "key = value" lines; '#' starts a comment.
  void merge_text(const std::string& text);
  void merge_file(const std::string& path);

  /// Every key with its resolved value, sorted, one per line, commented with
  /// its description. Parses back to the same configuration.
  std::string to_text() const;

  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

 private:
  void declare(const std::string& key, const std::string& value, const std::string& doc);
  std::map<std::string, Entry> entries_;
};

}  // namespace usmb
