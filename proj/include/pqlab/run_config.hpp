#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pqlab {

/// Flat key = value settings. Lines starting with '#' are comments. Keys use
/// the long CLI flag names without dashes ("p", "lambda-mult", "r-schedule").
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  /// Comma-separated numbers; "a..b" expands to a, 2a, 4a, ..., b.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Sorted "key=value" lines.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), 16 hex digits.
  std::string hash_hex() const;

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& key, const std::string& text);
std::vector<double> parse_list(const std::string& key, const std::string& text);

}  // namespace pqlab
