#pragma once

// Flat key=value run configuration. Every getter records the value it
// returns, so the map ends up holding the effective configuration of a run.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bargzero::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunConfig {
 public:
  /// Lines of `key = value`; '#' starts a comment. Throws UsageError.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback);
  double real(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  bool boolean(const std::string& key, bool fallback);
  std::vector<double> reals(const std::string& key, const std::string& fallback);
  std::vector<long> integers(const std::string& key, const std::string& fallback);
  std::vector<std::string> texts(const std::string& key, const std::string& fallback);

  /// Sorted key = value lines.
  std::string serialize() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_real(const std::string& key, const std::string& s);
long parse_integer(const std::string& key, const std::string& s);
/// Trimmed fields; empty fields are dropped.
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace bargzero::cli
