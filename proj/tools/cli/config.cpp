#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bargzero/model.hpp"

namespace bargzero::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const char* begin = s.data();
  if (begin != end && *begin == '+') ++begin;
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end) throw UsageError("'" + key + "': expected a number, got '" + s + "'");
  return v;
}

long parse_integer(const std::string& key, const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const char* begin = s.data();
  if (begin != end && *begin == '+') ++begin;
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end) throw UsageError("'" + key + "': expected an integer, got '" + s + "'");
  return v;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": missing '='");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) {
  return values_.try_emplace(key, fallback).first->second;
}

double RunConfig::real(const std::string& key, double fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    values_[key] = format_decimal(fallback);
    return fallback;
  }
  return parse_real(key, it->second);
}

long RunConfig::integer(const std::string& key, long fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    values_[key] = std::to_string(fallback);
    return fallback;
  }
  return parse_integer(key, it->second);
}

bool RunConfig::boolean(const std::string& key, bool fallback) {
  const auto v = text(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("'" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> RunConfig::reals(const std::string& key, const std::string& fallback) {
  std::vector<double> out;
  for (const auto& s : split(text(key, fallback), ',')) out.push_back(parse_real(key, s));
  return out;
}

std::vector<long> RunConfig::integers(const std::string& key, const std::string& fallback) {
  std::vector<long> out;
  for (const auto& s : split(text(key, fallback), ',')) out.push_back(parse_integer(key, s));
  return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key, const std::string& fallback) {
  return split(text(key, fallback), ',');
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace bargzero::cli
