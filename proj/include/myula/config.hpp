#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace myula {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key=value` configuration. `[section]` headers prefix the following
/// keys with `section.`; `#` starts a comment. Later keys override earlier ones.
class Config {
 public:
  Config() = default;
  explicit Config(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  Eigen::VectorXd get_vector(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Sorted `key=value` lines; the input to `hash`.
  std::string canonical_text() const;
  /// FNV-1a 64 of the canonical text.
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> entries_;
};

double parse_real(std::string_view text);
std::uint64_t parse_u64(std::string_view text);
/// Comma-separated reals, e.g. "-1,-1.5,2".
std::vector<double> parse_real_list(std::string_view text);
Eigen::VectorXd parse_vector(std::string_view text);

/// Shortest round-trip decimal representation of a double.
std::string format_real(double value);
std::string format_vector(const Eigen::VectorXd& v);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace myula
