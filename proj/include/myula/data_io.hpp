#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "myula/convex_body.hpp"

namespace myula {

enum class ParseErrorKind { Empty, RaggedRow, NonNumeric, MissingTarget };

/// CSV content error. `line` is 1-based and counts the header.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what);
  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  std::string target_name;
  bool standardized = false;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(x.cols()); }
};

/// Comma-separated numeric table with a mandatory header row; every column
/// other than `target_column` becomes a feature.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column);
Dataset parse_csv(const std::string& text, const std::string& target_column);
/// Features first, target last, shortest round-trip decimals.
void save_csv(const std::filesystem::path& path, const Dataset& ds);

/// Columns centred to mean 0 with unit sample variance; Y centred.
/// Throws InvalidModel for a constant column.
Dataset standardize(const Dataset& ds);

struct OlsFit {
  Vector beta;
  double l1_norm;
};
/// Least squares by column-pivoted QR. Throws InvalidModel when X lacks full
/// column rank.
OlsFit ols(const Matrix& x, const Vector& y);
inline OlsFit ols(const Dataset& ds) { return ols(ds.x, ds.y); }

/// Writes `header` then one line per row, cells formatted with format_real.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
/// Header x1..xd, one draw per line.
void write_samples_csv(const std::filesystem::path& path, const Matrix& samples);
/// "MYU1", u64 rows, u64 cols, little-endian doubles in row-major order.
void write_samples_binary(const std::filesystem::path& path, const Matrix& samples);
Matrix read_samples_binary(const std::filesystem::path& path);
Matrix read_samples_csv(const std::filesystem::path& path);

/// Sorted `key=value` lines.
void write_manifest(const std::filesystem::path& path, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

/// Whole file as bytes; throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace myula
