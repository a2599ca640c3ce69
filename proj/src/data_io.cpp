#include "myula/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "myula/config.hpp"
#include "myula/errors.hpp"

namespace myula {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return buf.str();
}

namespace {

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t last_line = 0;
};

NumericTable parse_table(const std::string& text) {
  NumericTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line(text.data() + pos, (eol == std::string::npos ? text.size() : eol) - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (t.header.empty()) {
      for (const auto c : cells) t.header.emplace_back(c);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(ParseErrorKind::RaggedRow, line_no,
                       "expected " + std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      try {
        v = parse_real(cells[j]);
      } catch (const std::invalid_argument&) {
        throw ParseError(ParseErrorKind::NonNumeric, line_no,
                         "non-numeric cell '" + std::string(cells[j]) + "' in column '" + t.header[j] + "'");
      }
      if (!std::isfinite(v))
        throw ParseError(ParseErrorKind::NonNumeric, line_no, "non-finite cell in column '" + t.header[j] + "'");
      row[j] = v;
    }
    t.rows.push_back(std::move(row));
  }
  t.last_line = line_no;
  if (t.header.empty()) throw ParseError(ParseErrorKind::Empty, 1, "missing header row");
  return t;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& target_column) {
  auto [header, rows, last_line] = parse_table(text);
  std::size_t target = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == target_column) target = j;
  if (target == header.size())
    throw ParseError(ParseErrorKind::MissingTarget, 1, "target column '" + target_column + "' not in header");
  if (rows.empty()) throw ParseError(ParseErrorKind::Empty, last_line + 1, "no data rows");
  if (header.size() < 2) throw ParseError(ParseErrorKind::MissingTarget, 1, "no feature columns besides the target");

  Dataset ds;
  ds.target_name = target_column;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  ds.x.resize(n, d);
  ds.y.resize(n);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != target) ds.feature_names.push_back(header[j]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == target)
        ds.y[i] = row[j];
      else
        ds.x(i, col++) = row[j];
    }
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  return parse_csv(read_file(path), target_column);
}

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_out(path);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.target_name << '\n';
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << format_real(ds.x(i, j)) << ',';
    out << format_real(ds.y[i]) << '\n';
  }
  finish(out, path);
}

Dataset standardize(const Dataset& ds) {
  const auto n = ds.x.rows();
  if (n < 2) throw InvalidModel("standardisation needs at least two rows");
  Dataset out = ds;
  for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
    auto col = out.x.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw InvalidModel("column '" + ds.feature_names.at(static_cast<std::size_t>(j)) + "' is constant");
    col /= sd;
    col.array() -= col.mean();
  }
  out.y.array() -= out.y.mean();
  out.standardized = true;
  return out;
}

OlsFit ols(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw InvalidModel("design rows and response length differ");
  if (x.rows() < x.cols()) throw InvalidModel("OLS needs at least as many rows as columns");
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < x.cols())
    throw InvalidModel("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                       std::to_string(x.cols()) + ")");
  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.l1_norm = fit.beta.lpNorm<1>();
  return fit;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  finish(out, path);
}

void write_samples_csv(const std::filesystem::path& path, const Matrix& samples) {
  auto out = open_out(path);
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << format_real(samples(i, j));
    out << '\n';
  }
  finish(out, path);
}

Matrix read_samples_csv(const std::filesystem::path& path) {
  const auto table = parse_table(read_file(path));
  Matrix m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ofstream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated sample file " + path.string());
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'M', 'Y', 'U', '1'};

}  // namespace

void write_samples_binary(const std::filesystem::path& path, const Matrix& samples) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic, 4);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(samples.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(samples.cols()));
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    for (Eigen::Index j = 0; j < samples.cols(); ++j) put_le<double>(out, samples(i, j));
  finish(out, path);
}

Matrix read_samples_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path.string() + " is not a MYU1 sample file");
  const auto rows = get_le<std::uint64_t>(in, path);
  const auto cols = get_le<std::uint64_t>(in, path);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get_le<double>(in, path);
  return m;
}

void write_manifest(const std::filesystem::path& path, const std::map<std::string, std::string>& entries) {
  auto out = open_out(path);
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
  finish(out, path);
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
  try {
    return Config::parse(read_file(path)).entries();
  } catch (const ConfigError& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace myula
