#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "myula/config.hpp"
#include "myula/data_io.hpp"
#include "myula/errors.hpp"
#include "oracles.hpp"

using namespace myula;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("myula_test_data_io_" + name);
  fs::remove_all(dir);
  return dir;
}

ParseError parse_failure(const std::string& text, const std::string& target) {
  try {
    parse_csv(text, target);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(ParseErrorKind::Empty, 0, "");
}

}  // namespace

TEST_CASE("parse a small table") {
  const auto ds = parse_csv("a,b,y\n1,2,3\n4,5,6\n7,8,9.5\n", "y");
  CHECK(ds.x.rows() == 3);
  CHECK(ds.x.cols() == 2);
  CHECK(ds.y.size() == 3);
  CHECK(ds.y[2] == 9.5);
  CHECK(ds.x(1, 1) == 5.0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.target_name == "y");

  const auto mid = parse_csv("a,y,b\n1,2,3\n4,5,6\n", "y");
  CHECK(mid.x(0, 1) == 3.0);
  CHECK(mid.y[1] == 5.0);
}

TEST_CASE("parse errors carry kind and line") {
  const auto bad = parse_failure("a,b,y\n1,2,3\n1,2,3\n1,2,3\n1,2,3\n1,2,3\nx,2,3\n", "y");
  CHECK(bad.kind() == ParseErrorKind::NonNumeric);
  CHECK(bad.line() == 7);
  CHECK(std::string(bad.what()).find("line 7") != std::string::npos);

  const auto ragged = parse_failure("a,b,y\n1,2,3\n1,2\n", "y");
  CHECK(ragged.kind() == ParseErrorKind::RaggedRow);
  CHECK(ragged.line() == 3);

  CHECK(parse_failure("a,b,z\n1,2,3\n", "y").kind() == ParseErrorKind::MissingTarget);
  CHECK(parse_failure("", "y").kind() == ParseErrorKind::Empty);
  CHECK(parse_failure("a,y\n", "y").kind() == ParseErrorKind::Empty);
  CHECK(parse_failure("a,y\n1,\n", "y").kind() == ParseErrorKind::NonNumeric);
  CHECK(parse_failure("a,y\n1,nan\n", "y").kind() == ParseErrorKind::NonNumeric);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "y"), IoError);
}

TEST_CASE("diabetes data") {
  const auto ds = load_csv(fs::path(MYULA_DATA_DIR) / "diabetes.csv", "y");
  CHECK(ds.rows() == 442);
  CHECK(ds.features() == 10);
  const auto st = standardize(ds);
  CHECK(st.standardized);
  for (Eigen::Index j = 0; j < st.x.cols(); ++j) {
    const double mean = st.x.col(j).mean();
    const double var = (st.x.col(j).array() - mean).square().sum() / (st.x.rows() - 1);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-10);
  }
  CHECK(std::abs(st.y.mean()) < 1e-10);
  const auto twice = standardize(st);
  CHECK((twice.x - st.x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.y - st.y).cwiseAbs().maxCoeff() < 1e-12);

  const auto fit = ols(st);
  const Vector grad = st.x.transpose() * (st.y - st.x * fit.beta);
  CHECK(grad.norm() <= 1e-8 * (st.x.transpose() * st.y).norm());
}

TEST_CASE("ols") {
  const auto a = ols(Matrix::Identity(2, 2), Vector::Map(std::vector<double>{3, 4}.data(), 2));
  CHECK(a.beta[0] == doctest::Approx(3.0));
  CHECK(a.beta[1] == doctest::Approx(4.0));
  CHECK(a.l1_norm == doctest::Approx(7.0));

  Matrix x1(3, 1);
  x1 << 1, 2, 3;
  Vector y1(3);
  y1 << 2, 4, 6;
  CHECK(ols(x1, y1).beta[0] == doctest::Approx(2.0));

  std::mt19937_64 gen(8);
  Matrix x(50, 5);
  for (Eigen::Index j = 0; j < 5; ++j) x.col(j) = oracle::random_vector(gen, 50, 1.0);
  const Vector y = oracle::random_vector(gen, 50, 1.0);
  const Vector normal_eq = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  CHECK((ols(x, y).beta - normal_eq).norm() < 1e-8);

  Matrix rank1(3, 2);
  rank1 << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(ols(rank1, y1), InvalidModel);
  Dataset constant{Matrix::Constant(4, 1, 2.0), Vector::Zero(4), {"c"}, "y", false};
  CHECK_THROWS_AS(standardize(constant), InvalidModel);
}

TEST_CASE("csv round trip is bit exact") {
  const auto dir = scratch_dir("roundtrip");
  std::mt19937_64 gen(1);
  Dataset ds{Matrix(20, 3), oracle::random_vector(gen, 20, 1e-3), {"p", "q", "r"}, "target", false};
  for (Eigen::Index j = 0; j < 3; ++j) ds.x.col(j) = oracle::random_vector(gen, 20, std::pow(10.0, 3 * j - 5));
  ds.x(0, 0) = 1e-300;
  ds.x(1, 1) = -0.1;
  save_csv(dir / "nested" / "data.csv", ds);
  const auto back = load_csv(dir / "nested" / "data.csv", "target");
  CHECK(back.x == ds.x);
  CHECK(back.y == ds.y);
  CHECK(back.feature_names == ds.feature_names);
  fs::remove_all(dir);
}

TEST_CASE("sample files") {
  const auto dir = scratch_dir("samples");
  std::mt19937_64 gen(2);
  Matrix s(7, 3);
  for (Eigen::Index i = 0; i < 7; ++i) s.row(i) = oracle::random_vector(gen, 3, 1.0).transpose();
  write_samples_csv(dir / "s.csv", s);
  write_samples_binary(dir / "s.bin", s);
  CHECK(read_samples_csv(dir / "s.csv") == s);
  CHECK(read_samples_binary(dir / "s.bin") == s);
  CHECK(read_file(dir / "s.csv").rfind("x1,x2,x3\n", 0) == 0);
  const std::string bin = read_file(dir / "s.bin");
  CHECK(bin.substr(0, 4) == "MYU1");
  CHECK(bin.size() == 4 + 16 + 7 * 3 * 8);
  CHECK(static_cast<unsigned char>(bin[4]) == 7);
  CHECK(static_cast<unsigned char>(bin[12]) == 3);

  std::ofstream(dir / "junk.bin") << "NOPE";
  CHECK_THROWS_AS(read_samples_binary(dir / "junk.bin"), IoError);
  std::ofstream(dir / "short.bin") << bin.substr(0, 30);
  CHECK_THROWS_AS(read_samples_binary(dir / "short.bin"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("tables and manifests") {
  const auto dir = scratch_dir("tables");
  write_table(dir / "t.csv", {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  CHECK(read_file(dir / "t.csv") == "a,b\n1,2\n3,4\n");
  const std::map<std::string, std::string> m{{"seed", "42"}, {"config.x", "1,2"}, {"alpha", "b=c"}};
  write_manifest(dir / "manifest", m);
  CHECK(read_manifest(dir / "manifest") == m);
  CHECK(read_file(dir / "manifest") == "alpha=b=c\nconfig.x=1,2\nseed=42\n");
  CHECK_THROWS_AS(read_file(dir / "missing"), IoError);
  fs::remove_all(dir);
}
