#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fcodt/datasets.hpp"
#include "fcodt/errors.hpp"

using namespace fcodt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fcodt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::size_t parse_error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("datasets") {

TEST_CASE("simulated functions at fixed points") {
  const Vector zero(10, 0.0), one(10, 1.0);
  CHECK(sim1_function(zero) == 0.0);
  CHECK(sim2_function(zero) == doctest::Approx(5.0));
  CHECK(sim1_function(one) == doctest::Approx(5.0));
  CHECK(sim2_function(one) == doctest::Approx(5.0 * std::exp(1.0)));
  Vector neg(10, -1.0);
  CHECK(sim1_function(neg) == 0.0);
  Vector x(10, 0.0);
  x[0] = 2.0;  // groups {1} and {1,3,5,7,9}
  CHECK(sim1_function(x) == doctest::Approx(2.0 + 0.4));
  CHECK(sim2_function(x) == doctest::Approx(std::exp(2.0) + std::exp(0.4) + 3.0));
}

TEST_CASE("simulated draws: ranges, noise and prefix nesting") {
  const auto d = gen_sim1(4000, 0.5, 11);
  CHECK(d.dim() == 10);
  double lo = INFINITY, hi = -INFINITY, mean = 0, var = 0;
  for (double v : d.features.data()) lo = std::min(lo, v), hi = std::max(hi, v);
  CHECK(lo >= -3.0);
  CHECK(hi < 3.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.noise_free[i] == sim1_function(d.features.row(i)));
    mean += (d.targets[i] - d.noise_free[i]) / 4000.0;
  }
  for (std::size_t i = 0; i < d.size(); ++i) var += std::pow(d.targets[i] - d.noise_free[i] - mean, 2) / 3999.0;
  CHECK(std::abs(mean) < 4 * 0.5 / std::sqrt(4000.0));
  CHECK(std::sqrt(var) == doctest::Approx(0.5).epsilon(0.05));
  const auto small = gen_sim1(100, 0.5, 11);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(small.targets[i] == d.targets[i]);
    for (std::size_t j = 0; j < 10; ++j) CHECK(small.features(i, j) == d.features(i, j));
  }
  CHECK(gen_sim2(50, 0.0, 3).targets == gen_sim2(50, 0.0, 3).noise_free);
  CHECK(gen_sim("sim2", 5, 0.1, 1).targets == gen_sim2(5, 0.1, 1).targets);
  CHECK_THROWS_AS(gen_sim("sim3", 5, 0.1, 1), ContractViolation);
  CHECK_THROWS_AS(gen_sim1(0, 0.1, 1), ContractViolation);
  CHECK_THROWS_AS(gen_sim1(5, -0.1, 1), ContractViolation);
}

TEST_CASE("Monte Carlo mean of sim1 is positive and stable") {
  const auto a = gen_sim1(20000, 0.0, 1), b = gen_sim1(20000, 0.0, 2);
  double ma = 0, mb = 0;
  for (double v : a.targets) ma += v / 20000.0;
  for (double v : b.targets) mb += v / 20000.0;
  // each ReLU ridge term has a positive mean under U[-3,3]
  CHECK(ma > 1.0);
  CHECK(std::abs(ma - mb) < 0.1);
}

TEST_CASE("LIBSVM parsing") {
  std::istringstream in("1.5 1:2 3:4\n# comment\n-2 2:0.5  # trailing\n\n3\n");
  const auto d = parse_libsvm(in);
  REQUIRE(d.size() == 3);
  CHECK(d.dim() == 3);
  CHECK(d.targets == Vector{1.5, -2, 3});
  CHECK(d.features.row(0)[0] == 2.0);
  CHECK(d.features.row(0)[1] == 0.0);
  CHECK(d.features.row(0)[2] == 4.0);
  CHECK(d.features.row(1)[1] == 0.5);
  for (double v : d.features.row(2)) CHECK(v == 0.0);
  std::istringstream wide("1 1:1\n");
  CHECK(parse_libsvm(wide, 4).dim() == 4);
}

TEST_CASE("LIBSVM errors name the line") {
  auto parse = [](std::string text, std::optional<std::size_t> dim = std::nullopt) {
    return [text, dim] {
      std::istringstream in(text);
      parse_libsvm(in, dim);
    };
  };
  CHECK(parse_error_line(parse("1 1:2\n2 1:x\n")) == 2);
  CHECK(parse_error_line(parse("1 2:1 1:3\n")) == 1);
  CHECK(parse_error_line(parse("1 0:1\n")) == 1);
  CHECK(parse_error_line(parse("1 1:2\n1 1:3\nnan 1:1\n")) == 3);
  CHECK(parse_error_line(parse("1 1:inf\n")) == 1);
  CHECK(parse_error_line(parse("1 5:1\n", 3)) == 1);
  CHECK(parse_error_line(parse("1 1-2\n")) == 1);
}

TEST_CASE("CSV parsing with and without header") {
  std::istringstream with_header("a, \"y\" ,b\n1,2,3\n4,5,6\n");
  const auto d = parse_csv(with_header, ColumnRef{std::string("y")});
  CHECK(d.targets == Vector{2, 5});
  CHECK(d.dim() == 2);
  CHECK(d.features(1, 1) == 6.0);
  std::istringstream no_header("1,2,3\n4,5,6\n");
  const auto e = parse_csv(no_header, ColumnRef{std::size_t{0}});
  CHECK(e.targets == Vector{1, 4});
  CHECK(e.features(0, 0) == 2.0);
  std::istringstream all("1,2\n3,4\n");
  const auto f = parse_csv(all, std::nullopt);
  CHECK(f.dim() == 2);
  CHECK(f.targets == Vector{0, 0});
  std::istringstream nf("x1,y,f\n1,2,3\n");
  const auto g = parse_csv(nf, ColumnRef{std::string("y")}, "f");
  CHECK(g.dim() == 1);
  CHECK(g.noise_free == Vector{3});
  std::istringstream empty("x1,y\n");
  CHECK(parse_csv(empty, ColumnRef{std::string("y")}).empty());
}

TEST_CASE("CSV errors") {
  auto parse = [](std::string text, ColumnRef target) {
    return [text, target] {
      std::istringstream in(text);
      parse_csv(in, target);
    };
  };
  CHECK(parse_error_line(parse("a,y\n1,2\n3\n", std::string("y"))) == 3);
  CHECK(parse_error_line(parse("a,y\n1,2\n3,oops\n", std::string("y"))) == 3);
  std::istringstream missing("a,b\n1,2\n");
  CHECK_THROWS(parse_csv(missing, ColumnRef{std::string("y")}));
}

TEST_CASE("CSV and LIBSVM round-trips are exact") {
  const auto d = gen_sim2(40, 0.3, 9);
  std::stringstream csv;
  write_csv(csv, d);
  const auto back = parse_csv(csv, ColumnRef{std::string("y")}, "f");
  CHECK(back.features == d.features);
  CHECK(back.targets == d.targets);
  CHECK(back.noise_free == d.noise_free);
  std::stringstream svm;
  write_libsvm(svm, d);
  const auto back2 = parse_libsvm(svm, d.dim());
  CHECK(back2.features == d.features);
  CHECK(back2.targets == d.targets);
}

TEST_CASE("load_dataset picks the format from the extension") {
  const auto dir = scratch_dir("load");
  const auto d = gen_sim1(20, 0.1, 2);
  {
    std::ofstream a(dir / "d.csv");
    write_csv(a, d);
    std::ofstream b(dir / "d.libsvm");
    write_libsvm(b, d);
  }
  const auto c = load_dataset(dir / "d.csv", std::nullopt);
  CHECK(c.targets == d.targets);
  CHECK(c.noise_free == d.noise_free);
  CHECK(load_dataset(dir / "d.libsvm", std::nullopt).features == d.features);
  CHECK_THROWS(load_dataset(dir / "absent.csv", std::nullopt));
}

TEST_CASE("train/test split") {
  const auto s = train_test_split(10, 0.7, 4);
  CHECK(s.train.size() == 7);
  CHECK(s.test.size() == 3);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  CHECK(train_test_split(5, 0.6, 1).train.size() == 3);
  CHECK(train_test_split(2000, 0.6, 1).train.size() == 1200);
  CHECK(train_test_split(2, 0.01, 1).train.size() == 1);
  CHECK(train_test_split(10, 0.7, 4).train == s.train);
  CHECK(train_test_split(10, 0.7, 5).train != s.train);
  CHECK_THROWS_AS(train_test_split(1, 0.5, 1), ContractViolation);
  CHECK_THROWS_AS(train_test_split(10, 1.0, 1), ContractViolation);
}

TEST_CASE("k-fold partitions") {
  const auto folds = kfold_indices(11, 3, 7);
  REQUIRE(folds.size() == 3);
  std::multiset<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK((f.test.size() == 3 || f.test.size() == 4));
    CHECK(f.train.size() + f.test.size() == 11);
    std::set<std::size_t> tr(f.train.begin(), f.train.end());
    for (auto i : f.test) CHECK(tr.count(i) == 0);
    seen.insert(f.test.begin(), f.test.end());
  }
  CHECK(seen.size() == 11);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 11);
  CHECK_THROWS_AS(kfold_indices(3, 4, 1), ContractViolation);
  CHECK_THROWS_AS(kfold_indices(10, 1, 1), ContractViolation);
}

TEST_CASE("min-max scaler") {
  const auto x = DenseMatrix::from_rows({{1, 5, 2}, {3, 5, 4}, {2, 5, 8}});
  const auto s = MinMaxScaler::fit(x);
  const auto y = s.apply(x);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(1, 0) == 1.0);
  CHECK(y(2, 0) == 0.5);
  CHECK(y(1, 1) == 0.0);  // constant column
  CHECK(s.apply(DenseMatrix::from_rows({{5, 0, -4}}))(0, 0) == 2.0);
  CHECK_THROWS_AS(s.apply(DenseMatrix(1, 2)), ContractViolation);
}

TEST_CASE("manifest resolution and checksum pinning") {
  const auto dir = scratch_dir("manifest");
  write_file(dir / "tiny.libsvm", "1 1:1\n2 1:2\n");
  const std::string sha = sha256_file(dir / "tiny.libsvm");
  CHECK(sha.size() == 64);
  write_file(dir / "empty.txt", "");
  CHECK(sha256_file(dir / "empty.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  write_file(dir / "m.json", R"({"datasets": {
    "tiny": {"format": "libsvm", "path": "tiny.libsvm", "dim": 1, "sha256": ")" + sha + R"("},
    "bad": {"format": "libsvm", "path": "tiny.libsvm", "sha256": "00"},
    "gone": {"format": "libsvm", "path": "nowhere.libsvm"},
    "s": {"format": "sim2", "n": 30, "sigma": 0.2}}})");
  const auto m = load_manifest(dir / "m.json");
  CHECK(m.entries.size() == 4);
  const auto tiny = resolve_dataset(m, "tiny", 0);
  CHECK(tiny.targets == Vector{1, 2});
  CHECK_THROWS(resolve_dataset(m, "bad", 0));
  CHECK_THROWS(resolve_dataset(m, "gone", 0));
  CHECK_THROWS(resolve_dataset(m, "absent", 0));
  const auto s = resolve_dataset(m, "s", 5);
  CHECK(s.targets == gen_sim2(30, 0.2, 5).targets);
  write_file(dir / "typo.json", R"({"datasets": {"t": {"format": "libsvm", "paht": "x"}}})");
  CHECK_THROWS(load_manifest(dir / "typo.json"));
}

TEST_CASE("dataset validation and subsets") {
  Dataset d;
  d.features = DenseMatrix(3, 2, 1.0);
  d.targets = {1, 2};
  CHECK_THROWS_AS(d.validate(), ContractViolation);
  d.targets = {1, 2, 3};
  CHECK_NOTHROW(d.validate());
  d.features(1, 1) = NAN;
  CHECK_THROWS_AS(d.validate(), ContractViolation);
  const auto s = gen_sim1(10, 0.1, 1).subset(std::vector<std::size_t>{4, 2});
  CHECK(s.size() == 2);
  CHECK(s.targets[0] == gen_sim1(10, 0.1, 1).targets[4]);
  CHECK(s.noise_free.size() == 2);
}

}  // TEST_SUITE
