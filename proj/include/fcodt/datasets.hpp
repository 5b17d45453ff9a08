#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fcodt/dataset.hpp"

namespace fcodt {

inline constexpr std::size_t kSimDim = 10;

/// Sum of five ridge terms over averaged coordinate groups
/// {1}, {2,3}, {4,5,6}, {7..10}, {1,3,5,7,9}, passed through ReLU (sim1) or
/// exp (sim2). `x` must have 10 entries.
double sim1_function(std::span<const double> x);
double sim2_function(std::span<const double> x);

/// n rows with x ~ U[-3, 3]^10 and y = f(x) + N(0, sigma²); noise_free keeps f(x).
/// Each row consumes 10 uniforms then one normal, so a shorter draw with
/// the same seed is a prefix of a longer one.
Dataset gen_sim1(std::size_t n, double sigma, std::uint64_t seed);
Dataset gen_sim2(std::size_t n, double sigma, std::uint64_t seed);
Dataset gen_sim(std::string_view which, std::size_t n, double sigma, std::uint64_t seed);

/// "<target> <index>:<value> ..." lines with 1-based strictly increasing
/// indices; absent entries are zero.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim = std::nullopt);

using ColumnRef = std::variant<std::string, std::size_t>;

/// Rectangular numeric CSV. A first row with any non-numeric cell is taken
/// as the header. The target column is removed and the rest become features.
/// With `target` unset every column is a feature and targets are zero. A
/// header column named `noise_free_column`, when present, is moved into
/// Dataset::noise_free instead of the features.
Dataset parse_csv(std::istream& in, std::optional<ColumnRef> target,
                  std::optional<std::string> noise_free_column = std::nullopt);

/// Header x1..xd,y[,f]; 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data, bool include_noise_free = true);
void write_libsvm(std::ostream& out, const Dataset& data);

/// Parses `path` as LIBSVM when the extension is not .csv, CSV otherwise.
/// CSV files use `target` (default "y") and take an "f" column as noise-free targets.
Dataset load_dataset(const std::filesystem::path& path, std::optional<ColumnRef> target,
                     std::optional<std::size_t> expected_dim = std::nullopt);

struct SplitAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Uniform shuffle by seed; the first ceil(n·fraction) rows train.
SplitAssignment train_test_split(std::size_t n, double train_fraction, std::uint64_t seed);
/// k folds whose test parts partition [0, n) with sizes differing by at most one.
std::vector<SplitAssignment> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// Min-max scaling fitted on one dataset and applied to others.
struct MinMaxScaler {
  Vector lo, hi;
  static MinMaxScaler fit(const DenseMatrix& x);
  DenseMatrix apply(const DenseMatrix& x) const;
};

struct ManifestEntry {
  std::string name;
  std::string format;  // libsvm | csv | sim1 | sim2
  std::filesystem::path path;
  std::optional<ColumnRef> target;
  std::optional<std::size_t> dim;
  std::string sha256;  // empty: not pinned
  std::string url;
  std::size_t sim_n = 2000;
  double sim_sigma = 0.01;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::map<std::string, ManifestEntry> entries;
};

/// JSON object {"datasets": {name: {format, path, target, dim, sha256, url}}}.
/// Relative paths resolve against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string sha256_file(const std::filesystem::path& path);

/// Loads a manifest dataset, verifying its checksum when pinned. Simulated
/// entries are generated from `seed`.
Dataset resolve_dataset(const DatasetManifest& manifest, const std::string& name,
                        std::uint64_t seed);

}  // namespace fcodt
