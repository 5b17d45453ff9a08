#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcodt/baselines.hpp"
#include "fcodt/dataset.hpp"
#include "fcodt/datasets.hpp"
#include "fcodt/tree.hpp"

namespace fcodt {

double mse(std::span<const double> pred, std::span<const double> target);
/// 1 - SS_res / SS_total. Throws ContractViolation ("undefined R²") when the
/// target is constant.
double r2(std::span<const double> pred, std::span<const double> target);

struct CvCell {
  double lambda = 0.0;
  Vector fold_mse;  // NaN where the fit failed
  double mean_mse = 0.0;
  std::string error;  // first failure message, empty when every fold fitted
};

struct GridSearchResult {
  double best_lambda = 0.0;
  std::vector<CvCell> table;
};

/// k-fold CV over `grid`; the lowest mean validation MSE wins, ties to the
/// smaller lambda. A grid value whose fit fails on any fold is recorded and
/// skipped. Methods without a lambda return grid.front() with an empty table.
GridSearchResult grid_search_lambda(const Dataset& data, Method method,
                                    const SplitCriteria& criteria, std::span<const double> grid,
                                    std::size_t folds, std::uint64_t seed);

struct RankSumResult {
  double statistic = 0.0;  // rank sum of sample_a, midranks for ties
  double p_value = 1.0;    // two-sided
  bool exact = false;
};

/// Wilcoxon rank-sum test. Exact enumeration of all label assignments when the
/// combined size is at most 12, otherwise the normal approximation with tie
/// and continuity corrections.
RankSumResult rank_sum_test(std::span<const double> sample_a, std::span<const double> sample_b);

inline const Vector kDefaultLambdaGrid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};

struct ExperimentConfig {
  std::vector<Method> methods = {Method::fc_odt, Method::ridge_odt};
  std::vector<std::string> datasets = {"sim1", "sim2"};
  std::vector<std::size_t> depths = {2, 3, 4, 5, 6};
  std::vector<std::size_t> sample_sizes = {50, 100, 200, 500, 1000, 2000};
  std::size_t repeats = 10;
  Vector lambda_grid = kDefaultLambdaGrid;
  std::uint64_t seed_base = 2024;
  std::size_t folds = 5;
  SplitCriteria criteria;  // max_depth is overridden by the depth sweep
  std::size_t sim_train = 2000;
  std::size_t sim_test = 500;
  double sim_sigma = 0.01;
  std::size_t sim_bench_n = 2000;   // rows drawn for a simulated benchmark dataset
  double train_fraction = 0.6;      // 3:2
  bool retune_lambda = true;        // false: tune once per (dataset, method, repeat) at criteria.max_depth
  bool minmax_scale = false;        // benchmark only, fitted on the training rows
  std::size_t workers = 1;

  void validate() const;
};

/// Long-format record. The results CSV carries everything but wall time, which
/// goes to a separate timings file so that reruns are byte-identical.
struct ResultRecord {
  std::string dataset;
  std::string method;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::string param_name;
  double param_value = 0.0;
  std::string metric;
  double value = 0.0;
  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

struct CellTiming {
  std::string key;
  std::string dataset;
  std::string method;
  std::string param_name;
  double param_value = 0.0;
  std::size_t repeat = 0;
  double seconds = 0.0;
};

struct SkippedDataset {
  std::string dataset;
  std::string reason;
};

struct ExperimentResult {
  std::vector<ResultRecord> records;
  std::vector<CellTiming> timings;
  std::vector<SkippedDataset> skipped;
  std::size_t resumed_cells = 0;
  std::size_t computed_cells = 0;
};

struct RunOptions {
  /// When set, finished cells are appended here as they complete and cells
  /// already present are not recomputed.
  std::optional<std::filesystem::path> partial_path;
  /// Dataset resolution for the benchmark; simulated names need no manifest.
  const DatasetManifest* manifest = nullptr;
  std::function<void(const std::string& cell_key)> on_cell_done;
};

ExperimentResult run_depth_sweep(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_sample_sweep(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_benchmark(const ExperimentConfig& config, const RunOptions& options = {});

/// Seeds of the individual draws, exposed for the reproducibility stamp.
std::uint64_t data_seed(const ExperimentConfig& config, std::string_view protocol,
                        std::string_view dataset, std::size_t repeat);

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records);
std::vector<ResultRecord> read_results_csv(std::istream& in);
void write_timings_csv(std::ostream& out, std::span<const CellTiming> timings);

/// Mean of `metric` per (dataset, method, parameter value).
struct SummaryRow {
  std::string dataset;
  std::string method;
  std::string param_name;
  double param_value = 0.0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};
std::vector<SummaryRow> summarize(std::span<const ResultRecord> records, std::string_view metric);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Scores imported from an external table: dataset,method,mean,std.
struct ReferenceScore {
  std::string dataset;
  std::string method;
  double mean = 0.0;
  double std = 0.0;
};
std::vector<ReferenceScore> read_reference_csv(std::istream& in);

struct AggregateCell {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  std::string marker;  // "•" FC-ODT significantly better, "∘" worse, empty otherwise
  bool reference = false;
};

/// One row per dataset, one column per method, plus average ranks over the
/// datasets where every column is present. Markers compare FC-ODT with each
/// other computed method by the rank-sum test at level `alpha`.
struct AggregateTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, AggregateCell> cells;  // (dataset, method)
  std::map<std::string, double> average_rank;
  std::size_t ranked_datasets = 0;
};
AggregateTable aggregate_benchmark(std::span<const ResultRecord> records,
                                   std::span<const ReferenceScore> reference, double alpha = 0.1);
void write_aggregate_csv(std::ostream& out, const AggregateTable& table);

}  // namespace fcodt
