#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/rng.hpp"
#include "json.hpp"

namespace fcodt {

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ContractViolation("config: methods must be nonempty");
  if (datasets.empty()) throw ContractViolation("config: datasets must be nonempty");
  if (depths.empty()) throw ContractViolation("config: depths must be nonempty");
  if (sample_sizes.empty()) throw ContractViolation("config: sample_sizes must be nonempty");
  if (lambda_grid.empty()) throw ContractViolation("config: lambda_grid must be nonempty");
  if (repeats < 1) throw ContractViolation("config: repeats must be >= 1");
  if (folds < 2) throw ContractViolation("config: folds must be >= 2");
  if (workers < 1) throw ContractViolation("config: workers must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ContractViolation("config: train_fraction must lie in (0, 1)");
  if (!(sim_sigma >= 0.0)) throw ContractViolation("config: sim_sigma must be >= 0");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ContractViolation("config: lambda values must be >= 0");
  for (auto k : depths)
    if (k < 1) throw ContractViolation("config: depths must be >= 1");
  for (auto n : sample_sizes)
    if (n < folds) throw ContractViolation("config: every sample size must be >= folds");
  if (sim_train < folds || sim_test < 2) throw ContractViolation("config: sim_train/sim_test too small");
  criteria.validate();
}

std::uint64_t data_seed(const ExperimentConfig& config, std::string_view protocol,
                        std::string_view dataset, std::size_t repeat) {
  return mix_seed(mix_seed(mix_seed(config.seed_base, protocol), dataset), repeat);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Cell {
  std::string dataset;
  Method method;
  std::string param_name;
  double param_value;
  std::size_t repeat;

  std::string key() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", param_value);
    return dataset + "|" + std::string(method_name(method)) + "|" + param_name + "=" + buf + "|" +
           std::to_string(repeat);
  }
};

struct CellOutput {
  std::vector<ResultRecord> records;
  double seconds = 0.0;
};

bool is_sim(std::string_view name) { return name == "sim1" || name == "sim2"; }

ResultRecord make_record(const Cell& c, std::uint64_t seed, std::string metric, double value) {
  return {c.dataset, std::string(method_name(c.method)), c.repeat, seed, c.param_name,
          c.param_value, std::move(metric), value};
}

double tuned_lambda(const ExperimentConfig& cfg, const Dataset& train, Method method,
                    SplitCriteria criteria, std::uint64_t cv_seed) {
  return grid_search_lambda(train, method, criteria, cfg.lambda_grid, cfg.folds, cv_seed).best_lambda;
}

std::uint64_t cv_seed_for(const ExperimentConfig& cfg, std::uint64_t base, const Cell& c) {
  const std::uint64_t s = mix_seed(base, method_name(c.method));
  return cfg.retune_lambda ? mix_seed(s, static_cast<std::uint64_t>(c.param_value)) : s;
}

// Reads finished cells from a partial file, ignoring a torn last line.
std::map<std::string, CellOutput> load_partial(const std::filesystem::path& path,
                                               const std::string& fingerprint) {
  std::map<std::string, CellOutput> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      continue;
    }
    if (header) {
      header = false;
      if (j.value("fingerprint", std::string()) != fingerprint)
        throw ContractViolation("partial results at " + path.string() +
                                " were produced by a different configuration");
      continue;
    }
    CellOutput out;
    out.seconds = j.at("seconds").get<double>();
    for (const auto& r : j.at("records")) {
      out.records.push_back({r.at("dataset"), r.at("method"), r.at("repeat"), r.at("seed"),
                             r.at("param_name"), r.at("param_value"), r.at("metric"),
                             r.at("value")});
    }
    done[j.at("key").get<std::string>()] = std::move(out);
  }
  return done;
}

std::string partial_line(const std::string& key, const CellOutput& out) {
  nlohmann::json j;
  j["key"] = key;
  j["seconds"] = out.seconds;
  j["records"] = nlohmann::json::array();
  for (const auto& r : out.records)
    j["records"].push_back({{"dataset", r.dataset}, {"method", r.method}, {"repeat", r.repeat},
                            {"seed", r.seed}, {"param_name", r.param_name},
                            {"param_value", r.param_value}, {"metric", r.metric},
                            {"value", r.value}});
  return j.dump();
}

using CellFn = std::function<std::vector<ResultRecord>(const Cell&)>;

ExperimentResult execute(const ExperimentConfig& cfg, const std::vector<Cell>& cells,
                         const CellFn& run_cell, const RunOptions& options,
                         const std::string& fingerprint) {
  ExperimentResult result;
  std::vector<std::optional<CellOutput>> outputs(cells.size());

  std::ofstream partial;
  if (options.partial_path) {
    auto done = load_partial(*options.partial_path, fingerprint);
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (auto it = done.find(cells[i].key()); it != done.end()) {
        outputs[i] = std::move(it->second);
        ++result.resumed_cells;
      }
    const bool fresh = !std::filesystem::exists(*options.partial_path) || done.empty();
    partial.open(*options.partial_path, fresh ? std::ios::trunc : std::ios::app);
    if (!partial) throw std::runtime_error("cannot write " + options.partial_path->string());
    if (fresh) {
      partial << nlohmann::json{{"fingerprint", fingerprint}}.dump() << '\n';
      // Rewrite what was loaded so the file stays self-contained.
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (outputs[i]) partial << partial_line(cells[i].key(), *outputs[i]) << '\n';
      partial.flush();
    } else {
      partial << '\n';  // terminates a torn last line, if any
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!outputs[i]) todo.push_back(i);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (!stop) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const std::size_t i = todo[t];
      try {
        const auto start = Clock::now();
        CellOutput out;
        out.records = run_cell(cells[i]);
        out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        std::lock_guard lock(mu);
        const std::string key = cells[i].key();
        if (partial.is_open()) {
          partial << partial_line(key, out) << '\n';
          partial.flush();
        }
        outputs[i] = std::move(out);
        ++result.computed_cells;
        if (options.on_cell_done) options.on_cell_done(key);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const std::size_t n_workers = std::min(cfg.workers, std::max<std::size_t>(todo.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    for (auto& r : outputs[i]->records) result.records.push_back(std::move(r));
    result.timings.push_back({c.key(), c.dataset, std::string(method_name(c.method)),
                              c.param_name, c.param_value, c.repeat, outputs[i]->seconds});
  }
  return result;
}

std::string fingerprint_of(std::string_view protocol, const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << protocol << ';' << cfg.seed_base << ';' << cfg.folds << ';' << cfg.sim_train << ';'
    << cfg.sim_test << ';' << cfg.sim_sigma << ';' << cfg.sim_bench_n << ';' << cfg.train_fraction
    << ';' << cfg.retune_lambda << ';' << cfg.minmax_scale << ';' << cfg.criteria.max_depth << ','
    << cfg.criteria.min_samples_split << ',' << cfg.criteria.min_samples_leaf << ','
    << cfg.criteria.min_gain << ';';
  for (double l : cfg.lambda_grid) s << l << ',';
  return std::to_string(fnv1a64(s.str()));
}

void require_sim_methods(const ExperimentConfig& cfg, std::string_view what) {
  for (const auto& d : cfg.datasets)
    if (!is_sim(d))
      throw ContractViolation(std::string(what) + ": dataset '" + d + "' is not sim1 or sim2");
  for (Method m : cfg.methods)
    if (m == Method::cart)
      throw ContractViolation(std::string(what) + ": methods must be fc_odt or ridge_odt");
}

Dataset take_rows(const Dataset& d, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> rows(end - begin);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = begin + i;
  return d.subset(rows);
}

}  // namespace

ExperimentResult run_depth_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  require_sim_methods(cfg, "depth sweep");
  std::vector<Cell> cells;
  for (const auto& d : cfg.datasets)
    for (Method m : cfg.methods)
      for (auto k : cfg.depths)
        for (std::size_t r = 0; r < cfg.repeats; ++r)
          cells.push_back({d, m, "depth", static_cast<double>(k), r});

  auto run_cell = [&](const Cell& c) {
    // One draw per (dataset, repeat): every method and depth sees the same data.
    const std::uint64_t seed = data_seed(cfg, "depth", c.dataset, c.repeat);
    const Dataset all = gen_sim(c.dataset, cfg.sim_train + cfg.sim_test, cfg.sim_sigma, seed);
    const Dataset train = take_rows(all, 0, cfg.sim_train);
    const Dataset test = take_rows(all, cfg.sim_train, all.size());
    SplitCriteria crit = cfg.criteria;
    crit.max_depth = static_cast<std::size_t>(c.param_value);
    const SplitCriteria tune_crit = cfg.retune_lambda ? crit : cfg.criteria;
    const double lambda = tuned_lambda(cfg, train, c.method, tune_crit, cv_seed_for(cfg, seed, c));
    const auto model = fit_method(c.method, train, lambda, crit);
    return std::vector<ResultRecord>{
        make_record(c, seed, "mse", mse(predict(model, test.features), test.noise_free)),
        make_record(c, seed, "lambda", lambda)};
  };
  return execute(cfg, cells, run_cell, options, fingerprint_of("depth", cfg));
}

ExperimentResult run_sample_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  require_sim_methods(cfg, "sample sweep");
  std::vector<Cell> cells;
  for (const auto& d : cfg.datasets)
    for (Method m : cfg.methods)
      for (auto n : cfg.sample_sizes)
        for (std::size_t r = 0; r < cfg.repeats; ++r)
          cells.push_back({d, m, "n", static_cast<double>(n), r});

  auto run_cell = [&](const Cell& c) {
    // Training sets for one repeat are nested prefixes of a single stream;
    // the noise-free test set comes from an independent stream.
    const std::uint64_t seed = data_seed(cfg, "samples", c.dataset, c.repeat);
    const auto n = static_cast<std::size_t>(c.param_value);
    const Dataset train = gen_sim(c.dataset, n, cfg.sim_sigma, seed);
    const Dataset test = gen_sim(c.dataset, cfg.sim_test, cfg.sim_sigma, mix_seed(seed, "test"));
    const double lambda =
        tuned_lambda(cfg, train, c.method, cfg.criteria, cv_seed_for(cfg, seed, c));
    const auto model = fit_method(c.method, train, lambda, cfg.criteria);
    return std::vector<ResultRecord>{
        make_record(c, seed, "mse", mse(predict(model, test.features), test.noise_free)),
        make_record(c, seed, "lambda", lambda)};
  };
  return execute(cfg, cells, run_cell, options, fingerprint_of("samples", cfg));
}

ExperimentResult run_benchmark(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  std::map<std::string, Dataset> loaded;
  std::vector<SkippedDataset> skipped;
  for (const auto& name : cfg.datasets) {
    if (loaded.count(name)) continue;
    try {
      if (options.manifest && options.manifest->entries.count(name)) {
        loaded[name] = resolve_dataset(*options.manifest, name, data_seed(cfg, "bench", name, 0));
      } else if (is_sim(name)) {
        loaded[name] = gen_sim(name, cfg.sim_bench_n, cfg.sim_sigma, data_seed(cfg, "bench", name, 0));
      } else {
        throw std::runtime_error("dataset '" + name + "' is not in the manifest");
      }
      loaded[name].validate();
      if (loaded[name].size() < 2 * cfg.folds)
        throw std::runtime_error("dataset '" + name + "' has too few rows");
    } catch (const std::exception& e) {
      loaded.erase(name);
      skipped.push_back({name, e.what()});
    }
  }

  std::vector<Cell> cells;
  for (const auto& d : cfg.datasets) {
    if (!loaded.count(d)) continue;
    for (Method m : cfg.methods)
      for (std::size_t r = 0; r < cfg.repeats; ++r)
        cells.push_back({d, m, "depth", static_cast<double>(cfg.criteria.max_depth), r});
  }

  auto run_cell = [&](const Cell& c) {
    const Dataset& data = loaded.at(c.dataset);
    // Splits depend on (dataset, repeat) only, so methods are compared on identical partitions.
    const std::uint64_t seed = data_seed(cfg, "split", c.dataset, c.repeat);
    const SplitAssignment split = train_test_split(data.size(), cfg.train_fraction, seed);
    std::vector<bool> in_train(data.size(), false);
    for (auto i : split.train) in_train[i] = true;
    for (auto i : split.test)
      if (in_train[i]) throw std::logic_error("benchmark: train and test rows overlap");
    Dataset train = data.subset(split.train);
    Dataset test = data.subset(split.test);
    if (cfg.minmax_scale) {
      const auto scaler = MinMaxScaler::fit(train.features);
      train.features = scaler.apply(train.features);
      test.features = scaler.apply(test.features);
    }
    const double lambda =
        tuned_lambda(cfg, train, c.method, cfg.criteria, mix_seed(seed, method_name(c.method)));
    const auto model = fit_method(c.method, train, lambda, cfg.criteria);
    const Vector pred = predict(model, test.features);
    return std::vector<ResultRecord>{make_record(c, seed, "r2", r2(pred, test.targets)),
                                     make_record(c, seed, "mse", mse(pred, test.targets)),
                                     make_record(c, seed, "lambda", lambda)};
  };
  auto result = execute(cfg, cells, run_cell, options, fingerprint_of("bench", cfg));
  result.skipped = std::move(skipped);
  return result;
}

}  // namespace fcodt
