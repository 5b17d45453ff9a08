#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fcodt/baselines.hpp"
#include "fcodt/datasets.hpp"
#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/rng.hpp"
#include "fcodt/stumps.hpp"
#include "fcodt/tree.hpp"
#include "json.hpp"
#include "run_config.hpp"

namespace fcodt::cli {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      writer(out);
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_csv(const fs::path& path, const std::string& format) {
  if (format == "csv") return true;
  if (format == "libsvm") return false;
  if (format != "auto") throw ContractViolation("--format must be auto, csv or libsvm");
  return path.extension() == ".csv";
}

ColumnRef column_ref(const std::string& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    return static_cast<std::size_t>(std::stoull(s));
  return s;
}

struct DataFlags {
  std::string path;
  std::string format = "auto";
  std::string target = "y";
  std::optional<std::size_t> dim;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, bool required = true) {
  cmd->add_option("--data", f.path, "dataset file (.csv or LIBSVM)")->required(required);
  cmd->add_option("--format", f.format, "auto | csv | libsvm")->capture_default_str();
  cmd->add_option("--target", f.target, "CSV target column name or 0-based index")
      ->capture_default_str();
  cmd->add_option("--dim", f.dim, "LIBSVM feature dimension (default: largest index)");
}

// Training input: the target column must exist.
Dataset load_training(const DataFlags& f) {
  std::ifstream in(f.path);
  if (!in) throw std::runtime_error("cannot open dataset file " + f.path);
  Dataset d = is_csv(f.path, f.format) ? parse_csv(in, column_ref(f.target), "f")
                                       : parse_libsvm(in, f.dim);
  d.meta.name = fs::path(f.path).stem().string();
  d.meta.source = f.path;
  return d;
}

// Prediction input: the target column is optional; LIBSVM rows are padded to
// the model width.
Dataset load_for_prediction(const DataFlags& f, std::size_t model_dim, bool& has_targets) {
  const std::string text = read_file(f.path);
  std::istringstream in(text);
  Dataset d;
  if (is_csv(f.path, f.format)) {
    const ColumnRef target = column_ref(f.target);
    bool use_target = true;
    if (const auto* name = std::get_if<std::string>(&target)) {
      std::istringstream head(text);
      std::string first;
      std::getline(head, first);
      std::vector<std::string> cells;
      std::stringstream ss(first);
      for (std::string c; std::getline(ss, c, ',');) {
        while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back()))) c.pop_back();
        cells.push_back(c);
      }
      use_target = std::find(cells.begin(), cells.end(), *name) != cells.end();
    }
    d = parse_csv(in, use_target ? std::optional<ColumnRef>(target) : std::nullopt, "f");
    has_targets = use_target && !d.empty();
  } else {
    d = parse_libsvm(in, std::nullopt);
    if (d.dim() < model_dim && !d.empty()) {
      DenseMatrix padded(d.size(), model_dim);
      for (std::size_t r = 0; r < d.size(); ++r)
        for (std::size_t j = 0; j < d.dim(); ++j) padded(r, j) = d.features(r, j);
      d.features = std::move(padded);
    }
    has_targets = !d.empty();
  }
  if (!d.empty() && d.dim() != model_dim)
    throw ContractViolation("dimension mismatch: model expects " + std::to_string(model_dim) +
                            " features, data has " + std::to_string(d.dim()));
  if (d.empty()) d.features = DenseMatrix(0, model_dim);
  return d;
}

void add_criteria_flags(CLI::App* cmd, SplitCriteria& c) {
  cmd->add_option("--max-depth,-K", c.max_depth, "maximum tree depth")->capture_default_str();
  cmd->add_option("--min-split", c.min_samples_split, "minimum rows to split a node")
      ->capture_default_str();
  cmd->add_option("--min-leaf", c.min_samples_leaf, "minimum rows per child")->capture_default_str();
  cmd->add_option("--min-gain", c.min_gain, "minimum impurity decrease")->capture_default_str();
}

void print_cv_table(std::ostream& out, const GridSearchResult& g) {
  out << "lambda,mean_mse,fold_mse\n";
  for (const auto& cell : g.table) {
    out << g6(cell.lambda) << ',' << (cell.error.empty() ? g6(cell.mean_mse) : "failed") << ',';
    for (std::size_t k = 0; k < cell.fold_mse.size(); ++k)
      out << (k ? ";" : "") << g6(cell.fold_mse[k]);
    if (!cell.error.empty()) out << ",\"" << cell.error << '"';
    out << '\n';
  }
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  DataFlags data;
  std::string method = "fc_odt";
  std::string lambda = "cv";
  SplitCriteria criteria;
  bool no_concat = false;
  bool no_residual = false;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> grid = kDefaultLambdaGrid;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  a.criteria.validate();
  const Dataset data = load_training(a.data);
  if (data.empty()) throw ContractViolation("training data is empty");

  double lambda = 0.0;
  if (a.lambda == "cv") {
    if (uses_lambda(method)) {
      const auto g = grid_search_lambda(data, method, a.criteria, a.grid, a.folds, a.seed);
      print_cv_table(out, g);
      lambda = g.best_lambda;
      out << "chosen lambda " << g6(lambda) << '\n';
    }
  } else {
    std::size_t used = 0;
    try {
      lambda = std::stod(a.lambda, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.lambda.size() || !(lambda >= 0.0) || !std::isfinite(lambda))
      throw ContractViolation("--lambda must be a nonnegative number or 'cv'");
  }

  ObliqueTreeModel model;
  if (method == Method::fc_odt)
    model = fit_fc_odt(data, lambda, a.criteria, VariantFlags{!a.no_concat, !a.no_residual});
  else
    model = fit_method(method, data, lambda, a.criteria);

  const double train_mse = mse(predict(model, data.features), data.targets);
  write_atomic(a.out, [&](std::ostream& o) { o << serialize_model(model); });
  out << "model " << to_string(model.kind) << " written to " << a.out << '\n';
  out << "lambda " << g6(lambda) << '\n';
  out << "depth " << model.realized_depth() << " (internal " << model.internal_count() << ", leaves "
      << model.leaf_count() << ")\n";
  out << "training mse " << g17(train_mse) << '\n';
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  DataFlags data;
  std::string out;
  bool explain = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const ObliqueTreeModel model = deserialize_model(read_file(a.model));
  bool has_targets = false;
  const Dataset data = load_for_prediction(a.data, model.input_dim, has_targets);
  Vector pred(data.size());
  std::vector<PathTrace> traces;
  for (std::size_t i = 0; i < data.size(); ++i) {
    pred[i] = predict(model, data.features.row(i));
    if (a.explain) traces.push_back(trace_path(model, data.features.row(i)));
  }
  write_atomic(a.out, [&](std::ostream& o) {
    o << "prediction";
    if (a.explain) o << ",leaf,path_nodes,path_scores,path_left";
    o << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
      o << g17(pred[i]);
      if (a.explain) {
        const auto& t = traces[i];
        o << ',' << t.leaf << ',';
        for (std::size_t k = 0; k < t.steps.size(); ++k) o << (k ? ";" : "") << t.steps[k].node;
        o << ',';
        for (std::size_t k = 0; k < t.steps.size(); ++k) o << (k ? ";" : "") << g17(t.steps[k].score);
        o << ',';
        for (std::size_t k = 0; k < t.steps.size(); ++k) o << (k ? ";" : "") << t.steps[k].went_left;
      }
      o << '\n';
    }
  });
  out << "predictions " << data.size() << " written to " << a.out << '\n';
  if (has_targets) out << "mse " << g17(mse(pred, data.targets)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string function = "sim1";
  std::size_t n = 2500;
  double sigma = 0.01;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Dataset d = gen_sim(a.function, a.n, a.sigma, a.seed);
  write_atomic(a.out, [&](std::ostream& o) { write_csv(o, d, true); });
  out << a.function << ": " << d.size() << " rows written to " << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- sweep / bench

struct ExperimentArgs {
  std::string config;
  std::string kind = "depth";
  std::string out;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> repeats;
  std::optional<std::uint64_t> seed;
  std::string manifest;
  std::string reference;
  bool scale = false;
  bool no_scale = false;
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
};

RunConfig effective_config(const ExperimentArgs& a) {
  RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  ExperimentConfig& e = rc.experiment;
  if (a.workers) e.workers = *a.workers;
  if (a.repeats) e.repeats = *a.repeats;
  if (a.seed) e.seed_base = *a.seed;
  if (a.scale) e.minmax_scale = true;
  if (a.no_scale) e.minmax_scale = false;
  if (!a.datasets.empty()) e.datasets = a.datasets;
  if (!a.methods.empty()) {
    e.methods.clear();
    for (const auto& m : a.methods) e.methods.push_back(parse_method(m));
  }
  if (!a.out.empty()) rc.output_dir = a.out;
  if (!a.reference.empty()) rc.reference = a.reference;
  if (!a.manifest.empty()) {
    rc.manifest = a.manifest;
  } else if (const char* env = std::getenv("FCODT_MANIFEST"); env && *env) {
    rc.manifest = env;
  }
  if (!rc.output_dir) throw ContractViolation("no output directory (--out or config output_dir)");
  e.validate();
  return rc;
}

void write_stamp(const fs::path& dir, const std::string& protocol, const RunConfig& rc,
                 const ExperimentResult& r) {
  const std::string canon = canonical_json(rc);
  nlohmann::json stamp;
  stamp["protocol"] = protocol;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  stamp["config_hash"] = hash;
  stamp["config"] = nlohmann::json::parse(canon);
  stamp["seed_base"] = rc.experiment.seed_base;
  nlohmann::json seeds = nlohmann::json::object();
  const std::string seed_protocol = protocol == "bench" ? "split" : protocol;
  for (const auto& d : rc.experiment.datasets) {
    std::vector<std::uint64_t> s;
    for (std::size_t k = 0; k < rc.experiment.repeats; ++k)
      s.push_back(data_seed(rc.experiment, seed_protocol, d, k));
    seeds[d] = s;
  }
  stamp["data_seeds"] = seeds;
  stamp["records"] = r.records.size();
  stamp["resumed_cells"] = r.resumed_cells;
  stamp["computed_cells"] = r.computed_cells;
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"dataset", s.dataset}, {"reason", s.reason}});
  stamp["skipped"] = skipped;
  write_atomic(dir / "stamp.json", [&](std::ostream& o) { o << stamp.dump(2) << '\n'; });
}

void write_common_outputs(const fs::path& dir, const ExperimentResult& r, std::string_view metric) {
  write_atomic(dir / "results.csv", [&](std::ostream& o) { write_results_csv(o, r.records); });
  write_atomic(dir / "timings.csv", [&](std::ostream& o) { write_timings_csv(o, r.timings); });
  const auto rows = summarize(r.records, metric);
  write_atomic(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, rows); });
}

RunOptions progress_options(const fs::path& dir, std::ostream& err) {
  RunOptions opt;
  opt.partial_path = dir / "results.partial.jsonl";
  opt.on_cell_done = [&err](const std::string& key) { err << "done " << key << '\n'; };
  return opt;
}

int cmd_sweep(const ExperimentArgs& a, std::ostream& out, std::ostream& err, bool verbose) {
  if (a.kind != "depth" && a.kind != "samples")
    throw ContractViolation("--kind must be depth or samples");
  const RunConfig rc = effective_config(a);
  const fs::path dir = *rc.output_dir;
  fs::create_directories(dir);
  RunOptions opt = progress_options(dir, err);
  if (!verbose) opt.on_cell_done = nullptr;
  const ExperimentResult r = a.kind == "depth" ? run_depth_sweep(rc.experiment, opt)
                                               : run_sample_sweep(rc.experiment, opt);
  write_common_outputs(dir, r, "mse");
  write_stamp(dir, a.kind, rc, r);
  fs::remove(*opt.partial_path);
  write_summary_csv(out, summarize(r.records, "mse"));
  out << "cells computed " << r.computed_cells << ", resumed " << r.resumed_cells << '\n';
  return 0;
}

int cmd_bench(const ExperimentArgs& a, std::ostream& out, std::ostream& err, bool verbose) {
  const RunConfig rc = effective_config(a);
  const fs::path dir = *rc.output_dir;
  fs::create_directories(dir);
  std::optional<DatasetManifest> manifest;
  if (rc.manifest) manifest = load_manifest(*rc.manifest);
  std::vector<ReferenceScore> reference;
  if (rc.reference) {
    std::ifstream in(*rc.reference);
    if (!in) throw std::runtime_error("cannot open reference scores " + rc.reference->string());
    reference = read_reference_csv(in);
  }

  RunOptions opt = progress_options(dir, err);
  if (!verbose) opt.on_cell_done = nullptr;
  opt.manifest = manifest ? &*manifest : nullptr;
  const ExperimentResult r = run_benchmark(rc.experiment, opt);
  const AggregateTable table = aggregate_benchmark(r.records, reference, 0.1);

  write_common_outputs(dir, r, "r2");
  write_atomic(dir / "aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, table); });
  write_atomic(dir / "skipped.csv", [&](std::ostream& o) {
    o << "dataset,reason\n";
    for (const auto& s : r.skipped) o << s.dataset << ",\"" << s.reason << "\"\n";
  });
  write_stamp(dir, "bench", rc, r);
  fs::remove(*opt.partial_path);

  write_aggregate_csv(out, table);
  // How far the computed columns are from the imported scores of the same methods.
  double gap = 0.0;
  std::size_t matched = 0;
  for (const auto& ref : reference) {
    auto it = table.cells.find({ref.dataset, ref.method});
    if (it == table.cells.end() || it->second.reference) continue;
    gap += std::abs(it->second.mean - ref.mean);
    ++matched;
  }
  if (matched) out << "mean |R² - reference| over " << matched << " cells: " << g6(gap / matched) << '\n';
  for (const auto& s : r.skipped) out << "skipped " << s.dataset << ": " << s.reason << '\n';
  return 0;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string model;
  bool stumps = false;
  DataFlags data;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const ObliqueTreeModel m = deserialize_model(read_file(a.model));
  out << "model " << to_string(m.kind) << "  input_dim " << m.input_dim << "  lambda " << g6(m.lambda)
      << "  depth " << m.realized_depth() << "  nodes " << m.nodes.size() << " (" << m.internal_count()
      << " internal, " << m.leaf_count() << " leaves)\n";
  out << "criteria max_depth=" << m.criteria.max_depth
      << " min_samples_split=" << m.criteria.min_samples_split
      << " min_samples_leaf=" << m.criteria.min_samples_leaf << " min_gain=" << g6(m.criteria.min_gain)
      << '\n';
  out << "flags concatenate=" << m.flags.concatenate << " residual_path=" << m.flags.residual_path
      << '\n';
  out << std::setw(5) << "node" << std::setw(6) << "depth" << std::setw(8) << "samples" << std::setw(7)
      << "kind" << std::setw(14) << "threshold" << std::setw(14) << "gain" << std::setw(6) << "left"
      << std::setw(6) << "right" << std::setw(14) << "value" << '\n';
  for (std::size_t t = 0; t < m.nodes.size(); ++t) {
    const TreeNode& n = m.nodes[t];
    out << std::setw(5) << t << std::setw(6) << n.depth << std::setw(8) << n.sample_count;
    if (n.is_leaf) {
      out << std::setw(7) << "leaf" << std::setw(14) << "" << std::setw(14) << "" << std::setw(6) << ""
          << std::setw(6) << "" << std::setw(14) << g6(n.value) << '\n';
      continue;
    }
    out << std::setw(7) << "split" << std::setw(14) << g6(n.threshold) << std::setw(14) << g6(n.gain)
        << std::setw(6) << n.left << std::setw(6) << n.right << '\n';
    out << "      projection";
    for (std::size_t j = 0; j + 1 < n.projection.size(); ++j) out << ' ' << g6(n.projection[j]);
    out << " | bias " << g6(n.projection.back()) << '\n';
  }

  if (a.stumps) {
    if (a.data.path.empty()) throw ContractViolation("--stumps needs --data with the training set");
    const Dataset data = load_training(a.data);
    const StumpBasis basis = compute_stumps(m, data);
    const ExpansionCheck check = verify_orthogonal_expansion(m, data);
    const DenseMatrix g = stump_gram(basis);
    double gram_err = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j)
        gram_err = std::max(gram_err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    double identity_err = 0.0;
    for (std::size_t k = 0; k < basis.column_node.size(); ++k) {
      const long t = basis.column_node[k];
      if (t < 0) continue;
      const double c2 = basis.coefficients[k] * basis.coefficients[k];
      const double dec = basis.node_impurity_decrease[static_cast<std::size_t>(t)];
      identity_err = std::max(identity_err, std::abs(c2 - dec) / std::max(std::abs(dec), 1e-300));
    }
    out << "stumps " << check.columns << " columns, " << check.dropped << " dropped"
        << (basis.linear_functionals ? ", linear node functionals" : ", constant node functionals")
        << (basis.exact_regime ? "" : " (lambda > 1e-6: identities hold only approximately)") << '\n';
    out << "gram max |G - I| " << g6(gram_err) << '\n';
    out << "expansion max deviation " << g6(check.max_abs_deviation) << " (relative "
        << g6(check.max_abs_deviation / std::max(check.target_scale, 1e-300)) << ")\n";
    out << "impurity identity max relative error " << g6(identity_err) << '\n';
    out << "prediction gap max |predict - node-wise output| " << g6(check.prediction_gap) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oblique regression trees with feature concatenation", "fcodt"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "report progress on stderr");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "fit a tree and write the model file");
  add_data_flags(c_train, train.data);
  c_train->add_option("--method", train.method, "fc_odt | ridge_odt | cart")->capture_default_str();
  c_train->add_option("--lambda", train.lambda, "ridge penalty or 'cv'")->capture_default_str();
  add_criteria_flags(c_train, train.criteria);
  c_train->add_flag("--no-concat", train.no_concat, "disable feature concatenation (fc_odt)");
  c_train->add_flag("--no-residual", train.no_residual, "disable the residual path (fc_odt)");
  c_train->add_option("--folds", train.folds, "CV folds")->capture_default_str();
  c_train->add_option("--seed", train.seed, "CV fold seed")->capture_default_str();
  c_train->add_option("--grid", train.grid, "lambda grid for cv");
  c_train->add_option("--out,-o", train.out, "model output path")->required();

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "predict with a saved model");
  c_pred->add_option("--model,-m", pred.model, "model file")->required();
  add_data_flags(c_pred, pred.data);
  c_pred->add_option("--out,-o", pred.out, "predictions CSV")->required();
  c_pred->add_flag("--explain", pred.explain, "add decision-path columns");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a sim1/sim2 dataset as CSV");
  c_sim->add_option("--function,-f", sim.function, "sim1 | sim2")->capture_default_str();
  c_sim->add_option("--n,-n", sim.n, "rows")->capture_default_str();
  c_sim->add_option("--sigma", sim.sigma, "noise standard deviation")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "generator seed")->capture_default_str();
  c_sim->add_option("--out,-o", sim.out, "CSV output path")->required();

  ExperimentArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "depth or sample-size sweep on sim1/sim2");
  c_sweep->add_option("--config,-c", sweep.config, "JSON run configuration");
  c_sweep->add_option("--kind", sweep.kind, "depth | samples")->capture_default_str();
  c_sweep->add_option("--out,-o", sweep.out, "output directory");
  c_sweep->add_option("--workers", sweep.workers, "parallel cells");
  c_sweep->add_option("--repeats", sweep.repeats, "repeats per cell");
  c_sweep->add_option("--seed", sweep.seed, "seed base");
  c_sweep->add_option("--datasets", sweep.datasets, "sim1 and/or sim2");
  c_sweep->add_option("--methods", sweep.methods, "fc_odt and/or ridge_odt");

  ExperimentArgs bench;
  auto* c_bench = app.add_subcommand("bench", "R² benchmark with significance markers");
  c_bench->add_option("--config,-c", bench.config, "JSON run configuration");
  c_bench->add_option("--manifest", bench.manifest, "dataset manifest (else $FCODT_MANIFEST)");
  c_bench->add_option("--reference", bench.reference, "imported reference scores CSV");
  c_bench->add_option("--out,-o", bench.out, "output directory");
  c_bench->add_option("--workers", bench.workers, "parallel cells");
  c_bench->add_option("--repeats", bench.repeats, "repeats per dataset");
  c_bench->add_option("--seed", bench.seed, "seed base");
  c_bench->add_option("--datasets", bench.datasets, "dataset names");
  c_bench->add_option("--methods", bench.methods, "methods");
  c_bench->add_flag("--scale", bench.scale, "min-max scale features on the training split");
  c_bench->add_flag("--no-scale", bench.no_scale, "disable min-max scaling");

  InspectArgs insp;
  auto* c_insp = app.add_subcommand("inspect", "print a saved model");
  c_insp->add_option("--model,-m", insp.model, "model file")->required();
  c_insp->add_flag("--stumps", insp.stumps, "run the orthogonal-stump diagnostics");
  add_data_flags(c_insp, insp.data, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_train->parsed()) return cmd_train(train, out);
    if (c_pred->parsed()) return cmd_predict(pred, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out, err, verbose);
    if (c_bench->parsed()) return cmd_bench(bench, out, err, verbose);
    if (c_insp->parsed()) return cmd_inspect(insp, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace fcodt::cli
