// Acceptance harness: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is 0 only when every criterion passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fcodt/baselines.hpp"
#include "fcodt/datasets.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/rng.hpp"
#include "fcodt/stumps.hpp"
#include "oracles.hpp"

using namespace fcodt;

namespace {

constexpr double kRidgeTol = 1e-8;        // criterion 1, max-norm
constexpr double kGainTol = 1e-12;        // criterion 2, absolute (thresholds must match exactly)
constexpr double kStumpTol = 1e-6;        // criterion 3, Gram / relative deviation / relative c² error
constexpr double kAlpha = 0.1;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void run_criterion(int id, const std::string& title, double limit_s, std::vector<bool>& results,
                   const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    v.pass = false;
    v.detail += "; runtime limit " + fmt("%.0f", limit_s) + " s exceeded";
  }
  std::printf("%s criterion %d: %s [%.1f s / limit %.0f s]\n    %s\n", v.pass ? "PASS" : "FAIL", id,
              title.c_str(), secs, limit_s, v.detail.c_str());
  std::fflush(stdout);
  results.push_back(v.pass);
}

Verdict ridge_oracle() {
  Rng rng(1001);
  double worst = 0.0;
  int instances = 0;
  for (double lambda : {0.0, 0.1, 10.0})
    for (int rep = 0; rep < 34 && instances < 100; ++rep, ++instances) {
      const std::size_t d = 1 + rng.below(10);
      const std::size_t n = d + 2 + rng.below(50 - d - 1);  // n ≤ 50, full column rank at λ = 0
      const auto x = oracle::random_matrix(n, d, rng, -2.0, 2.0);
      const auto y = oracle::random_vector(n, rng, -5.0, 5.0);
      const auto got = solve_ridge(x, y, lambda);
      const auto want = oracle::ridge(x, y, lambda);
      for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(got.weights[j] - want.weights[j]));
      worst = std::max(worst, std::abs(got.intercept - want.intercept));
    }
  return {worst <= kRidgeTol, std::to_string(instances) + " instances, max-norm error " + fmt("%.3g", worst) +
                                  " (tolerance " + fmt("%.0e", kRidgeTol) + ")"};
}

bool same_tree(const ObliqueTreeModel& m, std::size_t t, const oracle::CartNode& o, double& worst_gain) {
  const auto& n = m.nodes[t];
  if (n.is_leaf != o.leaf || n.sample_count != o.count) return false;
  if (n.is_leaf) return true;
  if (n.projection[o.feature] != 1.0 || n.threshold != o.threshold) return false;
  worst_gain = std::max(worst_gain, std::abs(n.gain - o.gain));
  return same_tree(m, n.left, *o.left, worst_gain) && same_tree(m, n.right, *o.right, worst_gain);
}

Verdict split_oracle() {
  Rng rng(2002);
  int threshold_mismatch = 0, tree_mismatch = 0;
  double worst_gain = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 4 + rng.below(27), d = 1 + rng.below(3);
    Dataset data;
    data.features = oracle::random_matrix(n, d, rng);
    if (rep % 2)  // coarse values create ties
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) data.features(i, j) = std::round(data.features(i, j) * 3);
    data.targets = oracle::random_vector(n, rng, -2.0, 2.0);
    const std::size_t leaf = 1 + rng.below(3);
    const SplitCriteria c{.max_depth = 1 + rng.below(2), .min_samples_split = 2 * leaf, .min_samples_leaf = leaf};
    for (std::size_t j = 0; j < d; ++j) {
      const auto col = data.features.column(j);
      const auto got = best_threshold(col, data.targets, n, c);
      const auto want = oracle::best_threshold(col, data.targets, n, c);
      if (got.has_value() != want.has_value() || (got && got->threshold != want->threshold)) {
        ++threshold_mismatch;
        continue;
      }
      if (got) worst_gain = std::max(worst_gain, std::abs(got->gain - want->gain));
    }
    const auto model = fit_cart(data, c);
    const auto ref = oracle::cart(data.features, data.targets, iota_indices(n), 0, c);
    if (!same_tree(model, 0, *ref, worst_gain)) ++tree_mismatch;
  }
  const bool pass = threshold_mismatch == 0 && tree_mismatch == 0 && worst_gain <= kGainTol;
  return {pass, "50 instances; threshold mismatches " + std::to_string(threshold_mismatch) +
                    ", CART tree mismatches " + std::to_string(tree_mismatch) + ", max gain difference " +
                    fmt("%.3g", worst_gain) + " (tolerance " + fmt("%.0e", kGainTol) + ")"};
}

Verdict stump_suite() {
  double gram_err = 0.0, rel_dev = 0.0, coef_err = 0.0, gap = 0.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    Rng rng(3003 + rep);
    Dataset d;
    d.features = oracle::random_matrix(200, 5, rng, -3.0, 3.0);
    d.targets.resize(200);
    const auto beta = oracle::random_vector(5, rng);
    for (std::size_t i = 0; i < 200; ++i) {
      const double s = oracle::dot(beta, d.features.row(i));
      d.targets[i] = (rep % 2 ? std::exp(s / 3) : std::max(s, 0.0)) + std::sin(d.features(i, 0)) + 0.1 * rng.normal();
    }
    const auto m = fit_fc_odt(d, 1e-8, SplitCriteria{.max_depth = 3});
    const auto b = compute_stumps(m, d);
    const auto g = stump_gram(b);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) gram_err = std::max(gram_err, std::abs(g(i, j) - (i == j)));
    const auto chk = verify_orthogonal_expansion(m, d);
    rel_dev = std::max(rel_dev, chk.max_abs_deviation / chk.target_scale);
    gap = std::max(gap, chk.prediction_gap / chk.target_scale);
    for (std::size_t k = 0; k < b.coefficients.size(); ++k) {
      const long t = b.column_node[k];
      if (t < 0) continue;
      const double dec = b.node_impurity_decrease[static_cast<std::size_t>(t)];
      const double c2 = b.coefficients[k] * b.coefficients[k];
      coef_err = std::max(coef_err, std::abs(c2 - dec) / std::max(dec, 1e-300));
    }
  }
  const bool pass = gram_err <= kStumpTol && rel_dev <= kStumpTol && coef_err <= kStumpTol;
  return {pass, "20 datasets; max |G - I| " + fmt("%.3g", gram_err) + ", max relative expansion deviation " +
                    fmt("%.3g", rel_dev) + ", max relative |c² - impurity decrease| " + fmt("%.3g", coef_err) +
                    " (tolerance " + fmt("%.0e", kStumpTol) + "); informational: predict() vs node-wise output gap " +
                    fmt("%.3g", gap) + " relative"};
}

using MeanTable = std::map<std::string, std::map<std::string, std::map<double, double>>>;  // ds → method → param → mean

MeanTable means(const ExperimentResult& r, const std::string& metric) {
  MeanTable t;
  for (const auto& row : summarize(r.records, metric)) t[row.dataset][row.method][row.param_value] = row.mean;
  return t;
}

std::string series(const std::map<double, double>& s) {
  std::string out;
  for (const auto& [k, v] : s) out += (out.empty() ? "" : " ") + fmt("%.4g", v);
  return out;
}

Verdict depth_sweep() {
  ExperimentConfig cfg;  // sim1, sim2; K = 2..6; 2000/500; 10 repeats
  const auto t = means(run_depth_sweep(cfg), "mse");
  bool pass = true;
  std::string detail;
  for (const auto& ds : cfg.datasets) {
    const auto& fc = t.at(ds).at("fc_odt");
    const auto& ridge = t.at(ds).at("ridge_odt");
    double prev = INFINITY;
    for (const auto& [k, v] : fc) {
      if (!(v < ridge.at(k))) pass = false;
      if (v > prev) pass = false;
      prev = v;
    }
    detail += ds + " FC-ODT [" + series(fc) + "] Ridge-ODT [" + series(ridge) + "]; ";
  }
  return {pass, detail + "requires FC-ODT < Ridge-ODT at every K and FC-ODT non-increasing in K"};
}

Verdict sample_sweep() {
  ExperimentConfig cfg;
  cfg.criteria.max_depth = 4;
  const auto t = means(run_sample_sweep(cfg), "mse");
  bool pass = true;
  std::string detail;
  for (const auto& ds : cfg.datasets) {
    const auto& fc = t.at(ds).at("fc_odt");
    const auto& ridge = t.at(ds).at("ridge_odt");
    for (const auto* s : {&fc, &ridge}) {
      double prev = INFINITY;
      for (const auto& [n, v] : *s) {
        if (!(v < prev)) pass = false;
        prev = v;
      }
    }
    for (const auto& [n, v] : fc)
      if (v > ridge.at(n)) pass = false;
    detail += ds + " FC-ODT [" + series(fc) + "] Ridge-ODT [" + series(ridge) + "]; ";
  }
  return {pass, detail + "requires strictly decreasing means (rank correlation -1) and FC-ODT <= Ridge-ODT"};
}

ExperimentConfig bench_config(bool scale) {
  ExperimentConfig cfg;
  cfg.methods = {Method::fc_odt, Method::ridge_odt, Method::cart};
  cfg.datasets = {"sim1", "sim2", "housing", "mpg", "bodyfat", "mg"};
  cfg.criteria.max_depth = 4;
  cfg.train_fraction = 0.6;
  cfg.minmax_scale = scale;
  return cfg;
}

struct Band {
  std::string dataset, method;
  double center, half;
};

std::string check_bands(const AggregateTable& t, const std::vector<Band>& bands, bool& pass) {
  std::string out;
  for (const auto& b : bands) {
    auto it = t.cells.find({b.dataset, b.method});
    if (it == t.cells.end()) continue;
    const double m = it->second.mean;
    const bool ok = std::abs(m - b.center) <= b.half;
    pass = pass && ok;
    out += b.dataset + " " + b.method + " " + fmt("%.3f", m) + " in [" + fmt("%.3f", b.center - b.half) + ", " +
           fmt("%.3f", b.center + b.half) + "] " + (ok ? "ok" : "OUT") + "; ";
  }
  return out;
}

const DatasetManifest& manifest() {
  static const DatasetManifest m = load_manifest(std::filesystem::path(FCODT_SOURCE_DIR) / "data" / "manifest.json");
  return m;
}

Verdict simulated_bands() {
  auto cfg = bench_config(true);
  cfg.datasets = {"sim1", "sim2"};
  RunOptions opts;
  opts.manifest = &manifest();
  const auto t = aggregate_benchmark(run_benchmark(cfg, opts).records, {}, kAlpha);
  bool pass = true;
  const std::string detail = check_bands(
      t, {{"sim1", "fc_odt", 0.877, 0.04}, {"sim1", "cart", 0.588, 0.06}, {"sim2", "fc_odt", 0.895, 0.04}}, pass);
  return {pass, detail + "10 repeats, 3:2 splits, K = 4, CV-tuned lambda, min-max scaled features"};
}

Verdict real_data() {
  std::string detail;
  bool pass = true;
  std::size_t fetched = 0;
  for (bool scale : {true, false}) {
    auto cfg = bench_config(scale);
    cfg.datasets = {"housing", "mpg", "bodyfat", "mg"};
    RunOptions opts;
    opts.manifest = &manifest();
    const auto r = run_benchmark(cfg, opts);
    const auto t = aggregate_benchmark(r.records, {}, kAlpha);
    bool verdict = true;
    std::string part = check_bands(
        t, {{"housing", "fc_odt", 0.776, 0.05}, {"housing", "cart", 0.738, 0.05}, {"mpg", "fc_odt", 0.840, 0.05}},
        verdict);
    for (const auto& ds : t.datasets) {
      const double fc = t.cells.at({ds, "fc_odt"}).mean, cart = t.cells.at({ds, "cart"}).mean;
      const bool ok = fc >= cart;
      verdict = verdict && ok;
      part += ds + " FC-ODT >= CART " + (ok ? "ok" : "NO") + "; ";
    }
    if (scale) {
      // the scaled protocol is the one evaluated; the unscaled run is reported only
      fetched = t.datasets.size();
      pass = verdict;
      for (const auto& s : r.skipped) part += "skipped " + s.dataset + "; ";
      detail += "[scaled, evaluated] " + part;
    } else {
      detail += "\n    [unscaled, informational: " + std::string(verdict ? "would pass" : "would fail") + "] " + part;
    }
  }
  if (fetched == 0) {
    pass = false;
    detail += "\n    no real dataset available; run tools/fetch_datasets.py";
  }
  return {pass, detail};
}

Verdict properties() {
  std::string detail;
  bool pass = true;
  auto fail = [&](const std::string& what) {
    if (pass) detail += "first failure: " + what + "; ";
    pass = false;
  };
  // byte-identical results CSV, including across worker counts
  ExperimentConfig cfg;
  cfg.depths = {2, 3};
  cfg.repeats = 2;
  cfg.sim_train = 300;
  cfg.sim_test = 100;
  auto csv = [](const ExperimentResult& r) {
    std::ostringstream s;
    write_results_csv(s, r.records);
    return s.str();
  };
  const std::string a = csv(run_depth_sweep(cfg));
  if (csv(run_depth_sweep(cfg)) != a) fail("rerun changed results CSV");
  cfg.workers = 2;
  if (csv(run_depth_sweep(cfg)) != a) fail("worker count changed results CSV");

  Rng rng(8008);
  int trees = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 50 + rng.below(250);
    const Dataset d = rep % 2 ? gen_sim2(n, 0.1, 500 + rep) : gen_sim1(n, 0.1, 500 + rep);
    const double lambda = std::pow(10.0, rng.uniform(-4, 3));
    SplitCriteria c{.max_depth = 1 + rng.below(6), .min_samples_split = 0, .min_samples_leaf = 1 + rng.below(10)};
    c.min_samples_split = 2 * c.min_samples_leaf + rng.below(20);
    const VariantFlags flags{rng.below(2) == 0, rng.below(2) == 0};
    const auto m = fit_fc_odt(d, lambda, c, flags);
    ++trees;
    if (!(m == fit_fc_odt(d, lambda, c, flags))) fail("refit differs");
    for (const auto& node : m.nodes) {
      if (node.is_leaf && node.depth > 0 && node.sample_count < c.min_samples_leaf) fail("leaf below min_samples_leaf");
      if (!node.is_leaf && node.sample_count < c.min_samples_split) fail("split below min_samples_split");
      if (!node.is_leaf && !(node.gain >= 0.0)) fail("negative gain");
      if (!node.is_leaf && node.projection.size() != (flags.concatenate ? d.dim() + node.depth : d.dim()) + 1)
        fail("representation dimension is not d + depth");
    }
    double prev = INFINITY;
    for (std::size_t k = 1; k <= c.max_depth; ++k) {
      auto ck = c;
      ck.max_depth = k;
      const auto mk = fit_fc_odt(d, lambda, ck, flags);
      const double e = mse(predict(mk, d.features), d.targets);
      if (e > prev * (1 + 1e-12)) fail("training MSE increased with depth");
      prev = e;
    }
    auto off = fit_fc_odt(d, lambda, c, VariantFlags{false, false});
    const auto ridge = fit_ridge_odt(d, lambda, c);
    off.kind = ridge.kind;
    if (!(off == ridge)) fail("FC-ODT{off,off} differs from Ridge-ODT");
  }
  detail += std::to_string(trees) + " randomized fits; determinism, leaf occupancy, nonnegative gains, "
            "per-level training MSE, d + k law, flag ablation";
  return {pass, detail};
}

}  // namespace

int main() {
  std::vector<bool> results;
  run_criterion(1, "ridge solver matches pivoted-elimination oracle", 5, results, ridge_oracle);
  run_criterion(2, "best_threshold and CART match brute-force oracles", 10, results, split_oracle);
  run_criterion(3, "orthonormal stump expansion", 30, results, stump_suite);
  run_criterion(4, "depth sweep ordering", 15 * 60, results, depth_sweep);
  run_criterion(5, "sample-size sweep ordering", 15 * 60, results, sample_sweep);
  run_criterion(6, "simulated R² bands", 20 * 60, results, simulated_bands);
  run_criterion(7, "real-data R² spot checks", 30 * 60, results, real_data);
  run_criterion(8, "property suite", 60, results, properties);
  int passed = 0;
  for (bool b : results) passed += b;
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
