#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"
#include "fcodt/rng.hpp"

namespace fcodt {

double mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw ContractViolation("mse: " + std::to_string(pred.size()) + " predictions for " +
                            std::to_string(target.size()) + " targets");
  if (target.empty()) throw ContractViolation("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = pred[i] - target[i];
    s += e * e;
  }
  return s / static_cast<double>(target.size());
}

double r2(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw ContractViolation("r2: " + std::to_string(pred.size()) + " predictions for " +
                            std::to_string(target.size()) + " targets");
  if (target.size() < 2) throw ContractViolation("r2: need at least two targets");
  const double mean =
      std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    ss_res += (pred[i] - target[i]) * (pred[i] - target[i]);
    ss_tot += (target[i] - mean) * (target[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw ContractViolation("undefined R²: target is constant");
  return 1.0 - ss_res / ss_tot;
}

GridSearchResult grid_search_lambda(const Dataset& data, Method method,
                                    const SplitCriteria& criteria, std::span<const double> grid,
                                    std::size_t folds, std::uint64_t seed) {
  if (grid.empty()) throw ContractViolation("grid_search_lambda: empty grid");
  if (folds < 2) throw ContractViolation("grid_search_lambda: folds must be >= 2");
  for (double l : grid)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw ContractViolation("grid_search_lambda: lambda values must be finite and >= 0");
  GridSearchResult out;
  if (!uses_lambda(method)) {
    out.best_lambda = grid.front();
    return out;
  }

  const auto split = kfold_indices(data.size(), folds, seed);
  std::vector<Dataset> train, valid;
  for (const auto& f : split) {
    train.push_back(data.subset(f.train));
    valid.push_back(data.subset(f.test));
  }

  std::optional<std::size_t> best;
  for (double lambda : grid) {
    CvCell cell;
    cell.lambda = lambda;
    for (std::size_t f = 0; f < folds; ++f) {
      try {
        const auto model = fit_method(method, train[f], lambda, criteria);
        cell.fold_mse.push_back(mse(predict(model, valid[f].features), valid[f].targets));
      } catch (const std::exception& e) {
        cell.fold_mse.push_back(std::numeric_limits<double>::quiet_NaN());
        if (cell.error.empty()) cell.error = e.what();
      }
    }
    if (cell.error.empty()) {
      cell.mean_mse = std::accumulate(cell.fold_mse.begin(), cell.fold_mse.end(), 0.0) /
                      static_cast<double>(folds);
    } else {
      cell.mean_mse = std::numeric_limits<double>::quiet_NaN();
    }
    out.table.push_back(std::move(cell));
    const CvCell& c = out.table.back();
    if (!c.error.empty()) continue;
    const auto& incumbent = best ? &out.table[*best] : nullptr;
    // Strict improvement only: equal means keep the smaller lambda.
    if (!incumbent || c.mean_mse < incumbent->mean_mse ||
        (c.mean_mse == incumbent->mean_mse && c.lambda < incumbent->lambda))
      best = out.table.size() - 1;
  }
  if (!best)
    throw NumericalError("grid search: every lambda failed; first error: " + out.table[0].error);
  out.best_lambda = out.table[*best].lambda;
  return out;
}

namespace {

Vector midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  Vector ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

RankSumResult rank_sum_test(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty())
    throw ContractViolation("rank_sum_test: both samples must be nonempty");
  Vector pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  if (!all_finite(pooled)) throw ContractViolation("rank_sum_test: non-finite value");

  const std::size_t na = sample_a.size(), nb = sample_b.size(), n = na + nb;
  const Vector ranks = midranks(pooled);
  RankSumResult out;
  out.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
  const double expected = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;

  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) {
    out.p_value = 1.0;
    out.exact = n <= 12;
    return out;
  }

  const double observed = std::abs(out.statistic - expected);
  if (n <= 12) {
    out.exact = true;
    std::size_t extreme = 0, total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) w += ranks[i];
      ++total;
      if (std::abs(w - expected) >= observed - 1e-9) ++extreme;
    }
    out.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    return out;
  }

  // Tie-corrected variance: na nb / 12 · ((n + 1) − Σ(t³ − t) / (n (n − 1))).
  Vector sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double dn = static_cast<double>(n);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  const double z = std::max(observed - 0.5, 0.0) / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

}  // namespace fcodt
