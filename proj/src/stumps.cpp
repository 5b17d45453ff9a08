#include "fcodt/stumps.hpp"

#include <cmath>
#include <string>

#include "fcodt/errors.hpp"

namespace fcodt {

namespace {

struct RowRoute {
  std::vector<std::size_t> nodes;  // root .. leaf
  Vector scores;                   // one per internal node on the route
  Vector functional;               // F along the route, same length as nodes
};

}  // namespace

StumpBasis compute_stumps(const ObliqueTreeModel& model, const Dataset& training) {
  training.validate();
  if (training.dim() != model.input_dim)
    throw ContractViolation("compute_stumps: data has " + std::to_string(training.dim()) +
                            " features, model expects " + std::to_string(model.input_dim));
  if (training.empty()) throw ContractViolation("compute_stumps: empty dataset");

  const std::size_t n = training.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& y = training.targets;

  StumpBasis basis;
  basis.linear_functionals = model.flags.residual_path;
  basis.exact_regime = model.lambda <= 1e-6;

  std::vector<RowRoute> routes(n);
  std::vector<std::vector<std::size_t>> rows_of(model.nodes.size());
  for (std::size_t i = 0; i < n; ++i) {
    const PathTrace trace = trace_path(model, training.features.row(i));
    for (const auto& step : trace.steps) {
      routes[i].nodes.push_back(step.node);
      routes[i].scores.push_back(step.score);
    }
    routes[i].nodes.push_back(trace.leaf);
    for (std::size_t node : routes[i].nodes) rows_of[node].push_back(i);
    routes[i].functional.assign(routes[i].nodes.size(), 0.0);
  }

  if (basis.linear_functionals) {
    for (auto& r : routes) {
      double acc = 0.0;
      for (std::size_t k = 0; k < r.scores.size(); ++k) r.functional[k] = acc += r.scores[k];
    }
    // Leaves: parent functional plus a ridge fit of the remaining residual.
    for (std::size_t leaf = 0; leaf < model.nodes.size(); ++leaf) {
      if (!model.nodes[leaf].is_leaf || rows_of[leaf].empty()) continue;
      const auto& members = rows_of[leaf];
      const std::size_t depth = model.nodes[leaf].depth;
      const std::size_t width = model.representation_dim(depth);
      DenseMatrix rep(members.size(), width);
      Vector resid(members.size());
      for (std::size_t m = 0; m < members.size(); ++m) {
        const std::size_t i = members[m];
        auto x = training.features.row(i);
        auto dst = rep.row(m);
        std::copy(x.begin(), x.end(), dst.begin());
        if (model.flags.concatenate)
          for (std::size_t k = 0; k < depth; ++k) dst[model.input_dim + k] = routes[i].scores[k];
        const double parent = depth > 0 ? routes[i].functional[depth - 1] : 0.0;
        resid[m] = y[i] - parent;
      }
      Vector fit;
      try {
        fit = predict_linear(solve_ridge(rep, resid, model.lambda), rep);
      } catch (const NumericalError&) {
        double mean = 0.0;
        for (double v : resid) mean += v;
        fit.assign(members.size(), mean / static_cast<double>(members.size()));
      }
      for (std::size_t m = 0; m < members.size(); ++m) {
        const std::size_t i = members[m];
        const double parent = depth > 0 ? routes[i].functional[depth - 1] : 0.0;
        routes[i].functional[depth] = parent + fit[m];
      }
    }
  } else {
    Vector node_mean(model.nodes.size(), 0.0);
    for (std::size_t t = 0; t < model.nodes.size(); ++t) {
      if (rows_of[t].empty()) continue;
      double s = 0.0;
      for (std::size_t i : rows_of[t]) s += y[i];
      node_mean[t] = s / static_cast<double>(rows_of[t].size());
    }
    for (auto& r : routes)
      for (std::size_t k = 0; k < r.nodes.size(); ++k) r.functional[k] = node_mean[r.nodes[k]];
  }

  basis.tree_output.resize(n);
  for (std::size_t i = 0; i < n; ++i) basis.tree_output[i] = routes[i].functional.back();

  std::vector<Vector> columns;
  auto add_column = [&](Vector v, long node) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq * inv_n);
    for (double& x : v) x /= norm;
    columns.push_back(std::move(v));
    basis.column_node.push_back(node);
  };

  {
    Vector root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = routes[i].functional[0];
    if (max_abs(root) > 0.0) add_column(std::move(root), -1);
  }

  basis.node_impurity_decrease.assign(model.nodes.size(), 0.0);
  for (std::size_t t = 0; t < model.nodes.size(); ++t) {
    const TreeNode& node = model.nodes[t];
    if (node.is_leaf || rows_of[t].empty()) continue;
    const std::size_t depth = node.depth;
    double pp = 0.0, gp = 0.0, gg = 0.0, before = 0.0, after = 0.0;
    for (std::size_t i : rows_of[t]) {
      const double p = routes[i].functional[depth];
      const double g = routes[i].functional[depth + 1];
      pp += p * p;
      gp += g * p;
      gg += g * g;
      before += (y[i] - p) * (y[i] - p);
      after += (y[i] - g) * (y[i] - g);
    }
    basis.node_impurity_decrease[t] = (before - after) * inv_n;

    const double coef = pp > 0.0 ? gp / pp : 0.0;
    Vector v(n, 0.0);
    double vv = 0.0;
    for (std::size_t i : rows_of[t]) {
      v[i] = routes[i].functional[depth + 1] - coef * routes[i].functional[depth];
      vv += v[i] * v[i];
    }
    if (!(vv > 1e-24 * std::max(gg, 1e-300))) {
      basis.dropped_nodes.push_back(t);
      continue;
    }
    add_column(std::move(v), static_cast<long>(t));
  }

  basis.stumps = DenseMatrix(n, columns.size());
  basis.coefficients.resize(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      basis.stumps(i, k) = columns[k][i];
      c += y[i] * columns[k][i];
    }
    basis.coefficients[k] = c * inv_n;
  }
  return basis;
}

DenseMatrix stump_gram(const StumpBasis& basis) {
  const std::size_t n = basis.stumps.rows();
  DenseMatrix g = gram(basis.stumps);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) /= static_cast<double>(n);
  return g;
}

ExpansionCheck verify_orthogonal_expansion(const ObliqueTreeModel& model,
                                           const Dataset& training) {
  const StumpBasis basis = compute_stumps(model, training);
  ExpansionCheck out;
  out.columns = basis.coefficients.size();
  out.dropped = basis.dropped_nodes.size();
  out.target_scale = max_abs(training.targets);
  for (std::size_t i = 0; i < training.size(); ++i) {
    double expansion = 0.0;
    for (std::size_t k = 0; k < basis.coefficients.size(); ++k)
      expansion += basis.coefficients[k] * basis.stumps(i, k);
    out.max_abs_deviation =
        std::max(out.max_abs_deviation, std::abs(basis.tree_output[i] - expansion));
    out.prediction_gap = std::max(
        out.prediction_gap,
        std::abs(predict(model, training.features.row(i)) - basis.tree_output[i]));
  }
  return out;
}

Vector indicator_stump(std::size_t n_rows, std::span<const std::size_t> left,
                       std::span<const std::size_t> right) {
  if (left.empty() || right.empty()) throw ContractViolation("indicator_stump: empty child");
  const double nl = static_cast<double>(left.size());
  const double nr = static_cast<double>(right.size());
  const double w = (nl + nr) / static_cast<double>(n_rows);
  const double denom = std::sqrt(w * nl * nr);
  Vector psi(n_rows, 0.0);
  for (std::size_t i : left) psi.at(i) = nr / denom;
  for (std::size_t i : right) psi.at(i) = -nl / denom;
  return psi;
}

}  // namespace fcodt
