#include "fcodt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "fcodt/errors.hpp"
#include "tree_builder.hpp"

namespace fcodt {

void SplitCriteria::validate() const {
  if (max_depth < 1) throw ContractViolation("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw ContractViolation("min_samples_leaf must be >= 1");
  if (min_samples_split < 2 * min_samples_leaf)
    throw ContractViolation("min_samples_split must be >= 2 * min_samples_leaf");
  if (!(min_gain >= 0.0) || !std::isfinite(min_gain))
    throw ContractViolation("min_gain must be finite and >= 0");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::fc_odt: return "fc_odt";
    case ModelKind::ridge_odt: return "ridge_odt";
    case ModelKind::cart: return "cart";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "fc_odt") return ModelKind::fc_odt;
  if (name == "ridge_odt") return ModelKind::ridge_odt;
  if (name == "cart") return ModelKind::cart;
  throw ContractViolation("unknown model kind '" + std::string(name) + "'");
}

std::size_t ObliqueTreeModel::internal_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf; }));
}

std::size_t ObliqueTreeModel::leaf_count() const { return nodes.size() - internal_count(); }

std::size_t ObliqueTreeModel::realized_depth() const {
  std::size_t depth = 0;
  for (const auto& n : nodes)
    if (n.is_leaf) depth = std::max(depth, n.depth);
  return depth;
}

std::optional<ThresholdChoice> best_threshold(std::span<const double> projections,
                                              std::span<const double> y, std::size_t n_total,
                                              const SplitCriteria& criteria) {
  const std::size_t m = projections.size();
  if (y.size() != m) throw ContractViolation("best_threshold: length mismatch");
  if (m < 2) throw ContractViolation("best_threshold: need at least two rows");
  if (n_total < m) throw ContractViolation("best_threshold: n_total smaller than node size");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return projections[a] < projections[b]; });

  // Centering keeps the prefix-sum form of the gain well conditioned:
  // gain·n_total = S_L²/n_L + S_R²/n_R - S²/m with S sums of centered y.
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(m);
  double total = 0.0;
  for (double v : y) total += v - mean;

  const std::size_t min_leaf = std::max<std::size_t>(criteria.min_samples_leaf, 1);
  const double parent_term = total * total / static_cast<double>(m);
  std::optional<ThresholdChoice> best;
  double left_sum = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    left_sum += y[order[i - 1]] - mean;
    const double lo = projections[order[i - 1]];
    const double hi = projections[order[i]];
    if (i < min_leaf || m - i < min_leaf || !(lo < hi)) continue;
    const double n_left = static_cast<double>(i);
    const double n_right = static_cast<double>(m - i);
    const double right_sum = total - left_sum;
    double gain = (left_sum * left_sum / n_left + right_sum * right_sum / n_right - parent_term) /
                  static_cast<double>(n_total);
    gain = std::max(gain, 0.0);
    if (!best || gain > best->gain) {
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid > lo)) mid = hi;  // adjacent doubles: keep lo on the left
      best = ThresholdChoice{mid, gain};
    }
  }
  if (!best || best->gain < criteria.min_gain) return std::nullopt;
  return best;
}

std::optional<SplitResult> find_oblique_split(const DenseMatrix& x_node,
                                              std::span<const double> y_node, double lambda,
                                              std::size_t n_total, const SplitCriteria& criteria) {
  if (x_node.rows() != y_node.size())
    throw ContractViolation("find_oblique_split: X and y row counts differ");
  if (x_node.rows() < criteria.min_samples_split || x_node.rows() < 2)
    throw ContractViolation("find_oblique_split: node has " + std::to_string(x_node.rows()) +
                            " rows, fewer than min_samples_split = " +
                            std::to_string(criteria.min_samples_split));

  SplitResult out;
  out.direction = solve_ridge(x_node, y_node, lambda);
  out.scores = predict_linear(out.direction, x_node);
  auto choice = best_threshold(out.scores, y_node, n_total, criteria);
  if (!choice) return std::nullopt;
  out.threshold = choice->threshold;
  out.gain = choice->gain;
  for (std::size_t i = 0; i < out.scores.size(); ++i)
    (out.scores[i] < out.threshold ? out.left : out.right).push_back(i);
  return out;
}

DenseMatrix concat_feature(const DenseMatrix& x, std::span<const double> new_feature) {
  if (new_feature.size() != x.rows())
    throw ContractViolation("concat_feature: feature has " + std::to_string(new_feature.size()) +
                            " entries, matrix has " + std::to_string(x.rows()) + " rows");
  DenseMatrix out(x.rows(), x.cols() + 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r);
    auto dst = out.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[x.cols()] = new_feature[r];
  }
  return out;
}

namespace detail {

namespace {

std::vector<std::size_t> canonical_order(const Dataset& data) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = data.features.row(a);
    auto rb = data.features.row(b);
    for (std::size_t j = 0; j < ra.size(); ++j)
      if (ra[j] != rb[j]) return ra[j] < rb[j];
    return data.targets[a] < data.targets[b];
  });
  return order;
}

struct PendingNode {
  std::size_t index;
  DenseMatrix x;
  Vector y;
};

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

ObliqueTreeModel grow_tree(const Dataset& data, const SplitCriteria& criteria,
                           VariantFlags flags, ModelKind kind, double lambda,
                           const SplitFinder& finder) {
  data.validate();
  if (data.empty()) throw ContractViolation("cannot fit a tree on an empty dataset");
  if (data.dim() < 1) throw ContractViolation("dataset has no features");
  criteria.validate();

  ObliqueTreeModel model;
  model.kind = kind;
  model.input_dim = data.dim();
  model.lambda = lambda;
  model.criteria = criteria;
  model.flags = flags;

  const auto order = canonical_order(data);
  Vector root_y(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) root_y[i] = data.targets[order[i]];

  const std::size_t n_total = data.size();
  model.nodes.push_back(TreeNode{});
  std::deque<PendingNode> queue;
  queue.push_back({0, data.features.select_rows(order), std::move(root_y)});

  while (!queue.empty()) {
    PendingNode cur = std::move(queue.front());
    queue.pop_front();
    const std::size_t depth = model.nodes[cur.index].depth;
    const std::size_t rows = cur.y.size();

    std::optional<NodeSplit> split;
    if (depth < criteria.max_depth && rows >= criteria.min_samples_split)
      split = finder(cur.x, cur.y, n_total);

    if (!split) {
      TreeNode& leaf = model.nodes[cur.index];
      leaf.is_leaf = true;
      leaf.sample_count = rows;
      leaf.value = mean_of(cur.y);
      continue;
    }

    DenseMatrix child_x = flags.concatenate ? concat_feature(cur.x, split->scores) : cur.x;
    Vector child_y = cur.y;
    if (flags.residual_path)
      for (std::size_t i = 0; i < rows; ++i) child_y[i] -= split->scores[i];

    std::vector<std::size_t> left, right;
    for (std::size_t i = 0; i < rows; ++i)
      (split->scores[i] < split->threshold ? left : right).push_back(i);

    const std::size_t left_index = model.nodes.size();
    const std::size_t right_index = left_index + 1;
    {
      TreeNode& node = model.nodes[cur.index];
      node.is_leaf = false;
      node.sample_count = rows;
      node.projection = std::move(split->projection);
      node.threshold = split->threshold;
      node.gain = split->gain;
      node.left = left_index;
      node.right = right_index;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      TreeNode child;
      child.depth = depth + 1;
      model.nodes.push_back(child);
    }

    auto make_child = [&](std::size_t index, const std::vector<std::size_t>& rows_of_child) {
      Vector y(rows_of_child.size());
      for (std::size_t i = 0; i < rows_of_child.size(); ++i) y[i] = child_y[rows_of_child[i]];
      queue.push_back({index, child_x.select_rows(rows_of_child), std::move(y)});
    };
    make_child(left_index, left);
    make_child(right_index, right);
  }
  return model;
}

}  // namespace detail

ObliqueTreeModel fit_fc_odt(const Dataset& data, double lambda, const SplitCriteria& criteria,
                            VariantFlags flags) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ContractViolation("lambda must be finite and >= 0");
  const ModelKind kind = (!flags.concatenate && !flags.residual_path) ? ModelKind::ridge_odt
                                                                      : ModelKind::fc_odt;
  auto finder = [&](const DenseMatrix& x, std::span<const double> y,
                    std::size_t n_total) -> std::optional<detail::NodeSplit> {
    auto split = find_oblique_split(x, y, lambda, n_total, criteria);
    if (!split) return std::nullopt;
    detail::NodeSplit out;
    out.projection = split->direction.weights;
    out.projection.push_back(split->direction.intercept);
    out.scores = std::move(split->scores);
    out.threshold = split->threshold;
    out.gain = split->gain;
    return out;
  };
  return detail::grow_tree(data, criteria, flags, kind, lambda, finder);
}

PathTrace trace_path(const ObliqueTreeModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim)
    throw ContractViolation("input has " + std::to_string(x.size()) +
                            " features, model expects " + std::to_string(model.input_dim));
  if (model.nodes.empty()) throw ContractViolation("model has no nodes");
  PathTrace trace;
  Vector rep(x.begin(), x.end());
  std::size_t index = 0;
  while (!model.nodes[index].is_leaf) {
    const TreeNode& node = model.nodes[index];
    const std::size_t p = node.projection.size() - 1;
    if (p != rep.size()) throw ContractViolation("corrupt model: projection width mismatch");
    const double s =
        linear_score(std::span<const double>(node.projection).first(p), node.projection[p], rep);
    const bool left = s < node.threshold;
    trace.steps.push_back({index, s, left});
    if (model.flags.concatenate) rep.push_back(s);
    index = left ? node.left : node.right;
  }
  trace.leaf = index;
  return trace;
}

std::vector<PathStep> decision_path(const ObliqueTreeModel& model, std::span<const double> x) {
  return trace_path(model, x).steps;
}

double predict(const ObliqueTreeModel& model, std::span<const double> x) {
  const PathTrace trace = trace_path(model, x);
  const double leaf = model.nodes[trace.leaf].value;
  if (!model.flags.residual_path) return leaf;
  double acc = 0.0;
  for (const auto& step : trace.steps) acc += step.score;
  return acc + leaf;
}

Vector predict(const ObliqueTreeModel& model, const DenseMatrix& x) {
  if (x.cols() != model.input_dim && x.rows() > 0)
    throw ContractViolation("input has " + std::to_string(x.cols()) +
                            " features, model expects " + std::to_string(model.input_dim));
  Vector out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(model, x.row(r));
  return out;
}

}  // namespace fcodt
