#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcodt/dataset.hpp"
#include "fcodt/linalg.hpp"

namespace fcodt {

/// Split eligibility criteria. A node at `depth` may split only when
/// depth < max_depth and it holds at least min_samples_split rows; each
/// child must receive at least min_samples_leaf rows and the impurity
/// decrease must reach min_gain.
struct SplitCriteria {
  std::size_t max_depth = 4;
  std::size_t min_samples_split = 20;
  std::size_t min_samples_leaf = 8;
  double min_gain = 0.0;

  void validate() const;
  friend bool operator==(const SplitCriteria&, const SplitCriteria&) = default;
};

struct VariantFlags {
  bool concatenate = true;
  bool residual_path = true;
  friend bool operator==(const VariantFlags&, const VariantFlags&) = default;
};

enum class ModelKind { fc_odt, ridge_odt, cart };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TreeNode {
  bool is_leaf = true;
  std::size_t depth = 0;
  std::size_t sample_count = 0;
  // internal nodes: weights over the node's representation, bias last
  Vector projection;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  // leaves: mean of the targets reaching the node
  double value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Fitted tree. Nodes are stored in breadth-first creation order with the
/// root at index 0; children of a node always have larger indices.
struct ObliqueTreeModel {
  ModelKind kind = ModelKind::fc_odt;
  std::size_t input_dim = 0;
  double lambda = 0.0;
  SplitCriteria criteria;
  VariantFlags flags;
  std::vector<TreeNode> nodes;

  std::size_t internal_count() const;
  std::size_t leaf_count() const;
  /// Largest number of internal nodes on any root-to-leaf path.
  std::size_t realized_depth() const;
  /// Width of the representation seen by an internal node at `depth`.
  std::size_t representation_dim(std::size_t depth) const {
    return flags.concatenate ? input_dim + depth : input_dim;
  }

  friend bool operator==(const ObliqueTreeModel&, const ObliqueTreeModel&) = default;
};

struct ThresholdChoice {
  double threshold = 0.0;
  double gain = 0.0;
};

/// Best midpoint threshold for routing `s < threshold` to the left child.
///
/// Scans sorted projections once with prefix sums, scoring each admissible
/// cut by the MSE impurity decrease normalized by `n_total`. Only cuts between
/// distinct values that leave min_samples_leaf rows on both sides qualify;
/// ties go to the smallest threshold. Returns nullopt when no cut qualifies or
/// the best gain is below criteria.min_gain.
std::optional<ThresholdChoice> best_threshold(std::span<const double> projections,
                                              std::span<const double> y, std::size_t n_total,
                                              const SplitCriteria& criteria);

struct SplitResult {
  RidgeSolution direction;
  Vector scores;
  double threshold = 0.0;
  double gain = 0.0;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

/// Ridge direction on (x_node, y_node) followed by best_threshold on the
/// resulting scores. Rejects nodes smaller than min_samples_split.
std::optional<SplitResult> find_oblique_split(const DenseMatrix& x_node,
                                              std::span<const double> y_node, double lambda,
                                              std::size_t n_total, const SplitCriteria& criteria);

/// [X, new_feature]
DenseMatrix concat_feature(const DenseMatrix& x, std::span<const double> new_feature);

/// Grows a tree breadth first. At each eligible node the ridge projection
/// score ỹ is appended as a feature for the children (flags.concatenate) and
/// subtracted from the targets they inherit (flags.residual_path).
ObliqueTreeModel fit_fc_odt(const Dataset& data, double lambda, const SplitCriteria& criteria,
                            VariantFlags flags = {});

struct PathStep {
  std::size_t node = 0;
  double score = 0.0;
  bool went_left = false;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct PathTrace {
  std::vector<PathStep> steps;
  std::size_t leaf = 0;
};

/// Internal-node visit sequence that predict() follows for x.
std::vector<PathStep> decision_path(const ObliqueTreeModel& model, std::span<const double> x);
PathTrace trace_path(const ObliqueTreeModel& model, std::span<const double> x);

/// Residual-path models return the sum of node scores along the path plus the
/// leaf value; other models return the leaf value.
double predict(const ObliqueTreeModel& model, std::span<const double> x);
Vector predict(const ObliqueTreeModel& model, const DenseMatrix& x);

/// Self-describing text format; numbers carry 17 significant digits.
std::string serialize_model(const ObliqueTreeModel& model);
ObliqueTreeModel deserialize_model(std::string_view text);

}  // namespace fcodt
