#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fcodt/tree.hpp"

namespace fcodt::detail {

struct NodeSplit {
  Vector projection;  // weights then bias
  Vector scores;      // projection applied to every row of the node
  double threshold = 0.0;
  double gain = 0.0;
};

using SplitFinder = std::function<std::optional<NodeSplit>(
    const DenseMatrix& x_node, std::span<const double> y_node, std::size_t n_total)>;

/// Breadth-first growth shared by every tree variant. Rows are first put in
/// a canonical (lexicographic) order so the fitted model does not depend on
/// the order of the training rows.
ObliqueTreeModel grow_tree(const Dataset& data, const SplitCriteria& criteria,
                           VariantFlags flags, ModelKind kind, double lambda,
                           const SplitFinder& finder);

}  // namespace fcodt::detail
