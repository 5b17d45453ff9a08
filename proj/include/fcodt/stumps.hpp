#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fcodt/dataset.hpp"
#include "fcodt/linalg.hpp"
#include "fcodt/tree.hpp"

namespace fcodt {

/// Orthonormal decision stumps of a fitted tree, evaluated on its training rows.
///
/// Every node t carries a functional F_t defined on the rows it holds:
///  - residual-path models: the running sum of node scores down to t, i.e.
///    the node-wise ridge fit of the original targets. A leaf has no fit of
///    its own, so its functional is the parent's plus a ridge fit (at the
///    model's lambda) of the leaf residual on the leaf's representation;
///  - other models: the mean target of the node.
///
/// Column 0 is F_root normalized. Each internal node t contributes the
/// children's functional on t Gram-Schmidt orthogonalized against F_t and
/// normalized under ⟨u, v⟩_n = (1/n)Σ u_i v_i.
///
/// With lambda → 0 the columns are orthonormal and Σ_k ⟨y, ψ_k⟩ψ_k equals the
/// node-wise tree output (F of each row's leaf). For residual-path models
/// that output differs from predict(), whose leaves add the residual mean
/// instead of a leaf ridge fit; `prediction_gap` reports the difference.
struct StumpBasis {
  DenseMatrix stumps;                    // n × columns, rows in dataset order
  Vector coefficients;                   // ⟨y, ψ_k⟩_n against the original targets
  std::vector<long> column_node;         // -1 marks the root functional column
  std::vector<std::size_t> dropped_nodes;  // stumps with zero norm after orthogonalization
  Vector node_impurity_decrease;         // per node; 0 for leaves
  Vector tree_output;                    // F_leaf(x_i)
  bool linear_functionals = false;
  bool exact_regime = false;             // lambda <= 1e-6
};

StumpBasis compute_stumps(const ObliqueTreeModel& model, const Dataset& training);

/// Empirical Gram matrix ⟨ψ_j, ψ_k⟩_n of the stump columns.
DenseMatrix stump_gram(const StumpBasis& basis);

struct ExpansionCheck {
  double max_abs_deviation = 0.0;  // max_i |tree_output_i - Σ_k c_k ψ_k(x_i)|
  double target_scale = 0.0;       // max_i |y_i|
  double prediction_gap = 0.0;     // max_i |predict(x_i) - tree_output_i|
  std::size_t columns = 0;
  std::size_t dropped = 0;
};

ExpansionCheck verify_orthogonal_expansion(const ObliqueTreeModel& model, const Dataset& training);

/// Closed-form stump for a split of node t into rows `left` and `right` when
/// the node functionals are constants: (1_L n_R - 1_R n_L) / sqrt(w(t) n_L n_R)
/// with w(t) = n(t)/n. Returns a length-n vector.
Vector indicator_stump(std::size_t n_rows, std::span<const std::size_t> left,
                       std::span<const std::size_t> right);

}  // namespace fcodt
