#include "fcodt/baselines.hpp"

#include <string>

#include "fcodt/errors.hpp"
#include "tree_builder.hpp"

namespace fcodt {

ObliqueTreeModel fit_ridge_odt(const Dataset& data, double lambda, const SplitCriteria& criteria) {
  return fit_fc_odt(data, lambda, criteria, VariantFlags{false, false});
}

ObliqueTreeModel fit_cart(const Dataset& data, const SplitCriteria& criteria) {
  auto finder = [&](const DenseMatrix& x, std::span<const double> y,
                    std::size_t n_total) -> std::optional<detail::NodeSplit> {
    std::optional<ThresholdChoice> best;
    std::size_t best_feature = 0;
    Vector best_column;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Vector column = x.column(j);
      auto choice = best_threshold(column, y, n_total, criteria);
      if (choice && (!best || choice->gain > best->gain)) {
        best = choice;
        best_feature = j;
        best_column = std::move(column);
      }
    }
    if (!best) return std::nullopt;
    detail::NodeSplit out;
    out.projection.assign(x.cols() + 1, 0.0);
    out.projection[best_feature] = 1.0;
    out.scores = std::move(best_column);
    out.threshold = best->threshold;
    out.gain = best->gain;
    return out;
  };
  return detail::grow_tree(data, criteria, VariantFlags{false, false}, ModelKind::cart, 0.0,
                           finder);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::fc_odt: return "fc_odt";
    case Method::ridge_odt: return "ridge_odt";
    case Method::cart: return "cart";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fc_odt" || name == "FC-ODT") return Method::fc_odt;
  if (name == "ridge_odt" || name == "Ridge-ODT") return Method::ridge_odt;
  if (name == "cart" || name == "CART") return Method::cart;
  throw ContractViolation("unknown method '" + std::string(name) + "'");
}

bool uses_lambda(Method m) { return m != Method::cart; }

ObliqueTreeModel fit_method(Method m, const Dataset& data, double lambda,
                            const SplitCriteria& criteria) {
  switch (m) {
    case Method::fc_odt: return fit_fc_odt(data, lambda, criteria);
    case Method::ridge_odt: return fit_ridge_odt(data, lambda, criteria);
    case Method::cart: return fit_cart(data, criteria);
  }
  throw ContractViolation("unknown method");
}

}  // namespace fcodt
