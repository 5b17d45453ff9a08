#pragma once

#include <string_view>

#include "fcodt/dataset.hpp"
#include "fcodt/tree.hpp"

namespace fcodt {

/// Oblique tree with ridge split directions, no concatenation and plain mean
/// leaves. Shares every code path with fit_fc_odt.
ObliqueTreeModel fit_ridge_odt(const Dataset& data, double lambda, const SplitCriteria& criteria);

/// Axis-parallel regression tree. Each node tries best_threshold on every
/// feature column; ties go to the lowest feature index, then the smallest
/// threshold. Splits are stored as unit projections so the model shares the
/// oblique tree format and predict().
ObliqueTreeModel fit_cart(const Dataset& data, const SplitCriteria& criteria);

enum class Method { fc_odt, ridge_odt, cart };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
bool uses_lambda(Method m);

/// Dispatch by method; `lambda` is ignored for CART.
ObliqueTreeModel fit_method(Method m, const Dataset& data, double lambda,
                            const SplitCriteria& criteria);

}  // namespace fcodt
