#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "fcodt/linalg.hpp"

namespace fcodt {

struct DatasetMeta {
  std::string name;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  std::string source;
};

/// Dense n×d features plus targets. `noise_free` is either empty or holds the
/// regression function evaluated at each row (simulated data only).
struct Dataset {
  DenseMatrix features;
  Vector targets;
  Vector noise_free;
  DatasetMeta meta;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  bool empty() const noexcept { return targets.empty(); }

  /// Throws ContractViolation unless shapes agree and every value is finite.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace fcodt
