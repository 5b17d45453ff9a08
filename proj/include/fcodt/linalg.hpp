#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fcodt {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  Vector column(std::size_t c) const;
  const std::vector<double>& data() const noexcept { return data_; }

  bool all_finite() const noexcept;
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;
  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(std::span<const double> v) noexcept;

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// XᵀX.
DenseMatrix gram(const DenseMatrix& x);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double max_abs(std::span<const double> v);

/// Closed-form ridge fit. The intercept (when fitted) is never penalized.
struct RidgeSolution {
  Vector weights;
  double intercept = 0.0;
  double lambda = 0.0;
};

struct RidgeOptions {
  bool fit_intercept = true;
};

/// Minimizes ||y - Xw - c·1||² + lambda·||w||² over (w, c).
///
/// Solved through the centered regularized normal equations
/// (XcᵀXc + λI)w = Xcᵀyc with a Cholesky factorization; c = ȳ - x̄ᵀw.
/// Throws ContractViolation on shape mismatch, negative lambda or non-finite
/// input, and SingularSystem when lambda = 0 and the design is rank deficient.
RidgeSolution solve_ridge(const DenseMatrix& x, std::span<const double> y, double lambda,
                          RidgeOptions options = {});

/// Solves Ax = b for symmetric positive definite A via Cholesky.
/// Throws NotPositiveDefinite naming the failing pivot.
Vector spd_solve(const DenseMatrix& a, std::span<const double> b);

/// weightsᵀrow + intercept. This is the single scoring routine used for both
/// training partitions and prediction, so routing is bit-reproducible.
double linear_score(std::span<const double> weights, double intercept,
                    std::span<const double> row);

Vector predict_linear(const RidgeSolution& model, const DenseMatrix& x);

}  // namespace fcodt
