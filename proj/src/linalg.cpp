#include "fcodt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fcodt/errors.hpp"

namespace fcodt {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ContractViolation("DenseMatrix: data length " + std::to_string(data_.size()) +
                            " != rows*cols " + std::to_string(rows * cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ContractViolation("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(data));
}

Vector DenseMatrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

bool DenseMatrix::all_finite() const noexcept { return fcodt::all_finite(data_); }

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ContractViolation("matmul: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ContractViolation("matvec: dimension mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

DenseMatrix gram(const DenseMatrix& x) {
  const std::size_t p = x.cols();
  DenseMatrix g(p, p);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = row[i];
      for (std::size_t j = i; j < p; ++j) g(i, j) += xi * row[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// In-place lower Cholesky factor. A pivot at or below `floor` fails.
// Returns the index of the failing pivot, or -1 on success.
long cholesky_in_place(DenseMatrix& a, double floor) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > floor)) return static_cast<long>(j);
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  return -1;
}

Vector cholesky_solve(const DenseMatrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

void require_square_symmetric(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ContractViolation("spd_solve: matrix is not square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double scale = std::max({std::abs(a(i, j)), std::abs(a(j, i)), 1.0});
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
        throw ContractViolation("spd_solve: matrix is not symmetric");
    }
}

}  // namespace

Vector spd_solve(const DenseMatrix& a, std::span<const double> b) {
  require_square_symmetric(a);
  if (b.size() != a.rows()) throw ContractViolation("spd_solve: rhs length mismatch");
  if (!a.all_finite() || !all_finite(b)) throw ContractViolation("spd_solve: non-finite input");
  DenseMatrix l = a;
  if (long bad = cholesky_in_place(l, 0.0); bad >= 0)
    throw NotPositiveDefinite(static_cast<std::size_t>(bad));
  return cholesky_solve(l, b);
}

RidgeSolution solve_ridge(const DenseMatrix& x, std::span<const double> y, double lambda,
                          RidgeOptions options) {
  if (x.rows() != y.size())
    throw ContractViolation("solve_ridge: X has " + std::to_string(x.rows()) +
                            " rows but y has " + std::to_string(y.size()) + " entries");
  if (x.rows() == 0) throw ContractViolation("solve_ridge: empty design");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ContractViolation("solve_ridge: lambda must be finite and >= 0");
  if (!x.all_finite() || !all_finite(y)) throw ContractViolation("solve_ridge: non-finite input");

  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  Vector x_mean(p, 0.0);
  double y_mean = 0.0;
  if (options.fit_intercept) {
    for (std::size_t r = 0; r < n; ++r) {
      auto row = x.row(r);
      for (std::size_t j = 0; j < p; ++j) x_mean[j] += row[j];
      y_mean += y[r];
    }
    for (double& m : x_mean) m /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
  }

  DenseMatrix a(p, p);
  Vector rhs(p, 0.0);
  Vector centered(p);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t j = 0; j < p; ++j) centered[j] = row[j] - x_mean[j];
    const double yc = y[r] - y_mean;
    for (std::size_t i = 0; i < p; ++i) {
      const double ci = centered[i];
      rhs[i] += ci * yc;
      for (std::size_t j = i; j < p; ++j) a(i, j) += ci * centered[j];
    }
  }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
    max_diag = std::max(max_diag, a(i, i));
    a(i, i) += lambda;
  }

  // At lambda = 0 a pivot that is negligible relative to the Gram scale means
  // the design is numerically rank deficient.
  const double floor = lambda > 0.0 ? 0.0 : 1e-12 * std::max(max_diag, 1e-300);
  DenseMatrix l = a;
  if (long bad = cholesky_in_place(l, floor); bad >= 0) {
    if (lambda > 0.0) throw NotPositiveDefinite(static_cast<std::size_t>(bad));
    throw SingularSystem("design is rank deficient at lambda = 0 (pivot " +
                         std::to_string(bad) + ")");
  }

  RidgeSolution sol;
  sol.weights = cholesky_solve(l, rhs);
  sol.lambda = lambda;
  if (options.fit_intercept) sol.intercept = y_mean - dot(x_mean, sol.weights);
  return sol;
}

double linear_score(std::span<const double> weights, double intercept,
                    std::span<const double> row) {
  double s = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * row[j];
  return s + intercept;
}

Vector predict_linear(const RidgeSolution& model, const DenseMatrix& x) {
  if (x.cols() != model.weights.size())
    throw ContractViolation("predict_linear: X has " + std::to_string(x.cols()) +
                            " columns, model expects " + std::to_string(model.weights.size()));
  Vector out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    out[r] = linear_score(model.weights, model.intercept, x.row(r));
  return out;
}

}  // namespace fcodt
