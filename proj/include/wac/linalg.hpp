#pragma once

// Small dense linear algebra kernel: just what the consensus engine and its
// spectral oracle need. Row-major storage, 64-bit floats, no expression
// templates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wac/error.hpp"

namespace wac {

using Vector = std::vector<double>;

inline bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

class DenseMatrix {
 public:
  DenseMatrix() = default;

  // n x n zero matrix.
  explicit DenseMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  DenseMatrix(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n_ * n_) {
      throw DimensionError("dense matrix: expected " + std::to_string(n_ * n_) + " entries, got " +
                           std::to_string(entries_.size()));
    }
    if (!all_finite(entries_)) throw DomainError("dense matrix: non-finite entry");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    std::vector<double> entries;
    entries.reserve(n * n);
    for (const auto& row : rows) {
      if (row.size() != n) throw DimensionError("dense matrix: rows must have length " + std::to_string(n));
      entries.insert(entries.end(), row.begin(), row.end());
    }
    return DenseMatrix(n, std::move(entries));
  }

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) { return {entries_.data() + i * n_, n_}; }

  std::span<const double> entries() const noexcept { return entries_; }

  DenseMatrix transpose() const {
    DenseMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

inline Vector matvec(const DenseMatrix& m, std::span<const double> x) {
  const std::size_t n = m.size();
  if (x.size() != n) {
    throw DimensionError("matvec: matrix is " + std::to_string(n) + "x" + std::to_string(n) +
                         ", vector has length " + std::to_string(x.size()));
  }
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = m.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionError("matmul: dimension mismatch");
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Sum norm: sum of absolute values.
inline double l1_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double xi : x) acc += std::abs(xi);
  return acc;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("l1_distance: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::abs(xi));
  return m;
}

// Maximum absolute row sum.
inline double inf_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) best = std::max(best, l1_norm(m.row(i)));
  return best;
}

namespace detail {

struct Echelon {
  DenseMatrix reduced;
  std::vector<std::size_t> pivot_col;  // pivot column of each pivot row, in row order
  std::vector<double> pivot_mag;       // |pivot| per pivot row
  std::vector<std::size_t> free_cols;
};

// Row echelon form by Gaussian elimination with partial pivoting. A column
// whose best remaining candidate is <= tol (or equals forced_free) is left
// without a pivot.
inline Echelon row_echelon(DenseMatrix a, double tol, std::optional<std::size_t> forced_free) {
  const std::size_t n = a.size();
  Echelon e;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = row;
    double best_mag = -1.0;
    for (std::size_t r = row; r < n; ++r) {
      if (std::abs(a(r, col)) > best_mag) {
        best_mag = std::abs(a(r, col));
        best = r;
      }
    }
    if (row >= n || best_mag <= tol || forced_free == col) {
      e.free_cols.push_back(col);
      continue;
    }
    if (best != row) std::swap_ranges(a.row(best).begin(), a.row(best).end(), a.row(row).begin());
    const double pivot = a(row, col);
    for (std::size_t r = row + 1; r < n; ++r) {
      const double factor = a(r, col) / pivot;
      if (factor == 0.0) continue;
      a(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= factor * a(row, j);
    }
    e.pivot_col.push_back(col);
    e.pivot_mag.push_back(best_mag);
    ++row;
  }
  e.reduced = std::move(a);
  return e;
}

// Back substitution on an echelon form with exactly one free column.
inline Vector back_substitute(const Echelon& e, std::size_t n) {
  Vector v(n, 0.0);
  v[e.free_cols.front()] = 1.0;
  for (std::size_t k = e.pivot_col.size(); k-- > 0;) {
    const std::size_t pc = e.pivot_col[k];
    const auto row = e.reduced.row(k);
    double acc = 0.0;
    for (std::size_t j = pc + 1; j < n; ++j) acc += row[j] * v[j];
    v[pc] = -acc / row[pc];
  }
  return v;
}

}  // namespace detail

// Null vector of a matrix of rank n-1. The result has unit sum norm and its
// first nonzero entry is positive. Throws HypothesisError when the numerical
// rank is not n-1.
inline Vector null_vector(const DenseMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw DimensionError("null_vector: empty matrix");
  if (!all_finite(m.entries())) throw DomainError("null_vector: non-finite entry");

  const double scale = inf_norm(m);
  const double tol = 1e-10 * scale;

  auto echelon = detail::row_echelon(m, tol, std::nullopt);
  if (echelon.free_cols.size() > 1) {
    throw HypothesisError("null_vector: rank deficiency " + std::to_string(echelon.free_cols.size()) +
                          " (expected exactly 1)");
  }
  if (echelon.free_cols.empty()) {
    // No pivot fell below tolerance: the weakest pivot's column is taken as
    // the free variable and elimination is redone around it.
    const auto weakest = std::min_element(echelon.pivot_mag.begin(), echelon.pivot_mag.end());
    const std::size_t col = echelon.pivot_col[static_cast<std::size_t>(weakest - echelon.pivot_mag.begin())];
    echelon = detail::row_echelon(m, tol, col);
    if (echelon.free_cols.size() != 1) throw HypothesisError("null_vector: rank deficiency is not 1");
  }

  Vector v = detail::back_substitute(echelon, n);
  if (!all_finite(v)) throw HypothesisError("null_vector: elimination produced non-finite values");

  const double norm = l1_norm(v);
  const auto first = std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
  const double sign = (first != v.end() && *first < 0.0) ? -1.0 : 1.0;
  for (double& x : v) x = sign * x / norm;

  const Vector residual = matvec(m, v);
  if (max_abs(residual) > 1e-10 * scale * max_abs(v)) {
    throw HypothesisError("null_vector: matrix is numerically nonsingular");
  }
  return v;
}

struct PowerResult {
  double eigenvalue = 0.0;  // Rayleigh quotient of the final iterate
  Vector vector;            // unit sum norm
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration with sum-norm normalization. Stops when successive
// normalized iterates are within tol in the sum norm. Running out of
// iterations is reported through PowerResult::converged.
inline PowerResult power_iteration(const DenseMatrix& m, std::span<const double> x0, std::size_t max_iter,
                                   double tol) {
  if (x0.size() != m.size()) throw DimensionError("power_iteration: start vector length mismatch");
  const double norm0 = l1_norm(x0);
  if (norm0 == 0.0) throw DomainError("power_iteration: start vector is zero");

  PowerResult result;
  Vector x(x0.begin(), x0.end());
  for (double& xi : x) xi /= norm0;

  auto rayleigh = [&m](const Vector& u) {
    const Vector mu = matvec(m, u);
    return dot(u, mu) / dot(u, u);
  };

  for (std::size_t k = 1; k <= max_iter; ++k) {
    Vector y = matvec(m, x);
    const double ny = l1_norm(y);
    if (ny == 0.0) {
      // x is in the null space; eigenvalue 0.
      result.eigenvalue = 0.0;
      result.vector = std::move(x);
      result.iterations = k;
      result.converged = true;
      return result;
    }
    for (double& yi : y) yi /= ny;
    const double step = l1_distance(x, y);
    x = std::move(y);
    result.iterations = k;
    if (step < tol) {
      result.converged = true;
      break;
    }
  }
  result.eigenvalue = rayleigh(x);
  result.vector = std::move(x);
  return result;
}

}  // namespace wac
