#pragma once

// Small dense linear algebra for the ridge learners. Matrices here are at
// most a few dozen rows, so everything is O(d^3) and allocation-light.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hetbandits {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector add(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double s);

// Symmetric positive-definite matrix, stored dense row-major.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  static SpdMatrix identity(std::size_t dim, double scale = 1.0);
  static SpdMatrix diagonal(std::span<const double> values);
  // Throws std::invalid_argument when rows are ragged or the input is not
  // symmetric to 1e-9 relative.
  static SpdMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static SpdMatrix from_dense(std::size_t dim, std::vector<double> entries);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  std::span<const double> entries() const { return a_; }

  // In-place m += x x^T.
  void add_outer(std::span<const double> x);

  Vector multiply(std::span<const double> x) const;

  friend bool operator==(const SpdMatrix&, const SpdMatrix&) = default;

 private:
  SpdMatrix(std::size_t dim, std::vector<double> a) : dim_(dim), a_(std::move(a)) {}

  std::size_t dim_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor m = L L^T. Construction throws
// NotPositiveDefinite when a pivot is not strictly positive.
class Cholesky {
 public:
  explicit Cholesky(const SpdMatrix& m);

  std::size_t dim() const { return dim_; }
  Vector solve(std::span<const double> b) const;
  double log_det() const;
  // x^T m^{-1} x, computed as |L^{-1} x|^2.
  double inverse_quadratic(std::span<const double> x) const;

 private:
  void forward(std::span<double> y) const;
  void backward(std::span<double> y) const;

  std::size_t dim_;
  std::vector<double> l_;
};

Vector solve(const SpdMatrix& m, std::span<const double> b);
SpdMatrix rank_one_update(const SpdMatrix& m, std::span<const double> x);
double log_det(const SpdMatrix& m);

// All eigenvalues in ascending order (cyclic Jacobi).
Vector symmetric_eigenvalues(const SpdMatrix& m);
double min_eigenvalue(const SpdMatrix& m);
double max_eigenvalue(const SpdMatrix& m);

}  // namespace hetbandits
