#include "hetbandits/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hetbandits/errors.hpp"

namespace hetbandits {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector scale(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

// -- SpdMatrix ----------------------------------------------------------------

SpdMatrix SpdMatrix::identity(std::size_t dim, double scale) {
  std::vector<double> a(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] = scale;
  return SpdMatrix(dim, std::move(a));
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = values[i];
  return SpdMatrix(n, std::move(a));
}

SpdMatrix SpdMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<double> a;
  a.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("matrix rows must be square");
    a.insert(a.end(), row.begin(), row.end());
  }
  return from_dense(n, std::move(a));
}

SpdMatrix SpdMatrix::from_dense(std::size_t dim, std::vector<double> entries) {
  if (entries.size() != dim * dim) {
    throw std::invalid_argument("entry count does not match dim*dim");
  }
  double scale = 0.0;
  for (double v : entries) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (std::abs(entries[i * dim + j] - entries[j * dim + i]) > 1e-9 * scale) {
        throw std::invalid_argument("matrix is not symmetric");
      }
    }
  }
  return SpdMatrix(dim, std::move(entries));
}

void SpdMatrix::add_outer(std::span<const double> x) {
  if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
  for (std::size_t i = 0; i < dim_; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* row = &a_[i * dim_];
    for (std::size_t j = 0; j < dim_; ++j) row[j] += xi * x[j];
  }
}

Vector SpdMatrix::multiply(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
  Vector y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += a_[i * dim_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

// -- Cholesky -----------------------------------------------------------------

Cholesky::Cholesky(const SpdMatrix& m) : dim_(m.dim()), l_(m.dim() * m.dim(), 0.0) {
  const std::size_t n = dim_;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l_[j * n + k] * l_[j * n + k];
    if (!(diag > 0.0)) {
      throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) +
                                " is not positive");
    }
    const double ljj = std::sqrt(diag);
    l_[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_[i * n + k] * l_[j * n + k];
      l_[i * n + j] = s / ljj;
    }
  }
}

void Cholesky::forward(std::span<double> y) const {
  const std::size_t n = dim_;
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_[i * n + k] * y[k];
    y[i] = s / l_[i * n + i];
  }
}

void Cholesky::backward(std::span<double> y) const {
  const std::size_t n = dim_;
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_[k * n + ii] * y[k];
    y[ii] = s / l_[ii * n + ii];
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  if (b.size() != dim_) throw DimensionMismatch(dim_, b.size());
  Vector y(b.begin(), b.end());
  forward(y);
  backward(y);
  return y;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += std::log(l_[i * dim_ + i]);
  return 2.0 * s;
}

double Cholesky::inverse_quadratic(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
  Vector y(x.begin(), x.end());
  forward(y);
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

// -- free functions -----------------------------------------------------------

Vector solve(const SpdMatrix& m, std::span<const double> b) {
  return Cholesky(m).solve(b);
}

SpdMatrix rank_one_update(const SpdMatrix& m, std::span<const double> x) {
  SpdMatrix out = m;
  out.add_outer(x);
  return out;
}

double log_det(const SpdMatrix& m) { return Cholesky(m).log_det(); }

Vector symmetric_eigenvalues(const SpdMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> a(m.entries().begin(), m.entries().end());
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  double total = 0.0;
  for (double v : a) total += v * v;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off <= 1e-30 * total || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eigenvalue(const SpdMatrix& m) { return symmetric_eigenvalues(m).front(); }

double max_eigenvalue(const SpdMatrix& m) { return symmetric_eigenvalues(m).back(); }

}  // namespace hetbandits
