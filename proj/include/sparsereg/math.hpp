#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sparsereg/errors.hpp"

namespace sparsereg {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimension_error("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_sq(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(norm2_sq(a)); }

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw dimension_error("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

// Dense row-major matrix; small sizes only, no blocking.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  std::span<const double> row(int i) const { return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)}; }
  std::span<double> row(int i) { return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)}; }

  Vec col(int j) const {
    Vec c(rows);
    for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
    return c;
  }

  double col_norm(int j) const {
    double s = 0.0;
    for (int i = 0; i < rows; ++i) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  double frobenius_sq() const { return norm2_sq(data); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline Vec matvec(const Matrix& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.cols) throw dimension_error("matvec: size mismatch");
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) y[i] = dot(m.row(i), x);
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw dimension_error("matmul: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw dimension_error("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

// Solves A x = b for symmetric positive definite A by in-place Cholesky.
// Adds a tiny diagonal jitter and retries once if the factorization stalls;
// small normal-equation systems only.
inline Vec solve_spd(Matrix a, Vec b) {
  if (a.rows != a.cols || a.rows != static_cast<int>(b.size()))
    throw dimension_error("solve_spd: shape mismatch");
  const int n = a.rows;
  auto factor = [&](Matrix& m) -> bool {
    for (int j = 0; j < n; ++j) {
      double d = m(j, j);
      for (int k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
      if (!(d > 0.0)) return false;
      m(j, j) = std::sqrt(d);
      for (int i = j + 1; i < n; ++i) {
        double s = m(i, j);
        for (int k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
        m(i, j) = s / m(j, j);
      }
    }
    return true;
  };
  Matrix l = a;
  if (!factor(l)) {
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += std::abs(a(i, i));
    const double jitter = 1e-12 * (trace + 1.0);
    l = a;
    for (int i = 0; i < n; ++i) l(i, i) += jitter;
    if (!factor(l)) throw std::runtime_error("solve_spd: matrix not positive definite");
  }
  // forward then backward substitution
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

// Least squares min ||A x - y||_2 via normal equations; fine for the small,
// well-conditioned systems used here (affine fits).
inline Vec lstsq(const Matrix& a, std::span<const double> y) {
  if (a.rows != static_cast<int>(y.size())) throw dimension_error("lstsq: shape mismatch");
  Matrix ata(a.cols, a.cols);
  Vec aty(a.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      aty[j] += a(i, j) * y[i];
      for (int k = j; k < a.cols; ++k) ata(j, k) += a(i, j) * a(i, k);
    }
  }
  for (int j = 0; j < a.cols; ++j)
    for (int k = 0; k < j; ++k) ata(j, k) = ata(k, j);
  return solve_spd(std::move(ata), std::move(aty));
}

}  // namespace sparsereg
