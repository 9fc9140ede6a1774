#include "popsize/linalg.hpp"

#include <cmath>
#include <numeric>

#include "popsize/errors.hpp"

namespace popsize {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

std::vector<double> mat_vec(const Matrix &a, const std::vector<double> &x) {
  if (x.size() != a.cols())
    throw UsageError("mat_vec: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
      s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double quad_form(const std::vector<double> &x, const Matrix &a,
                 const std::vector<double> &y) {
  if (x.size() != a.rows() || y.size() != a.cols())
    throw UsageError("quad_form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
      r += a(i, j) * y[j];
    s += x[i] * r;
  }
  return s;
}

namespace {

// Lower Cholesky factor, in place. Returns false when a pivot is not
// strictly positive.
bool cholesky_in_place(Matrix &a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k)
      d -= a(j, k) * a(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k)
        s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  return true;
}

void solve_cholesky(const Matrix &l, std::vector<double> &x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k)
      s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k)
      s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
}

} // namespace

std::vector<double> solve_spd(const Matrix &a, const std::vector<double> &b) {
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw UsageError("solve_spd: dimension mismatch");
  Matrix l = a;
  if (!cholesky_in_place(l))
    throw SingularityError("matrix is not positive definite");
  std::vector<double> x = b;
  solve_cholesky(l, x);
  return x;
}

Matrix invert_spd(const Matrix &a) {
  if (a.rows() != a.cols())
    throw UsageError("invert_spd: matrix must be square");
  const std::size_t n = a.rows();
  Matrix l = a;
  if (!cholesky_in_place(l))
    throw SingularityError("matrix is not positive definite");
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    solve_cholesky(l, e);
    for (std::size_t i = 0; i < n; ++i)
      inv(i, j) = e[i];
  }
  // symmetrise away roundoff
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

std::size_t rank_spd(Matrix a, double rel_tol, std::size_t *dependent_col) {
  if (a.rows() != a.cols())
    throw UsageError("rank_spd: matrix must be square");
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_diag = std::max(max_diag, a(i, i));
  const double tol = rel_tol * std::max(max_diag, 1e-300);

  for (std::size_t k = 0; k < n; ++k) {
    // pick the largest remaining diagonal entry
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (a(i, i) > a(p, p))
        p = i;
    if (p != k) {
      std::swap(perm[p], perm[k]);
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a(p, j), a(k, j));
      for (std::size_t i = 0; i < n; ++i)
        std::swap(a(i, p), a(i, k));
    }
    if (!(a(k, k) > tol)) {
      if (dependent_col)
        *dependent_col = perm[k];
      return k;
    }
    const double l = std::sqrt(a(k, k));
    a(k, k) = l;
    for (std::size_t i = k + 1; i < n; ++i)
      a(i, k) /= l;
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j <= i; ++j) {
        a(i, j) -= a(i, k) * a(j, k);
        a(j, i) = a(i, j);
      }
  }
  return n;
}

} // namespace popsize
