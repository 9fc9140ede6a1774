#ifndef POPSIZE_LINALG_HPP
#define POPSIZE_LINALG_HPP

#include <cstddef>
#include <vector>

namespace popsize {

/// Dense row-major matrix. Small: regression designs here have a handful
/// of columns, so no effort is spent on blocking or views.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const double *row(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double> &data() const { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = A x
std::vector<double> mat_vec(const Matrix &a, const std::vector<double> &x);

// x^T A y
double quad_form(const std::vector<double> &x, const Matrix &a,
                 const std::vector<double> &y);

// Solve A x = b for symmetric positive definite A (unpivoted Cholesky).
// Throws SingularityError when A is not numerically positive definite.
std::vector<double> solve_spd(const Matrix &a, const std::vector<double> &b);

// Inverse of a symmetric positive definite matrix via Cholesky.
Matrix invert_spd(const Matrix &a);

// Numerical rank of a symmetric positive semi-definite matrix by
// diagonally pivoted Cholesky: pivots below rel_tol times the largest
// initial diagonal entry end the factorization. When dependent_col is
// given it receives the original index of the first rejected pivot.
std::size_t rank_spd(Matrix a, double rel_tol,
                     std::size_t *dependent_col = nullptr);

} // namespace popsize

#endif
