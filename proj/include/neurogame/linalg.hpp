#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace neurogame {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  // Throws InputError on ragged rows.
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<Vector> to_rows() const;

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// m * v. Throws InputError when m.cols() != v.size().
Vector dense_matvec(const Matrix& m, std::span<const double> v);

// Row vector times matrix: result[c] = sum_r v[r] * m(r, c).
Vector dense_vecmat(std::span<const double> v, const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

// 1 / (1 + exp(-x)), evaluated without overflow for large |x|.
double logistic(double x);
double logit(double p);

bool all_finite(std::span<const double> v);

// Validates an Ising coupling matrix against n spins: square, finite,
// symmetric to `tolerance`, zero diagonal.
void require_coupling_matrix(const Matrix& couplings, std::size_t n,
                             double tolerance = 1e-12);

}  // namespace neurogame
