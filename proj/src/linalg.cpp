#include "neurogame/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neurogame/errors.hpp"

namespace neurogame {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InputError("matrix data has " + std::to_string(data_.size()) +
                     " entries, expected " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw InputError("ragged matrix: row " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " entries, expected " +
                       std::to_string(cols));
    }
    data.insert(data.end(), rows[r].begin(), rows[r].end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

std::vector<Vector> Matrix::to_rows() const {
  std::vector<Vector> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto span = row(r);
    out.emplace_back(span.begin(), span.end());
  }
  return out;
}

bool Matrix::all_finite() const { return neurogame::all_finite(data_); }

Vector dense_matvec(const Matrix& m, std::span<const double> v) {
  if (m.cols() != v.size()) {
    throw InputError("matvec dimension mismatch: matrix has " +
                     std::to_string(m.cols()) + " columns, vector has " +
                     std::to_string(v.size()) + " entries");
  }
  Vector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), v);
  return out;
}

Vector dense_vecmat(std::span<const double> v, const Matrix& m) {
  if (m.rows() != v.size()) {
    throw InputError("vecmat dimension mismatch: matrix has " +
                     std::to_string(m.rows()) + " rows, vector has " +
                     std::to_string(v.size()) + " entries");
  }
  Vector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += v[r] * row[c];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("dot product of vectors with lengths " +
                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  if (scale > 1e-150 && scale < 1e150) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
  }
  double acc = 0.0;
  for (double x : v) acc += (x / scale) * (x / scale);
  return scale * std::sqrt(acc);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("logit requires p in (0, 1)");
  return std::log(p / (1.0 - p));
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_coupling_matrix(const Matrix& couplings, std::size_t n, double tolerance) {
  if (couplings.rows() != n || couplings.cols() != n) {
    throw InputError("coupling matrix must be " + std::to_string(n) + "x" +
                     std::to_string(n) + ", got " + std::to_string(couplings.rows()) +
                     "x" + std::to_string(couplings.cols()));
  }
  if (!couplings.all_finite()) throw InputError("coupling matrix has non-finite entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (couplings(i, i) != 0.0) {
      throw InputError("coupling matrix diagonal entry " + std::to_string(i) +
                       " is nonzero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(couplings(i, j) - couplings(j, i)) > tolerance) {
        throw InputError("coupling matrix is not symmetric at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace neurogame
