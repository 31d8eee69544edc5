#pragma once

#include <cmath>
#include <vector>

#include "propagate/errors.hpp"

namespace propagate {

// Small dense matrix, row-major. The cooperative systems here have a handful
// of components, so no sparse or blocked machinery.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Matrix operator+(const Matrix& o) const {
    Matrix r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }

  Matrix operator*(double s) const {
    Matrix r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
    return r;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
      }
    return r;
  }

  std::vector<double> operator*(const std::vector<double>& v) const {
    std::vector<double> r(rows_, 0.0);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  // max absolute row sum
  double norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
      m = std::max(m, s);
    }
    return m;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

}  // namespace propagate
