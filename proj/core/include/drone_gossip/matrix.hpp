#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace drone_gossip {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Matrix transposed() const;
  double max_abs() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// LU factorization with partial (row) pivoting, PA = LU.
///
/// Factor once, then solve any number of right-hand sides. Throws
/// SingularMatrixError when a pivot falls below dim * eps * max|A|.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  std::size_t dim() const { return lu_.rows(); }
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

inline std::vector<double> solve(const Matrix& a, std::span<const double> rhs) {
  return LuDecomposition(a).solve(rhs);
}

}  // namespace drone_gossip
