#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchorlab {

/// Dense row-major matrix of doubles. All numeric state in the library
/// (embeddings, parameters, gradients) lives in this type; shapes are checked
/// eagerly and mismatches throw with both shapes spelled out in the message.
class Matrix {
public:
  Matrix() = default;

  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
      throw std::invalid_argument("Matrix: negative shape " + shape_string(rows, cols));
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  }

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }

  static Matrix filled(int rows, int cols, double value) {
    Matrix m(rows, cols);
    for (double& x : m.data_) x = value;
    return m;
  }

  /// Independent N(0, stddev^2) entries drawn from the supplied generator.
  static Matrix gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
    Matrix m(rows, cols);
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& x : m.data_) x = dist(rng);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows_; ++i) {
      if (static_cast<int>(rows[i].size()) != m.cols_) {
        throw std::invalid_argument("Matrix::from_rows: ragged input at row " + std::to_string(i));
      }
      for (int j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  /// Bounds-checked access, used at API boundaries.
  double& at(int r, int c) {
    check_index(r, c);
    return (*this)(r, c);
  }
  double at(int r, int c) const {
    check_index(r, c);
    return (*this)(r, c);
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double value) {
    for (double& x : data_) x = value;
  }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::string shape() const { return shape_string(rows_, cols_); }

  static std::string shape_string(int rows, int cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

private:
  void check_index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
      throw std::out_of_range("Matrix::at: index (" + std::to_string(r) + "," +
                              std::to_string(c) + ") outside " + shape());
    }
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape() +
                                " vs " + b.shape());
  }
}

/// splitmix64 finalizer; used to derive decorrelated per-purpose seeds from a
/// single master seed so adding a new consumer never shifts existing streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace anchorlab
