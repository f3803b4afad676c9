#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "sphf/scalar.hpp"

namespace sphf {

// Dense exact matrix over a field F.  Sizes here are desk scale; plain
// Gaussian elimination with exact division is all we need.
template <class F>
class Matrix {
 public:
  Matrix() : r_(0), c_(0) {}
  Matrix(int r, int c) : r_(r), c_(c), d_(size_t(r) * c, FieldOps<F>::zero()) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = FieldOps<F>::one();
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  F& operator()(int i, int j) { return d_[size_t(i) * c_ + j]; }
  const F& operator()(int i, int j) const { return d_[size_t(i) * c_ + j]; }

  bool is_zero() const { return zero(); }
  bool zero() const {
    for (const F& x : d_)
      if (!sphf::is_zero(x)) return false;
    return true;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  Matrix& operator+=(const Matrix& o) {
    assert(r_ == o.r_ && c_ == o.c_);
    for (size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    assert(r_ == o.r_ && c_ == o.c_);
    for (size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  Matrix operator-() const {
    Matrix m = *this;
    for (F& x : m.d_) x = -x;
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.c_ == b.r_);
    Matrix m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const F& aik = a(i, k);
        if (sphf::is_zero(aik)) continue;
        for (int j = 0; j < b.c_; ++j) {
          if (sphf::is_zero(b(k, j))) continue;
          m(i, j) += aik * b(k, j);
        }
      }
    return m;
  }

  Matrix& operator*=(const F& s) {
    for (F& x : d_) x = x * s;
    return *this;
  }
  friend Matrix operator*(const F& s, Matrix a) { return a *= s; }

  Matrix transpose() const {
    Matrix m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  friend Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix m(a.r_ * b.r_, a.c_ * b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int j = 0; j < a.c_; ++j) {
        if (sphf::is_zero(a(i, j))) continue;
        for (int k = 0; k < b.r_; ++k)
          for (int l = 0; l < b.c_; ++l)
            m(i * b.r_ + k, j * b.c_ + l) = a(i, j) * b(k, l);
      }
    return m;
  }

  // Row-reduce [this | rhs] in place; returns pivot columns.
  std::vector<int> rref(Matrix* rhs = nullptr) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < c_ && row < r_; ++col) {
      int p = -1;
      for (int i = row; i < r_; ++i)
        if (!sphf::is_zero((*this)(i, col))) {
          p = i;
          break;
        }
      if (p < 0) continue;
      swap_rows(row, p);
      if (rhs) rhs->swap_rows(row, p);
      F inv = FieldOps<F>::one() / (*this)(row, col);
      scale_row(row, inv);
      if (rhs) rhs->scale_row(row, inv);
      for (int i = 0; i < r_; ++i) {
        if (i == row || sphf::is_zero((*this)(i, col))) continue;
        F f = (*this)(i, col);
        axpy_row(i, row, f);
        if (rhs) rhs->axpy_row(i, row, f);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  int rank() const {
    Matrix m = *this;
    return int(m.rref().size());
  }

  std::optional<Matrix> inverse() const {
    assert(r_ == c_);
    Matrix m = *this, inv = identity(r_);
    auto piv = m.rref(&inv);
    if (int(piv.size()) != r_) return std::nullopt;
    return inv;
  }

  // Solve A X = B exactly.  Returns nullopt when inconsistent or when the
  // solution is not unique (underdetermined systems are errors here).
  static std::optional<Matrix> solve(const Matrix& a, const Matrix& b) {
    assert(a.r_ == b.r_);
    Matrix m = a, rhs = b;
    auto piv = m.rref(&rhs);
    // consistency: zero rows of m must have zero rhs
    for (int i = int(piv.size()); i < m.r_; ++i)
      for (int j = 0; j < rhs.c_; ++j)
        if (!sphf::is_zero(rhs(i, j))) return std::nullopt;
    if (int(piv.size()) != a.c_) return std::nullopt;  // not unique
    Matrix x(a.c_, b.c_);
    for (int i = 0; i < int(piv.size()); ++i)
      for (int j = 0; j < rhs.c_; ++j) x(piv[i], j) = rhs(i, j);
    return x;
  }

  void swap_rows(int i, int j) {
    if (i == j) return;
    for (int k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void scale_row(int i, const F& s) {
    for (int k = 0; k < c_; ++k) (*this)(i, k) = (*this)(i, k) * s;
  }
  // row_i -= f * row_j
  void axpy_row(int i, int j, const F& f) {
    for (int k = 0; k < c_; ++k) (*this)(i, k) -= f * (*this)(j, k);
  }

 private:
  int r_, c_;
  std::vector<F> d_;
};

template <class F>
struct CoeffField<Matrix<F>> {
  using type = F;
};

}  // namespace sphf
