#pragma once

// Dense exact linear algebra over the rings in ring.hpp: determinants,
// adjugates and kernels. Determinants over Z/m with composite m use
// unimodular (Euclidean) row reduction, so no division by zerodivisors ever
// happens; over fields plain Gaussian elimination is used.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affine/errors.hpp"
#include "affine/ring.hpp"

namespace affine {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

  Matrix submatrix(const std::vector<std::size_t>& row_ids) const {
    Matrix out(row_ids.size(), cols_, T{});
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
      for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(row_ids[i], c);
    }
    return out;
  }

  Matrix minor(std::size_t skip_row, std::size_t skip_col) const {
    Matrix out(rows_ - 1, cols_ - 1, T{});
    for (std::size_t r = 0, rr = 0; r < rows_; ++r) {
      if (r == skip_row) continue;
      for (std::size_t c = 0, cc = 0; c < cols_; ++c) {
        if (c == skip_col) continue;
        out(rr, cc++) = (*this)(r, c);
      }
      ++rr;
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Ring R>
Matrix<Elem<R>> identity_matrix(const R& ring, std::size_t n) {
  Matrix<Elem<R>> m(n, n, ring.zero());
  for (std::size_t i = 0; i < n; ++i) m(i, i) = ring.one();
  return m;
}

template <Ring R>
Matrix<Elem<R>> multiply(const R& ring, const Matrix<Elem<R>>& a, const Matrix<Elem<R>>& b) {
  if (a.cols() != b.rows()) throw PreconditionError("matrix dimension mismatch in multiply");
  Matrix<Elem<R>> out(a.rows(), b.cols(), ring.zero());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (ring.is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) = ring.add(out(i, j), ring.mul(a(i, k), b(k, j)));
      }
    }
  }
  return out;
}

template <Ring R>
std::vector<Elem<R>> multiply(const R& ring, const Matrix<Elem<R>>& a, std::span<const Elem<R>> x) {
  if (a.cols() != x.size()) throw PreconditionError("matrix/vector dimension mismatch");
  std::vector<Elem<R>> out(a.rows(), ring.zero());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] = ring.add(out[i], ring.mul(a(i, k), x[k]));
  }
  return out;
}

namespace detail {

template <Ring R>
Elem<R> field_determinant(const R& ring, Matrix<Elem<R>> m) {
  const std::size_t n = m.rows();
  Elem<R> det = ring.one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && ring.is_zero(m(pivot, c))) ++pivot;
    if (pivot == n) return ring.zero();
    if (pivot != c) {
      m.swap_rows(pivot, c);
      det = ring.neg(det);
    }
    det = ring.mul(det, m(c, c));
    const Elem<R> inv = ring_inverse(ring, m(c, c));
    for (std::size_t r = c + 1; r < n; ++r) {
      if (ring.is_zero(m(r, c))) continue;
      const Elem<R> factor = ring.mul(m(r, c), inv);
      for (std::size_t k = c; k < n; ++k) m(r, k) = ring.sub(m(r, k), ring.mul(factor, m(c, k)));
    }
  }
  return det;
}

// Z/m, m composite: residues are treated as integers in [0, m) and columns are
// cleared by repeated division with remainder (row ops of determinant +-1).
inline std::uint64_t euclid_determinant(const ZMod& ring, Matrix<std::uint64_t> m) {
  const std::size_t n = m.rows();
  std::uint64_t det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    while (true) {
      std::size_t pivot = n;
      for (std::size_t r = c; r < n; ++r) {
        if (m(r, c) != 0 && (pivot == n || m(r, c) < m(pivot, c))) pivot = r;
      }
      if (pivot == n) return 0;
      if (pivot != c) {
        m.swap_rows(pivot, c);
        det = ring.neg(det);
      }
      bool cleared = true;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (m(r, c) == 0) continue;
        const std::uint64_t q = m(r, c) / m(c, c);
        for (std::size_t k = c; k < n; ++k) m(r, k) = ring.sub(m(r, k), ring.mul(q % ring.modulus(), m(c, k)));
        if (m(r, c) != 0) cleared = false;
      }
      if (cleared) break;
    }
    det = ring.mul(det, m(c, c));
  }
  return det;
}

}  // namespace detail

template <Ring R>
Elem<R> determinant(const R& ring, const Matrix<Elem<R>>& m) {
  if (!m.square()) throw PreconditionError("determinant of a non-square matrix");
  if (m.rows() == 0) return ring.one();
  if constexpr (std::is_same_v<R, ZMod>) {
    if (!ring.is_field()) return detail::euclid_determinant(ring, m);
  }
  return detail::field_determinant(ring, m);
}

/// adj(A) with adj(A) * A = A * adj(A) = det(A) * I, via cofactors.
template <Ring R>
Matrix<Elem<R>> adjugate(const R& ring, const Matrix<Elem<R>>& m) {
  if (!m.square()) throw PreconditionError("adjugate of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix<Elem<R>> adj(n, n, ring.zero());
  if (n == 0) return adj;
  if (n == 1) {
    adj(0, 0) = ring.one();
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Elem<R> cof = determinant(ring, m.minor(i, j));
      if ((i + j) % 2 == 1) cof = ring.neg(cof);
      adj(j, i) = cof;
    }
  }
  return adj;
}

/// Reduced row echelon form over a field; returns pivot columns.
template <Ring R>
std::vector<std::size_t> rref_in_place(const R& ring, Matrix<Elem<R>>& m) {
  if (!ring.is_field()) throw Unsupported("row reduction requires a field, got " + ring.describe());
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    std::size_t p = row;
    while (p < m.rows() && ring.is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, row);
    const Elem<R> inv = ring_inverse(ring, m(row, c));
    for (std::size_t k = 0; k < m.cols(); ++k) m(row, k) = ring.mul(m(row, k), inv);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || ring.is_zero(m(r, c))) continue;
      const Elem<R> factor = m(r, c);
      for (std::size_t k = 0; k < m.cols(); ++k) m(r, k) = ring.sub(m(r, k), ring.mul(factor, m(row, k)));
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

template <Ring R>
std::size_t rank(const R& ring, Matrix<Elem<R>> m) {
  return rref_in_place(ring, m).size();
}

/// Kernel basis over a field. One vector per free column (ascending), with
/// that free coordinate set to 1 and the other free coordinates 0.
template <Ring R>
std::vector<std::vector<Elem<R>>> kernel_basis(const R& ring, Matrix<Elem<R>> m) {
  const auto pivots = rref_in_place(ring, m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Elem<R>>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Elem<R>> v(m.cols(), ring.zero());
    v[free] = ring.one();
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = ring.neg(m(i, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace affine
