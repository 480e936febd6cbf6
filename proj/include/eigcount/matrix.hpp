#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eigcount/error.hpp"

namespace eigcount {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. General purpose: rectangular blocks,
/// LU factors and eigenvector bases live here; Hermitian operands use
/// `HermitianMatrix`.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    detail::require(data_.size() == rows_ * cols_, Errc::DimensionMismatch,
                    "CMatrix data size does not match shape");
  }
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      detail::require(r.size() == cols_, Errc::DimensionMismatch, "ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<cplx>& data() const noexcept { return data_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  /// Adds `s` to every diagonal entry.
  CMatrix& shift(cplx s) {
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) (*this)(i, i) += s;
    return *this;
  }

  double frobenius_norm() const {
    double acc = 0.0;
    for (const auto& x : data_) acc += std::norm(x);
    return std::sqrt(acc);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    detail::require(a.cols_ == b.rows_, Errc::DimensionMismatch, "matrix product shape mismatch");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        const cplx* brow = b.data_.data() + k * b.cols_;
        cplx* orow = out.data_.data() + i * out.cols_;
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

 private:
  void check_same_shape(const CMatrix& o) const {
    detail::require(rows_ == o.rows_ && cols_ == o.cols_, Errc::DimensionMismatch,
                    "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Dense complex Hermitian matrix. Construction symmetrizes the input as
/// (M + M*)/2, so the stored entries satisfy a(i,j) == conj(a(j,i)) exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& m) : m_(m.rows(), m.cols()) {
    detail::require(m.square(), Errc::DimensionMismatch, "Hermitian matrix must be square");
    detail::require(m.rows() >= 1, Errc::InvalidArgument, "Hermitian matrix must have dim >= 1");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
      m_(i, i) = cplx(m(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < n; ++j) {
        const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
        m_(i, j) = v;
        m_(j, i) = std::conj(v);
      }
    }
  }

  static HermitianMatrix identity(std::size_t n) { return HermitianMatrix(CMatrix::identity(n)); }

  static HermitianMatrix zero(std::size_t n) { return HermitianMatrix(CMatrix(n, n)); }

  static HermitianMatrix diagonal(std::span<const double> diag) {
    CMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return HermitianMatrix(m);
  }
  static HermitianMatrix diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const CMatrix& matrix() const noexcept { return m_; }

  double frobenius_norm() const { return m_.frobenius_norm(); }
  double max_abs() const { return m_.max_abs(); }

  /// A + s*I for real s.
  HermitianMatrix shifted(double s) const {
    CMatrix c = m_;
    c.shift(s);
    return HermitianMatrix(c);
  }

  HermitianMatrix scaled(double s) const { return HermitianMatrix(s * m_); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ + b.m_);
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ - b.m_);
  }

 private:
  CMatrix m_;
};

/// Strictly increasing subset of {0, ..., universe-1}. Indices are 0-based
/// throughout the library and in every serialized format.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::size_t universe, std::vector<std::size_t> members)
      : universe_(universe), members_(std::move(members)) {
    detail::require(universe_ >= 1, Errc::InvalidArgument, "IndexSet universe must be >= 1");
    for (std::size_t k = 0; k < members_.size(); ++k) {
      detail::require(members_[k] < universe_, Errc::InvalidArgument,
                      "IndexSet member " + std::to_string(members_[k]) + " out of range");
      detail::require(k == 0 || members_[k - 1] < members_[k], Errc::InvalidArgument,
                      "IndexSet members must be strictly increasing");
    }
  }

  /// Builds a set from unsorted, possibly repeated indices.
  static IndexSet from_unsorted(std::size_t universe, std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return IndexSet(universe, std::move(idx));
  }

  static IndexSet full(std::size_t universe) {
    std::vector<std::size_t> all(universe);
    for (std::size_t i = 0; i < universe; ++i) all[i] = i;
    return IndexSet(universe, std::move(all));
  }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  std::size_t operator[](std::size_t k) const { return members_[k]; }

  bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

  IndexSet complement() const {
    std::vector<std::size_t> out;
    out.reserve(universe_ - members_.size());
    for (std::size_t i = 0; i < universe_; ++i)
      if (!contains(i)) out.push_back(i);
    return IndexSet(universe_, std::move(out));
  }

  IndexSet unite(const IndexSet& o) const {
    detail::require(universe_ == o.universe_, Errc::DimensionMismatch, "IndexSet universes differ");
    std::vector<std::size_t> out;
    std::set_union(members_.begin(), members_.end(), o.members_.begin(), o.members_.end(),
                   std::back_inserter(out));
    return IndexSet(universe_, std::move(out));
  }

  bool disjoint(const IndexSet& o) const {
    std::vector<std::size_t> out;
    std::set_intersection(members_.begin(), members_.end(), o.members_.begin(), o.members_.end(),
                          std::back_inserter(out));
    return out.empty();
  }

  bool subset_of(const IndexSet& o) const {
    return std::includes(o.members_.begin(), o.members_.end(), members_.begin(), members_.end());
  }

  /// Expands vertex indices into matrix indices for `block`-sized sites:
  /// vertex v covers {v*block, ..., v*block + block - 1}.
  IndexSet expand_blocks(std::size_t block) const {
    std::vector<std::size_t> out;
    out.reserve(members_.size() * block);
    for (auto v : members_)
      for (std::size_t b = 0; b < block; ++b) out.push_back(v * block + b);
    return IndexSet(universe_ * block, std::move(out));
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::size_t universe_ = 1;
  std::vector<std::size_t> members_;
};

/// A[rows, cols] with entries in increasing-index order.
inline CMatrix submatrix(const CMatrix& a, const IndexSet& rows, const IndexSet& cols) {
  detail::require(!rows.empty() && !cols.empty(), Errc::InvalidArgument,
                  "submatrix index sets must be nonempty");
  detail::require(rows.universe() == a.rows() && cols.universe() == a.cols(),
                  Errc::DimensionMismatch, "index set universe does not match matrix dimension");
  CMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

inline CMatrix submatrix(const HermitianMatrix& a, const IndexSet& rows, const IndexSet& cols) {
  return submatrix(a.matrix(), rows, cols);
}

/// Principal submatrix A[alpha].
inline HermitianMatrix principal(const HermitianMatrix& a, const IndexSet& alpha) {
  return HermitianMatrix(submatrix(a.matrix(), alpha, alpha));
}

/// Block-diagonal assembly of square blocks.
inline CMatrix block_diagonal(std::span<const CMatrix> blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMatrix out(n, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return out;
}

}  // namespace eigcount
