#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tdrc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real 3-way array of shape m x n x t.
///
/// Element (i, j, k) lives at linear offset i + m*j + m*n*k, so the first
/// index varies fastest. The mode-1 unfolding is therefore the storage viewed
/// as a column-major m x (n*t) matrix, and the mode-3 unfolding is the storage
/// viewed as a row-major t x (m*n) matrix.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(Index m, Index n, Index t);
  /// Takes ownership of `values` laid out as described above. Throws
  /// DimensionError on a size mismatch and DomainError on non-finite entries.
  Tensor3(Index m, Index n, Index t, std::vector<double> values);

  Index m() const noexcept { return dims_[0]; }
  Index n() const noexcept { return dims_[1]; }
  Index t() const noexcept { return dims_[2]; }
  /// Extent along `mode` in {1, 2, 3}.
  Index dim(int mode) const;
  std::array<Index, 3> dims() const noexcept { return dims_; }
  Index size() const noexcept { return static_cast<Index>(values_.size()); }

  Index offset(Index i, Index j, Index k) const noexcept {
    return i + dims_[0] * (j + dims_[1] * k);
  }
  double operator()(Index i, Index j, Index k) const noexcept { return values_[offset(i, j, k)]; }
  double& operator()(Index i, Index j, Index k) noexcept { return values_[offset(i, j, k)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double squared_norm() const noexcept;
  double norm() const noexcept;

  bool operator==(const Tensor3&) const = default;

 private:
  std::array<Index, 3> dims_{0, 0, 0};
  std::vector<double> values_;
};

/// The three CP factor matrices: C (m x r), P (n x r), F (t x r).
struct FactorSet {
  Matrix C;
  Matrix P;
  Matrix F;

  Index rank() const noexcept { return C.cols(); }
  std::array<Index, 3> dims() const noexcept { return {C.rows(), P.rows(), F.rows()}; }
  /// Throws DimensionError if column counts disagree or the rank is zero, and
  /// DomainError on non-finite entries. Ranks above min(m, n) are rejected
  /// unless `allow_high_rank` is set.
  void validate(bool allow_high_rank = false) const;
};

/// Mode-n unfolding. Rows index mode `mode`; columns enumerate the two
/// remaining indices with the lower-numbered mode varying fastest.
Matrix matricize(const Tensor3& x, int mode);

/// Inverse of matricize for a tensor of shape `dims`.
Tensor3 refold(const Matrix& unfolded, int mode, const std::array<Index, 3>& dims);

/// Column-wise Kronecker product. Row ia*q + ib of the result holds
/// a(ia, l) * b(ib, l) in column l.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// ⟦C, P, F⟧ with x_ijk = sum_l C(i,l) P(j,l) F(k,l).
Tensor3 reconstruct(const FactorSet& fs);

/// Frobenius norm of x - ⟦fs⟧ (not squared).
double residual_norm(const Tensor3& x, const FactorSet& fs);

/// Sum of elementwise products.
double inner(const Tensor3& a, const Tensor3& b);

/// Khatri-Rao operand pair matching matricize(x, mode):
///   mode 1 -> khatri_rao(F, P), mode 2 -> khatri_rao(F, C), mode 3 -> khatri_rao(P, C).
Matrix paired_khatri_rao(const FactorSet& fs, int mode);

/// Gram matrix of paired_khatri_rao(fs, mode), computed as a Hadamard product
/// of the r x r factor Grams.
Matrix paired_gram(const FactorSet& fs, int mode);

}  // namespace tdrc
