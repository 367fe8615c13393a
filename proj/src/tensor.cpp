#include "tdrc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdrc/errors.hpp"
#include "tdrc/kernels.hpp"

namespace tdrc {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw DomainError("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
}

std::string shape(const std::array<Index, 3>& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

}  // namespace

Tensor3::Tensor3(Index m, Index n, Index t) : Tensor3(m, n, t, std::vector<double>()) {}

Tensor3::Tensor3(Index m, Index n, Index t, std::vector<double> values)
    : dims_{m, n, t}, values_(std::move(values)) {
  if (m < 0 || n < 0 || t < 0) throw DimensionError("negative tensor extent " + shape(dims_));
  const auto expected = static_cast<std::size_t>(m * n * t);
  if (values_.empty()) {
    values_.assign(expected, 0.0);
  } else if (values_.size() != expected) {
    throw DimensionError("tensor " + shape(dims_) + " needs " + std::to_string(expected) + " values, got " +
                         std::to_string(values_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
    throw DomainError("tensor values must be finite");
}

Index Tensor3::dim(int mode) const {
  check_mode(mode);
  return dims_[mode - 1];
}

double Tensor3::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double Tensor3::norm() const noexcept { return std::sqrt(squared_norm()); }

void FactorSet::validate(bool allow_high_rank) const {
  const Index r = C.cols();
  if (r < 1) throw DimensionError("factor rank must be positive");
  if (P.cols() != r || F.cols() != r)
    throw DimensionError("factor matrices disagree on rank: C has " + std::to_string(r) + ", P has " +
                         std::to_string(P.cols()) + ", F has " + std::to_string(F.cols()));
  if (!allow_high_rank && r > std::min(C.rows(), P.rows()))
    throw DimensionError("rank " + std::to_string(r) + " exceeds min(m, n) = " +
                         std::to_string(std::min(C.rows(), P.rows())));
  if (!C.allFinite() || !P.allFinite() || !F.allFinite()) throw DomainError("factor matrices must be finite");
}

Matrix matricize(const Tensor3& x, int mode) {
  check_mode(mode);
  const Index m = x.m(), n = x.n(), t = x.t();
  switch (mode) {
    case 1: {
      Matrix out(m, n * t);
      for (Index k = 0; k < t; ++k)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < m; ++i) out(i, j + n * k) = x(i, j, k);
      return out;
    }
    case 2: {
      Matrix out(n, m * t);
      for (Index k = 0; k < t; ++k)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < m; ++i) out(j, i + m * k) = x(i, j, k);
      return out;
    }
    default: {
      Matrix out(t, m * n);
      for (Index k = 0; k < t; ++k)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < m; ++i) out(k, i + m * j) = x(i, j, k);
      return out;
    }
  }
}

Tensor3 refold(const Matrix& unfolded, int mode, const std::array<Index, 3>& dims) {
  check_mode(mode);
  const Index m = dims[0], n = dims[1], t = dims[2];
  const Index rows = dims[mode - 1];
  const Index cols = (m * n * t) / std::max<Index>(rows, 1);
  if (unfolded.rows() != rows || (rows > 0 && unfolded.cols() != cols))
    throw DimensionError("cannot refold a " + std::to_string(unfolded.rows()) + "x" +
                         std::to_string(unfolded.cols()) + " matrix into " + shape(dims) + " along mode " +
                         std::to_string(mode));
  Tensor3 x(m, n, t);
  for (Index k = 0; k < t; ++k)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) {
        switch (mode) {
          case 1: x(i, j, k) = unfolded(i, j + n * k); break;
          case 2: x(i, j, k) = unfolded(j, i + m * k); break;
          default: x(i, j, k) = unfolded(k, i + m * j); break;
        }
      }
  return x;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw DimensionError("khatri_rao needs equal column counts, got " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.cols()));
  const Index p = a.rows(), q = b.rows();
  Matrix out(p * q, a.cols());
  for (Index l = 0; l < a.cols(); ++l)
    for (Index ia = 0; ia < p; ++ia) out.col(l).segment(ia * q, q) = a(ia, l) * b.col(l);
  return out;
}

Tensor3 reconstruct(const FactorSet& fs) {
  fs.validate(true);
  return kernels::omp::reconstruct(fs);
}

double residual_norm(const Tensor3& x, const FactorSet& fs) {
  fs.validate(true);
  if (x.dims() != fs.dims()) throw DimensionError("tensor " + shape(x.dims()) + " vs factors " + shape(fs.dims()));
  return std::sqrt(kernels::omp::squared_residual(x, fs));
}

double inner(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw DimensionError("inner product of " + shape(a.dims()) + " and " + shape(b.dims()));
  double s = 0.0;
  for (Index p = 0; p < a.size(); ++p) s += a.values()[p] * b.values()[p];
  return s;
}

Matrix paired_khatri_rao(const FactorSet& fs, int mode) {
  check_mode(mode);
  switch (mode) {
    case 1: return khatri_rao(fs.F, fs.P);
    case 2: return khatri_rao(fs.F, fs.C);
    default: return khatri_rao(fs.P, fs.C);
  }
}

Matrix paired_gram(const FactorSet& fs, int mode) {
  check_mode(mode);
  const Matrix cc = fs.C.transpose() * fs.C;
  const Matrix pp = fs.P.transpose() * fs.P;
  const Matrix ff = fs.F.transpose() * fs.F;
  switch (mode) {
    case 1: return ff.cwiseProduct(pp);
    case 2: return ff.cwiseProduct(cc);
    default: return pp.cwiseProduct(cc);
  }
}

}  // namespace tdrc
