#include <algorithm>
#include <string>
#include <vector>

#include "tdrc/errors.hpp"
#include "tdrc/kernels.hpp"

namespace tdrc::kernels::omp {

namespace {

void check(const Tensor3& x, const FactorSet& fs, int mode) {
  if (x.dims() != fs.dims()) throw DimensionError("mttkrp: tensor and factor shapes differ");
  if (mode < 1 || mode > 3) throw DomainError("mttkrp: bad mode " + std::to_string(mode));
}

}  // namespace

Matrix mttkrp(const Tensor3& x, const FactorSet& fs, int mode) {
  check(x, fs, mode);
  const Index m = x.m(), n = x.n(), t = x.t(), r = fs.rank();
  const double* data = x.values().data();
  // Row-major r-wide scratch keeps the inner loop contiguous.
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  if (mode == 1) {
    // Each thread owns blocks of rows i; per row the (k, j) order is fixed.
    RowMat out = RowMat::Zero(m, r);
    const RowMat P = fs.P, F = fs.F;
    constexpr Index kBlock = 64;
    const Index blocks = (m + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks; ++b) {
      const Index i0 = b * kBlock, i1 = std::min(m, i0 + kBlock);
      for (Index k = 0; k < t; ++k)
        for (Index j = 0; j < n; ++j) {
          const double* fiber = data + m * (j + n * k);
          for (Index i = i0; i < i1; ++i) {
            const double v = fiber[i];
            if (v == 0.0) continue;
            for (Index l = 0; l < r; ++l) out(i, l) += v * P(j, l) * F(k, l);
          }
        }
    }
    return out;
  }

  if (mode == 2) {
    RowMat out = RowMat::Zero(n, r);
    const RowMat C = fs.C, F = fs.F;
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < t; ++k) {
        const double* fiber = data + m * (j + n * k);
        for (Index i = 0; i < m; ++i) {
          const double v = fiber[i];
          if (v == 0.0) continue;
          for (Index l = 0; l < r; ++l) out(j, l) += v * C(i, l) * F(k, l);
        }
      }
    }
    return out;
  }

  // Mode 3 has only t rows, so parallelise over j into per-j partials and sum
  // them serially afterwards.
  const RowMat C = fs.C, P = fs.P;
  std::vector<double> partial(static_cast<std::size_t>(n * t * r), 0.0);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    double* acc = partial.data() + j * t * r;
    for (Index k = 0; k < t; ++k) {
      const double* fiber = data + m * (j + n * k);
      for (Index i = 0; i < m; ++i) {
        const double v = fiber[i];
        if (v == 0.0) continue;
        for (Index l = 0; l < r; ++l) acc[k * r + l] += v * C(i, l) * P(j, l);
      }
    }
  }
  Matrix out = Matrix::Zero(t, r);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < t; ++k)
      for (Index l = 0; l < r; ++l) out(k, l) += partial[static_cast<std::size_t>((j * t + k) * r + l)];
  return out;
}

Tensor3 reconstruct(const FactorSet& fs) {
  const Index m = fs.C.rows(), n = fs.P.rows(), t = fs.F.rows(), r = fs.rank();
  Tensor3 x(m, n, t);
  double* data = x.values().data();
  const Matrix& C = fs.C;
  const Matrix& P = fs.P;
  const Matrix& F = fs.F;
#pragma omp parallel
  {
    Vector w(r);
#pragma omp for schedule(static)
    for (Index jk = 0; jk < n * t; ++jk) {
      const Index j = jk % n, k = jk / n;
      for (Index l = 0; l < r; ++l) w(l) = P(j, l) * F(k, l);
      double* fiber = data + m * jk;
      for (Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (Index l = 0; l < r; ++l) s += C(i, l) * w(l);
        fiber[i] = s;
      }
    }
  }
  return x;
}

double squared_residual(const Tensor3& x, const FactorSet& fs) {
  if (x.dims() != fs.dims()) throw DimensionError("squared_residual: tensor and factor shapes differ");
  const Index m = x.m(), n = x.n(), t = x.t(), r = fs.rank();
  const double* data = x.values().data();
  const Matrix& C = fs.C;
  const Matrix& P = fs.P;
  const Matrix& F = fs.F;
  std::vector<double> partial(static_cast<std::size_t>(n * t), 0.0);
#pragma omp parallel
  {
    Vector w(r);
#pragma omp for schedule(static)
    for (Index jk = 0; jk < n * t; ++jk) {
      const Index j = jk % n, k = jk / n;
      for (Index l = 0; l < r; ++l) w(l) = P(j, l) * F(k, l);
      const double* fiber = data + m * jk;
      double acc = 0.0;
      for (Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (Index l = 0; l < r; ++l) s += C(i, l) * w(l);
        const double d = fiber[i] - s;
        acc += d * d;
      }
      partial[static_cast<std::size_t>(jk)] = acc;
    }
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace tdrc::kernels::omp
