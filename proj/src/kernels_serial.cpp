#include <string>

#include "tdrc/errors.hpp"
#include "tdrc/kernels.hpp"

namespace tdrc::kernels::serial {

Matrix mttkrp(const Tensor3& x, const FactorSet& fs, int mode) {
  const Index m = x.m(), n = x.n(), t = x.t(), r = fs.rank();
  if (x.dims() != fs.dims()) throw DimensionError("mttkrp: tensor and factor shapes differ");
  if (mode < 1 || mode > 3) throw DomainError("mttkrp: bad mode " + std::to_string(mode));
  Matrix out = Matrix::Zero(x.dim(mode), r);
  for (Index k = 0; k < t; ++k)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) {
        const double v = x(i, j, k);
        if (v == 0.0) continue;
        for (Index l = 0; l < r; ++l) {
          switch (mode) {
            case 1: out(i, l) += v * fs.P(j, l) * fs.F(k, l); break;
            case 2: out(j, l) += v * fs.C(i, l) * fs.F(k, l); break;
            default: out(k, l) += v * fs.C(i, l) * fs.P(j, l); break;
          }
        }
      }
  return out;
}

Tensor3 reconstruct(const FactorSet& fs) {
  const Index m = fs.C.rows(), n = fs.P.rows(), t = fs.F.rows(), r = fs.rank();
  Tensor3 x(m, n, t);
  for (Index k = 0; k < t; ++k)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (Index l = 0; l < r; ++l) s += fs.C(i, l) * fs.P(j, l) * fs.F(k, l);
        x(i, j, k) = s;
      }
  return x;
}

double squared_residual(const Tensor3& x, const FactorSet& fs) {
  if (x.dims() != fs.dims()) throw DimensionError("squared_residual: tensor and factor shapes differ");
  const Index r = fs.rank();
  double total = 0.0;
  for (Index k = 0; k < x.t(); ++k)
    for (Index j = 0; j < x.n(); ++j)
      for (Index i = 0; i < x.m(); ++i) {
        double s = 0.0;
        for (Index l = 0; l < r; ++l) s += fs.C(i, l) * fs.P(j, l) * fs.F(k, l);
        const double d = x(i, j, k) - s;
        total += d * d;
      }
  return total;
}

}  // namespace tdrc::kernels::serial
