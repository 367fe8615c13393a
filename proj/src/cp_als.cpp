#include "tdrc/cp_als.hpp"

#include <cmath>

#include "tdrc/errors.hpp"
#include "tdrc/kernels.hpp"
#include "tdrc/linalg.hpp"
#include "tdrc/rng.hpp"

namespace tdrc {

FactorSet random_factors(Index m, Index n, Index t, Index rank, std::uint64_t seed) {
  auto rng = make_stream(seed, Stream::kInit);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto fill = [&](Index rows) {
    Matrix a(rows, rank);
    for (Index i = 0; i < rows; ++i)
      for (Index l = 0; l < rank; ++l) a(i, l) = unif(rng);
    return a;
  };
  FactorSet fs;
  fs.C = fill(m);
  fs.P = fill(n);
  fs.F = fill(t);
  return fs;
}

Matrix als_factor_update(const Tensor3& x, const FactorSet& fs, int mode) {
  return solve_right_spd(kernels::omp::mttkrp(x, fs, mode), paired_gram(fs, mode));
}

CpResult cp_als_fit(const Tensor3& x, const CpOptions& options) {
  if (options.rank < 1) throw DomainError("CP rank must be at least 1");
  if (!(options.tol > 0.0)) throw DomainError("CP tolerance must be positive");
  CpResult out;
  out.factors = random_factors(x.m(), x.n(), x.t(), options.rank, options.seed);
  out.factors.validate(options.allow_high_rank);

  double prev = std::sqrt(kernels::omp::squared_residual(x, out.factors));
  out.residual_history.push_back(prev);
  for (int sweep = 0; sweep < options.max_iter; ++sweep) {
    out.factors.C = als_factor_update(x, out.factors, 1);
    out.factors.P = als_factor_update(x, out.factors, 2);
    out.factors.F = als_factor_update(x, out.factors, 3);
    const double res = std::sqrt(kernels::omp::squared_residual(x, out.factors));
    out.residual_history.push_back(res);
    out.sweeps = sweep + 1;
    if (res == 0.0 || std::abs(prev - res) < options.tol * prev) {
      out.converged = true;
      break;
    }
    prev = res;
  }
  return out;
}

}  // namespace tdrc
