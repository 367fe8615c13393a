#pragma once

#include <cstdint>
#include <vector>

#include "tdrc/tensor.hpp"

namespace tdrc {

struct CpOptions {
  Index rank = 4;
  /// Stop when the relative change of the residual norm between sweeps falls below tol.
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 0;
  bool allow_high_rank = false;
};

struct CpResult {
  FactorSet factors;
  /// Residual norm at initialisation followed by one entry per sweep.
  std::vector<double> residual_history;
  int sweeps = 0;
  bool converged = false;
};

/// Factors drawn uniform [0, 1) from the seed's init substream (C, then P, then F, row by row).
FactorSet random_factors(Index m, Index n, Index t, Index rank, std::uint64_t seed);

/// Least-squares update of the factor for `mode` with the other two fixed.
Matrix als_factor_update(const Tensor3& x, const FactorSet& fs, int mode);

/// CP decomposition by alternating least squares, cycling C, P, F.
CpResult cp_als_fit(const Tensor3& x, const CpOptions& options);

}  // namespace tdrc
