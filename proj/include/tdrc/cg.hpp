#pragma once

#include <vector>

#include "tdrc/tensor.hpp"

namespace tdrc {

/// min_X (nu/2) ||O - U X V^T||^2 + (lambda/2) ||X||^2 with O p x q, U p x r, V q x r.
class CgProblem {
 public:
  /// Throws DimensionError on non-conformable shapes and DomainError when
  /// nu or lambda is negative or both are zero.
  CgProblem(Matrix O, Matrix U, Matrix V, double nu, double lambda);

  const Matrix& O() const noexcept { return O_; }
  const Matrix& U() const noexcept { return U_; }
  const Matrix& V() const noexcept { return V_; }
  double nu() const noexcept { return nu_; }
  double lambda() const noexcept { return lambda_; }

 private:
  Matrix O_, U_, V_;
  double nu_, lambda_;
};

struct CgOptions {
  /// Stop once ||R||^2 < rel_tol * ||R0||^2.
  double rel_tol = 1e-10;
  int max_iter = 100;
};

struct CgResult {
  Matrix X;
  /// ||R^(k)||_F^2 for k = 0, 1, ...
  std::vector<double> residual_sq;
  int iterations = 0;
};

/// Conjugate gradients on nu * U^T U X V^T V + lambda * X = nu * U^T O V,
/// starting from X = 0.
CgResult cg_solve(const CgProblem& problem, const CgOptions& options = {});

/// Same iteration expressed on precomputed r x r quantities:
/// rhs = nu * U^T O V, utu = U^T U, vtv = V^T V.
CgResult cg_solve_gram(const Matrix& rhs, const Matrix& utu, const Matrix& vtv, double nu, double lambda,
                       const CgOptions& options = {});

}  // namespace tdrc
