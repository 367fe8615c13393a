#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tdrc/cg.hpp"
#include "tdrc/tensor.hpp"

namespace tdrc {

enum class Method { kTdrc, kCp };

/// Hyperparameters of the relationally constrained decomposition.
struct Hyperparams {
  Index rank = 4;
  double alpha = 2.0;    // weight of the miRNA similarity constraint
  double beta = 0.125;   // weight of the disease similarity constraint
  double lambda = 1e-3;  // ridge on the projections M1, M2
  double mu = 1.1;       // penalty growth factor
  double rho_init = 1.0;
  double rho_cap = 1e6;
  double tol = 1e-6;
  int max_iter = 200;
  double cg_tol = 1e-10;  // relative to the squared norm of the CG right-hand side
  int cg_max_iter = 100;
  std::uint64_t seed = 0;
  bool allow_high_rank = false;

  /// Throws DomainError on an invalid combination.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double relative_change = 0.0;
  double primal_c = 0.0;  // ||C - J1||_F
  double primal_p = 0.0;  // ||P - J2||_F
  double rho1 = 0.0;
  double rho2 = 0.0;
};

/// Full optimizer state.
struct TdrcState {
  FactorSet factors;
  Matrix M1, M2;  // r x r projections
  Matrix J1, J2;  // auxiliary copies of C and P
  Matrix Y1, Y2;  // Lagrange multipliers
  double rho1 = 1.0;
  double rho2 = 1.0;
  int iter = 0;
  std::vector<IterationRecord> history;
};

/// Random factors from the init substream, M = 0, J = factor copies, Y = 0, rho = rho_init.
TdrcState tdrc_init(Index m, Index n, Index t, const Hyperparams& hp);

/// M1 = CG(S_m, C, C, alpha, lambda) and M2 = CG(S_n, P, P, beta, lambda).
/// A projection whose problem has nu = lambda = 0 is set to zero.
void update_projections(TdrcState& state, const Matrix& s_m, const Matrix& s_n, const Hyperparams& hp);

/// Closed-form least-squares F for fixed C and P.
Matrix update_F(const Tensor3& x, const Matrix& C, const Matrix& P);

/// One ADMM sweep for C: J1, then C, then Y1 and rho1.
TdrcState admm_update_C(TdrcState state, const Tensor3& x, const Matrix& s_m, const Hyperparams& hp);
/// The mirrored sweep for P on mode 2 with M2, J2, Y2, rho2.
TdrcState admm_update_P(TdrcState state, const Tensor3& x, const Matrix& s_n, const Hyperparams& hp);

/// 1/2 ||X - ⟦C,P,F⟧||^2 + lambda/2 (||M1||^2 + ||M2||^2)
///   + alpha/2 ||S_m - C M1 C^T||^2 + beta/2 ||S_n - P M2 P^T||^2
double objective_value(const TdrcState& state, const Tensor3& x, const Matrix& s_m, const Matrix& s_n,
                       const Hyperparams& hp);

struct TdrcResult {
  FactorSet factors;
  Matrix M1, M2;
  std::vector<IterationRecord> history;
  bool converged = false;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Alternates projections, F, the C block and the P block until the relative
/// objective change and both relative primal residuals drop below tol, or
/// max_iter is reached. Throws DivergenceError on a non-finite objective.
TdrcResult tdrc_fit(const Tensor3& x, const Matrix& s_m, const Matrix& s_n, const Hyperparams& hp,
                    const IterationCallback& on_iteration = {});

/// Completed tensor; higher scores mean more likely associations.
Tensor3 predict_scores(const FactorSet& fs);

}  // namespace tdrc
