#include "tdrc/tdrc.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "tdrc/cp_als.hpp"
#include "tdrc/errors.hpp"
#include "tdrc/kernels.hpp"
#include "tdrc/linalg.hpp"

namespace tdrc {

void Hyperparams::validate() const {
  if (rank < 1) throw DomainError("rank must be at least 1");
  if (alpha < 0.0 || beta < 0.0 || lambda < 0.0) throw DomainError("alpha, beta and lambda must be nonnegative");
  if (!(mu > 1.0)) throw DomainError("mu must exceed 1");
  if (!(rho_init > 0.0)) throw DomainError("rho_init must be positive");
  if (!(rho_cap >= rho_init)) throw DomainError("rho_cap must be at least rho_init");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (!(cg_tol > 0.0) || cg_max_iter < 1) throw DomainError("CG controls must be positive");
}

TdrcState tdrc_init(Index m, Index n, Index t, const Hyperparams& hp) {
  hp.validate();
  TdrcState s;
  s.factors = random_factors(m, n, t, hp.rank, hp.seed);
  s.factors.validate(hp.allow_high_rank);
  s.M1 = Matrix::Zero(hp.rank, hp.rank);
  s.M2 = Matrix::Zero(hp.rank, hp.rank);
  s.J1 = s.factors.C;
  s.J2 = s.factors.P;
  s.Y1 = Matrix::Zero(m, hp.rank);
  s.Y2 = Matrix::Zero(n, hp.rank);
  s.rho1 = s.rho2 = hp.rho_init;
  return s;
}

namespace {

Matrix projection(const Matrix& s, const Matrix& factor, double nu, const Hyperparams& hp) {
  const Index r = factor.cols();
  if (nu + hp.lambda <= 0.0) return Matrix::Zero(r, r);
  const Matrix rhs = nu * (factor.transpose() * (s * factor));
  const Matrix gram = factor.transpose() * factor;
  return cg_solve_gram(rhs, gram, gram, nu, hp.lambda, CgOptions{hp.cg_tol, hp.cg_max_iter}).X;
}

// Shared body of the C and P sweeps. `unfolded_times_kr` is X_(n) G, `gram` is
// G^T G, `s` the similarity matrix for this mode, `weight` alpha or beta.
void admm_sweep(Matrix& factor, Matrix& J, Matrix& Y, double& rho, const Matrix& M, const Matrix& s,
                const Matrix& unfolded_times_kr, const Matrix& gram, double weight, const Hyperparams& hp) {
  const Index r = factor.cols();
  const Matrix identity = Matrix::Identity(r, r);

  const Matrix FM = factor * M;
  J = solve_right_spd(weight * (s * FM) + rho * factor + Y, weight * (FM.transpose() * FM) + rho * identity);

  const Matrix JMt = J * M.transpose();  // Q^T with Q = M J^T
  const Matrix QQt = M * (J.transpose() * J) * M.transpose();
  factor = solve_right_spd(unfolded_times_kr + weight * (s * JMt) + rho * J - Y, gram + weight * QQt + rho * identity);

  Y += rho * (factor - J);
  rho = std::min(hp.mu * rho, hp.rho_cap);
}

void check_similarity(const Matrix& s, Index size, const char* name) {
  if (s.rows() != size || s.cols() != size)
    throw DimensionError(std::string(name) + " is " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                         ", expected " + std::to_string(size) + "x" + std::to_string(size));
}

}  // namespace

void update_projections(TdrcState& state, const Matrix& s_m, const Matrix& s_n, const Hyperparams& hp) {
  state.M1 = projection(s_m, state.factors.C, hp.alpha, hp);
  state.M2 = projection(s_n, state.factors.P, hp.beta, hp);
}

Matrix update_F(const Tensor3& x, const Matrix& C, const Matrix& P) {
  FactorSet fs{C, P, Matrix::Zero(x.t(), C.cols())};
  return als_factor_update(x, fs, 3);
}

TdrcState admm_update_C(TdrcState state, const Tensor3& x, const Matrix& s_m, const Hyperparams& hp) {
  check_similarity(s_m, x.m(), "S_m");
  const Matrix xg = kernels::omp::mttkrp(x, state.factors, 1);
  const Matrix gram = paired_gram(state.factors, 1);
  admm_sweep(state.factors.C, state.J1, state.Y1, state.rho1, state.M1, s_m, xg, gram, hp.alpha, hp);
  return state;
}

TdrcState admm_update_P(TdrcState state, const Tensor3& x, const Matrix& s_n, const Hyperparams& hp) {
  check_similarity(s_n, x.n(), "S_n");
  const Matrix xr = kernels::omp::mttkrp(x, state.factors, 2);
  const Matrix gram = paired_gram(state.factors, 2);
  admm_sweep(state.factors.P, state.J2, state.Y2, state.rho2, state.M2, s_n, xr, gram, hp.beta, hp);
  return state;
}

double objective_value(const TdrcState& state, const Tensor3& x, const Matrix& s_m, const Matrix& s_n,
                       const Hyperparams& hp) {
  const auto& fs = state.factors;
  double obj = 0.5 * kernels::omp::squared_residual(x, fs);
  obj += 0.5 * hp.lambda * (state.M1.squaredNorm() + state.M2.squaredNorm());
  if (hp.alpha != 0.0) obj += 0.5 * hp.alpha * (s_m - fs.C * state.M1 * fs.C.transpose()).squaredNorm();
  if (hp.beta != 0.0) obj += 0.5 * hp.beta * (s_n - fs.P * state.M2 * fs.P.transpose()).squaredNorm();
  return obj;
}

TdrcResult tdrc_fit(const Tensor3& x, const Matrix& s_m, const Matrix& s_n, const Hyperparams& hp,
                    const IterationCallback& on_iteration) {
  hp.validate();
  check_similarity(s_m, x.m(), "S_m");
  check_similarity(s_n, x.n(), "S_n");
  TdrcState state = tdrc_init(x.m(), x.n(), x.t(), hp);

  TdrcResult out;
  double prev_obj = 0.0;
  for (int it = 1; it <= hp.max_iter; ++it) {
    update_projections(state, s_m, s_n, hp);
    state.factors.F = update_F(x, state.factors.C, state.factors.P);
    state = admm_update_C(std::move(state), x, s_m, hp);
    state = admm_update_P(std::move(state), x, s_n, hp);
    state.iter = it;

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = objective_value(state, x, s_m, s_n, hp);
    rec.primal_c = (state.factors.C - state.J1).norm();
    rec.primal_p = (state.factors.P - state.J2).norm();
    rec.rho1 = state.rho1;
    rec.rho2 = state.rho2;
    if (!std::isfinite(rec.objective)) {
      std::ostringstream msg;
      msg << "objective became non-finite at iteration " << it << " (rho1=" << state.rho1 << ", rho2=" << state.rho2
          << ", |C|=" << state.factors.C.norm() << ", |P|=" << state.factors.P.norm() << ", |F|="
          << state.factors.F.norm() << "); check alpha, beta, lambda and rank";
      throw DivergenceError(msg.str());
    }
    rec.relative_change = it == 1 ? 1.0 : std::abs(prev_obj - rec.objective) / std::max(std::abs(prev_obj), 1e-300);
    state.history.push_back(rec);
    if (on_iteration) on_iteration(rec);
    prev_obj = rec.objective;

    auto relative = [](double num, const Matrix& ref) {
      const double d = ref.norm();
      return d > 0.0 ? num / d : num;
    };
    if (it > 1 && rec.relative_change < hp.tol && relative(rec.primal_c, state.factors.C) < hp.tol &&
        relative(rec.primal_p, state.factors.P) < hp.tol) {
      out.converged = true;
      break;
    }
  }
  out.factors = std::move(state.factors);
  out.M1 = std::move(state.M1);
  out.M2 = std::move(state.M2);
  out.history = std::move(state.history);
  return out;
}

Tensor3 predict_scores(const FactorSet& fs) { return reconstruct(fs); }

}  // namespace tdrc
