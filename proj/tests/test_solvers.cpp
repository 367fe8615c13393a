#include "doctest.h"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "tdrc/cp_als.hpp"
#include "tdrc/errors.hpp"
#include "tdrc/tdrc.hpp"

using namespace tdrc;

namespace {

Hyperparams small_hp(Index rank = 2) {
  Hyperparams hp;
  hp.rank = rank;
  hp.alpha = 0.7;
  hp.beta = 0.3;
  hp.lambda = 0.01;
  return hp;
}

/// A random mid-optimisation state: factors, projections, multipliers all nonzero.
TdrcState random_state(std::mt19937_64& rng, Index m, Index n, Index t, Index r) {
  TdrcState s;
  s.factors = oracle::random_factors(rng, m, n, t, r);
  s.M1 = oracle::random_matrix(rng, r, r);
  s.M2 = oracle::random_matrix(rng, r, r);
  s.J1 = oracle::random_matrix(rng, m, r);
  s.J2 = oracle::random_matrix(rng, n, r);
  s.Y1 = oracle::random_matrix(rng, m, r);
  s.Y2 = oracle::random_matrix(rng, n, r);
  s.rho1 = 1.7;
  s.rho2 = 2.3;
  return s;
}

/// Swaps the miRNA and disease roles: tensor modes 1 and 2, C/P, and every per-mode quantity.
TdrcState swap_modes(const TdrcState& s) {
  TdrcState w = s;
  std::swap(w.factors.C, w.factors.P);
  std::swap(w.M1, w.M2);
  std::swap(w.J1, w.J2);
  std::swap(w.Y1, w.Y2);
  std::swap(w.rho1, w.rho2);
  return w;
}

Tensor3 swap_modes(const Tensor3& x) {
  Tensor3 y(x.n(), x.m(), x.t());
  for (Index i = 0; i < x.m(); ++i)
    for (Index j = 0; j < x.n(); ++j)
      for (Index k = 0; k < x.t(); ++k) y(j, i, k) = x(i, j, k);
  return y;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("CP-ALS on a zero tensor reaches zero residual in one sweep") {
  const auto res = cp_als_fit(Tensor3(4, 3, 2), CpOptions{2, 1e-6, 50, 1});
  CHECK(res.sweeps == 1);
  CHECK(res.residual_history.back() == 0.0);
}

TEST_CASE("CP-ALS recovers a noiseless rank-2 tensor") {
  const auto inst = synthetic::low_rank(8, 7, 5, 2, 3);
  double best = INFINITY;
  for (std::uint64_t restart = 0; restart < 5; ++restart) {
    const auto res = cp_als_fit(inst.x, CpOptions{2, 1e-12, 2000, restart});
    for (std::size_t s = 1; s < res.residual_history.size(); ++s)
      CHECK(res.residual_history[s] <= res.residual_history[s - 1] + 1e-10);
    best = std::min(best, res.residual_history.back() / inst.x.norm());
  }
  CHECK(best < 1e-3);
}

TEST_CASE("CP-ALS is deterministic given the seed") {
  std::mt19937_64 rng(2);
  const Tensor3 x = oracle::random_tensor(rng, 6, 5, 3);
  const auto a = cp_als_fit(x, CpOptions{2, 1e-8, 30, 9});
  const auto b = cp_als_fit(x, CpOptions{2, 1e-8, 30, 9});
  CHECK(a.residual_history == b.residual_history);
  CHECK(a.factors.C == b.factors.C);
}

TEST_CASE("F update") {
  std::mt19937_64 rng(53);
  const auto fs = oracle::random_factors(rng, 4, 3, 5, 2);
  CHECK(max_abs(update_F(reconstruct(fs), fs.C, fs.P) - fs.F) < 1e-10);
  CHECK(update_F(Tensor3(4, 3, 5), fs.C, fs.P).isZero(0.0));

  const Tensor3 x = oracle::random_tensor(rng, 4, 3, 5);
  TdrcState s;
  s.factors = fs;
  s.factors.F = update_F(x, fs.C, fs.P);
  CHECK(oracle::grad_F(s, x).norm() < 1e-8);
}

TEST_CASE("C block: stationarity of both closed forms") {
  std::mt19937_64 rng(59);
  const auto hp = small_hp(3);
  for (int trial = 0; trial < 5; ++trial) {
    const TdrcState before = random_state(rng, 6, 5, 4, 3);
    const Tensor3 x = oracle::random_tensor(rng, 6, 5, 4);
    const Matrix s_m = oracle::random_similarity(rng, 6);
    const TdrcState after = admm_update_C(before, x, s_m, hp);

    const Matrix gJ = oracle::grad_aux(s_m, before.factors.C, before.M1, after.J1, before.Y1, before.rho1, hp.alpha);
    CHECK(gJ.norm() < 1e-6 * (1 + after.J1.norm()));
    const Matrix gC = oracle::grad_factor_lagrangian(oracle::unfold(x, 1), oracle::kr_for_mode(before.factors, 1), s_m,
                                                     after.factors.C, before.M1, after.J1, before.Y1, before.rho1,
                                                     hp.alpha);
    CHECK(gC.norm() < 1e-6 * (1 + after.factors.C.norm()));
    CHECK(max_abs(after.Y1 - (before.Y1 + before.rho1 * (after.factors.C - after.J1))) < 1e-12);
    CHECK(after.rho1 == doctest::Approx(before.rho1 * hp.mu));
    // P-side quantities are untouched.
    CHECK(after.factors.P == before.factors.P);
    CHECK(after.J2 == before.J2);
  }
}

TEST_CASE("C block with alpha = 0 is proximal least squares") {
  std::mt19937_64 rng(61);
  auto hp = small_hp(2);
  hp.alpha = 0.0;
  TdrcState s = random_state(rng, 5, 4, 3, 2);
  s.Y1.setZero();
  s.rho1 = 1e8;
  const Tensor3 x = oracle::random_tensor(rng, 5, 4, 3);
  const Matrix s_m = oracle::random_similarity(rng, 5);
  const TdrcState after = admm_update_C(s, x, s_m, hp);
  CHECK(max_abs(after.J1 - s.factors.C) < 1e-12);
  CHECK(max_abs(after.factors.C - s.factors.C) < 1e-6);

  s.rho1 = 0.5;
  const TdrcState ridge = admm_update_C(s, x, s_m, hp);
  const Matrix G = oracle::kr_for_mode(s.factors, 1);
  const Matrix expected = (oracle::unfold(x, 1) * G + 0.5 * s.factors.C) *
                          (G.transpose() * G + 0.5 * Matrix::Identity(2, 2)).inverse();
  CHECK(max_abs(ridge.factors.C - expected) < 1e-10);
}

TEST_CASE("penalty growth is geometric and capped") {
  std::mt19937_64 rng(67);
  auto hp = small_hp(2);
  hp.rho_cap = 1.5;
  TdrcState s = random_state(rng, 4, 4, 2, 2);
  s.rho1 = s.rho2 = hp.rho_init;
  const Tensor3 x = oracle::random_tensor(rng, 4, 4, 2);
  const Matrix sim = oracle::random_similarity(rng, 4);
  for (int k = 1; k <= 6; ++k) {
    s = admm_update_C(std::move(s), x, sim, hp);
    s = admm_update_P(std::move(s), x, sim, hp);
    const double expected = std::min(hp.rho_init * std::pow(hp.mu, k), hp.rho_cap);
    CHECK(s.rho1 == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s.rho2 == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("P block: stationarity, beta = 0, and mode-swap symmetry") {
  std::mt19937_64 rng(71);
  auto hp = small_hp(3);
  for (int trial = 0; trial < 5; ++trial) {
    const TdrcState before = random_state(rng, 6, 5, 4, 3);
    const Tensor3 x = oracle::random_tensor(rng, 6, 5, 4);
    const Matrix s_m = oracle::random_similarity(rng, 6), s_n = oracle::random_similarity(rng, 5);
    const TdrcState after = admm_update_P(before, x, s_n, hp);

    const Matrix gJ = oracle::grad_aux(s_n, before.factors.P, before.M2, after.J2, before.Y2, before.rho2, hp.beta);
    CHECK(gJ.norm() < 1e-6 * (1 + after.J2.norm()));
    const Matrix gP = oracle::grad_factor_lagrangian(oracle::unfold(x, 2), oracle::kr_for_mode(before.factors, 2), s_n,
                                                     after.factors.P, before.M2, after.J2, before.Y2, before.rho2,
                                                     hp.beta);
    CHECK(gP.norm() < 1e-6 * (1 + after.factors.P.norm()));

    Hyperparams swapped_hp = hp;
    std::swap(swapped_hp.alpha, swapped_hp.beta);
    const TdrcState mirrored = admm_update_C(swap_modes(before), swap_modes(x), s_n, swapped_hp);
    CHECK(max_abs(mirrored.factors.C - after.factors.P) < 1e-10);
    CHECK(max_abs(mirrored.J1 - after.J2) < 1e-10);
    CHECK(max_abs(mirrored.Y1 - after.Y2) < 1e-10);
    CHECK(mirrored.rho1 == after.rho2);
  }

  hp.beta = 0.0;
  TdrcState s = random_state(rng, 5, 4, 3, 3);
  const Tensor3 x = oracle::random_tensor(rng, 5, 4, 3);
  const TdrcState after = admm_update_P(s, x, oracle::random_similarity(rng, 4), hp);
  const Matrix R = oracle::kr_for_mode(s.factors, 2);
  const Matrix J = (s.rho2 * s.factors.P + s.Y2) / s.rho2;
  const Matrix expected = (oracle::unfold(x, 2) * R + s.rho2 * J - s.Y2) *
                          (R.transpose() * R + s.rho2 * Matrix::Identity(3, 3)).inverse();
  CHECK(max_abs(after.factors.P - expected) < 1e-10);
}

TEST_CASE("objective value") {
  std::mt19937_64 rng(73);
  const auto hp = small_hp(2);
  const Tensor3 x = oracle::random_tensor(rng, 5, 4, 3);
  const Matrix s_m = oracle::random_similarity(rng, 5), s_n = oracle::random_similarity(rng, 4);

  TdrcState zero;
  zero.factors = {Matrix::Zero(5, 2), Matrix::Zero(4, 2), Matrix::Zero(3, 2)};
  zero.M1 = zero.M2 = Matrix::Zero(2, 2);
  const double expected = 0.5 * x.squared_norm() + 0.5 * hp.alpha * s_m.squaredNorm() + 0.5 * hp.beta * s_n.squaredNorm();
  CHECK(objective_value(zero, x, s_m, s_n, hp) == doctest::Approx(expected).epsilon(1e-14));

  const TdrcState s = random_state(rng, 5, 4, 3, 2);
  Hyperparams plain = hp;
  plain.alpha = plain.beta = plain.lambda = 0.0;
  CHECK(objective_value(s, x, s_m, s_n, plain) ==
        doctest::Approx(0.5 * std::pow(residual_norm(x, s.factors), 2)).epsilon(1e-14));
  CHECK(std::abs(objective_value(s, x, s_m, s_n, hp) - oracle::objective(s, x, s_m, s_n, hp)) < 1e-10);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(79);
  const auto hp = small_hp(2);
  const Tensor3 x = oracle::random_tensor(rng, 5, 4, 3);
  const Matrix s_m = oracle::random_similarity(rng, 5), s_n = oracle::random_similarity(rng, 4);
  const TdrcState base = random_state(rng, 5, 4, 3, 2);

  auto check_block = [&](auto select, const Matrix& analytic) {
    Matrix fd(analytic.rows(), analytic.cols());
    const double h = 1e-5;
    for (Index a = 0; a < analytic.size(); ++a) {
      TdrcState plus = base, minus = base;
      select(plus).data()[a] += h;
      select(minus).data()[a] -= h;
      fd.data()[a] = (objective_value(plus, x, s_m, s_n, hp) - objective_value(minus, x, s_m, s_n, hp)) / (2 * h);
    }
    CHECK((fd - analytic).norm() / analytic.norm() < 1e-5);
  };
  check_block([](TdrcState& s) -> Matrix& { return s.factors.C; }, oracle::grad_C(base, x, s_m, hp));
  check_block([](TdrcState& s) -> Matrix& { return s.factors.P; }, oracle::grad_P(base, x, s_n, hp));
  check_block([](TdrcState& s) -> Matrix& { return s.factors.F; }, oracle::grad_F(base, x));
  check_block([](TdrcState& s) -> Matrix& { return s.M1; }, oracle::grad_M1(base, s_m, hp));
  check_block([](TdrcState& s) -> Matrix& { return s.M2; }, oracle::grad_M2(base, s_n, hp));
}

TEST_CASE("projection update zeroes its own gradient") {
  std::mt19937_64 rng(83);
  const auto hp = small_hp(3);
  TdrcState s = random_state(rng, 7, 6, 3, 3);
  const Matrix s_m = oracle::random_similarity(rng, 7), s_n = oracle::random_similarity(rng, 6);
  update_projections(s, s_m, s_n, hp);
  CHECK(oracle::grad_M1(s, s_m, hp).norm() < 1e-6 * (1 + s.M1.norm()));
  CHECK(oracle::grad_M2(s, s_n, hp).norm() < 1e-6 * (1 + s.M2.norm()));
}

TEST_CASE("tdrc_fit edge cases") {
  auto hp = small_hp(2);
  hp.alpha = hp.beta = 0.0;
  const auto inst = synthetic::low_rank(6, 5, 3, 2, 11);
  const auto res = tdrc_fit(inst.x, inst.s_m, inst.s_n, hp);
  CHECK(res.M1.isZero(0.0));
  CHECK(res.M2.isZero(0.0));

  const auto zero = tdrc_fit(Tensor3(6, 5, 3), inst.s_m, inst.s_n, hp);
  CHECK(residual_norm(Tensor3(6, 5, 3), zero.factors) == 0.0);

  Matrix huge = Matrix::Constant(6, 6, 1e300);
  CHECK_THROWS_AS(tdrc_fit(inst.x, huge, inst.s_n, small_hp(2)), DivergenceError);
  CHECK_THROWS_AS(tdrc_fit(inst.x, inst.s_n, inst.s_n, small_hp(2)), DimensionError);

  Hyperparams bad = small_hp(2);
  bad.mu = 1.0;
  CHECK_THROWS_AS(tdrc_fit(inst.x, inst.s_m, inst.s_n, bad), DomainError);
  bad = small_hp(0);
  CHECK_THROWS_AS(tdrc_fit(inst.x, inst.s_m, inst.s_n, bad), DomainError);
}

TEST_CASE("tdrc_fit is deterministic and converges on a low-rank instance") {
  auto hp = small_hp(2);
  hp.max_iter = 300;
  const auto inst = synthetic::low_rank(12, 10, 4, 2, 5);
  const auto a = tdrc_fit(inst.x, inst.s_m, inst.s_n, hp);
  const auto b = tdrc_fit(inst.x, inst.s_m, inst.s_n, hp);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].objective == b.history[i].objective);
  CHECK(a.factors.C == b.factors.C);
  CHECK(a.converged);
  CHECK(a.history.back().primal_c < 1e-4);
  CHECK(a.history.back().primal_p < 1e-4);
  for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i].rho1 >= a.history[i - 1].rho1);
}

TEST_CASE("predict_scores is the reconstruction") {
  std::mt19937_64 rng(89);
  const auto fs = oracle::random_factors(rng, 3, 3, 2, 2);
  CHECK(predict_scores(fs) == reconstruct(fs));
}
