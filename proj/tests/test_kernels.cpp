#include <omp.h>

#include "doctest.h"
#include "oracles.hpp"
#include "tdrc/kernels.hpp"

using namespace tdrc;

TEST_CASE("serial and OpenMP kernels agree with the unfolded products") {
  std::mt19937_64 rng(23);
  for (auto [m, n, t, r] : {std::array<Index, 4>{7, 5, 3, 2}, {130, 17, 4, 4}, {1, 1, 1, 1}}) {
    const auto fs = oracle::random_factors(rng, m, n, t, r);
    Tensor3 x = oracle::random_tensor(rng, m, n, t);
    x(0, 0, 0) = 0.0;
    for (int mode = 1; mode <= 3; ++mode) {
      const Matrix ref = oracle::unfold(x, mode) * oracle::kr_for_mode(fs, mode);
      CHECK((kernels::serial::mttkrp(x, fs, mode) - ref).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((kernels::omp::mttkrp(x, fs, mode) - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
    const Tensor3 a = kernels::serial::reconstruct(fs), b = kernels::omp::reconstruct(fs);
    for (Index p = 0; p < a.size(); ++p) CHECK(a.values()[p] == doctest::Approx(b.values()[p]).epsilon(1e-14));
    CHECK(kernels::omp::squared_residual(x, fs) ==
          doctest::Approx(kernels::serial::squared_residual(x, fs)).epsilon(1e-12));
  }
}

TEST_CASE("OpenMP kernels are bitwise independent of the thread count") {
  std::mt19937_64 rng(29);
  const auto fs = oracle::random_factors(rng, 97, 31, 5, 4);
  const Tensor3 x = oracle::random_tensor(rng, 97, 31, 5);
  omp_set_num_threads(1);
  std::array<Matrix, 3> one;
  for (int mode = 1; mode <= 3; ++mode) one[mode - 1] = kernels::omp::mttkrp(x, fs, mode);
  const double r1 = kernels::omp::squared_residual(x, fs);
  omp_set_num_threads(4);
  for (int mode = 1; mode <= 3; ++mode) CHECK(kernels::omp::mttkrp(x, fs, mode) == one[mode - 1]);
  CHECK(kernels::omp::squared_residual(x, fs) == r1);
}
