#pragma once

#include "tdrc/tensor.hpp"

namespace tdrc {

/// Returns B * A^{-1} for a symmetric positive semidefinite r x r matrix A.
///
/// A Cholesky factorisation is tried first. If it fails or the reciprocal
/// condition estimate drops below 1e-12, eps*I is added with
/// eps = 1e-10 * trace(A) / r (1e-10 when the trace vanishes).
Matrix solve_right_spd(const Matrix& B, const Matrix& A);

/// Squared Frobenius norm.
inline double sq_norm(const Matrix& a) { return a.squaredNorm(); }

}  // namespace tdrc
