#include "tdrc/cg.hpp"

#include "tdrc/errors.hpp"

namespace tdrc {

CgProblem::CgProblem(Matrix O, Matrix U, Matrix V, double nu, double lambda)
    : O_(std::move(O)), U_(std::move(U)), V_(std::move(V)), nu_(nu), lambda_(lambda) {
  if (U_.rows() != O_.rows() || V_.rows() != O_.cols() || U_.cols() != V_.cols())
    throw DimensionError("CG problem: O, U, V shapes do not conform");
  if (nu_ < 0.0 || lambda_ < 0.0) throw DomainError("CG problem: nu and lambda must be nonnegative");
  if (nu_ + lambda_ <= 0.0) throw DomainError("CG problem: nu = lambda = 0 is ill-posed");
}

CgResult cg_solve(const CgProblem& p, const CgOptions& options) {
  const Matrix rhs = p.nu() * (p.U().transpose() * p.O() * p.V());
  return cg_solve_gram(rhs, p.U().transpose() * p.U(), p.V().transpose() * p.V(), p.nu(), p.lambda(), options);
}

CgResult cg_solve_gram(const Matrix& rhs, const Matrix& utu, const Matrix& vtv, double nu, double lambda,
                       const CgOptions& options) {
  auto apply = [&](const Matrix& B) -> Matrix { return nu * (utu * B * vtv) + lambda * B; };

  CgResult out;
  out.X = Matrix::Zero(rhs.rows(), rhs.cols());
  Matrix R = rhs;  // R0 = rhs - A(X0) with X0 = 0
  Matrix B = R;
  double rs = R.squaredNorm();
  out.residual_sq.push_back(rs);
  const double threshold = options.rel_tol * rs;
  if (rs == 0.0) return out;

  for (int k = 0; k < options.max_iter; ++k) {
    const Matrix AB = apply(B);
    // <B, A(B)> = nu ||U B V^T||^2 + lambda ||B||^2
    const double curvature = (B.array() * AB.array()).sum();
    if (!(curvature > 0.0)) break;
    const double step = rs / curvature;
    out.X += step * B;
    R -= step * AB;
    const double rs_next = R.squaredNorm();
    out.residual_sq.push_back(rs_next);
    out.iterations = k + 1;
    if (rs_next < threshold) break;
    B = R + (rs_next / rs) * B;
    rs = rs_next;
  }
  return out;
}

}  // namespace tdrc
