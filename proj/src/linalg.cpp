#include "tdrc/linalg.hpp"

#include "tdrc/errors.hpp"

namespace tdrc {

Matrix solve_right_spd(const Matrix& B, const Matrix& A) {
  if (A.rows() != A.cols() || B.cols() != A.rows())
    throw DimensionError("solve_right_spd: operand shapes do not conform");
  const Index r = A.rows();
  if (r == 0) return Matrix(B.rows(), 0);

  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success && llt.rcond() >= 1e-12) return llt.solve(B.transpose()).transpose();

  const double trace = A.trace();
  const double eps = trace > 0.0 ? 1e-10 * trace / static_cast<double>(r) : 1e-10;
  Matrix jittered = A;
  jittered.diagonal().array() += eps;
  llt.compute(jittered);
  if (llt.info() == Eigen::Success) return llt.solve(B.transpose()).transpose();
  // Indefinite through round-off: fall back to a rank-revealing solve.
  return jittered.completeOrthogonalDecomposition().solve(B.transpose()).transpose();
}

}  // namespace tdrc
