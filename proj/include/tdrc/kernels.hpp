#pragma once

#include "tdrc/tensor.hpp"

// Hot tensor kernels in two flavours. `serial` is the plain reference kept for
// testing and benchmarking; `omp` is what the library uses. The OpenMP versions
// give bitwise-identical results for any thread count: every output element is
// accumulated by a single thread in a fixed order, and cross-slice reductions
// go through fixed-size partial buffers summed serially.
namespace tdrc::kernels {

namespace serial {
/// X_(mode) * paired_khatri_rao(fs, mode), without forming either operand.
Matrix mttkrp(const Tensor3& x, const FactorSet& fs, int mode);
Tensor3 reconstruct(const FactorSet& fs);
/// ||x - ⟦fs⟧||^2.
double squared_residual(const Tensor3& x, const FactorSet& fs);
}  // namespace serial

namespace omp {
Matrix mttkrp(const Tensor3& x, const FactorSet& fs, int mode);
Tensor3 reconstruct(const FactorSet& fs);
double squared_residual(const Tensor3& x, const FactorSet& fs);
}  // namespace omp

}  // namespace tdrc::kernels
