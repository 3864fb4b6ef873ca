#include "pincert/nilpotent.hpp"

#include <cmath>
#include <string>

namespace pincert {

NilpotentRealization nilpotent_realization(const HermitianMatrix& x, const Tolerance& tol) {
  const Index n = x.size();
  const double scale = 1.0 + x.matrix().norm();
  const double tau = x.trace_mean();
  if (std::abs(tau) > 1e-10 * scale)
    throw TraceError("nilpotent_realization: matrix is not traceless (tau = " +
                         std::to_string(tau) + ")",
                     tau);

  // tau(X) = 0, so the trace-constant rotation drives the diagonal to zero.
  const ConstantDiagonalResult rot = constant_diagonal_unitary(x, tol);
  const MatrixC& v = rot.basis.matrix();
  const MatrixC y = v.adjoint() * x.matrix() * v;

  NilpotentRealization out;
  out.basis = rot.basis;
  out.triangular = MatrixC::Zero(n, n);
  for (Index c = 1; c < n; ++c)
    for (Index r = 0; r < c; ++r) out.triangular(r, c) = y(r, c);
  out.z = v * out.triangular * v.adjoint();
  out.reconstruction_residual = (out.z + out.z.adjoint().eval() - x.matrix()).norm();
  return out;
}

}  // namespace pincert
