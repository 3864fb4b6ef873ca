#pragma once

#include "pincert/pinching.hpp"
#include "pincert/spectral.hpp"
#include "pincert/types.hpp"

namespace pincert {

// A traceless Hermitian X written as X = Z + Z* with Z^n = 0.
struct NilpotentRealization {
  MatrixC z;                            // the nilpotent, Z = V T V*
  UnitaryMatrix basis;                  // V; Z is strictly upper triangular in its columns
  MatrixC triangular;                   // T = V* Z V with exact zeros on and below the diagonal
  double reconstruction_residual = 0.0; // ||Z + Z* - X||_F
};

// Rotates X to a zero-diagonal matrix Y = V* X V (possible exactly when
// tau(X) = 0), keeps the strictly upper triangle T of Y, and returns
// Z = V T V*. Then Z + Z* = X up to the discarded diagonal of Y and
// T^n = 0 structurally, so Z is nilpotent.
// Throws TraceError carrying tau(X) when |tau(X)| > 1e-10 * (1 + ||X||_F).
NilpotentRealization nilpotent_realization(const HermitianMatrix& x,
                                           const Tolerance& tol = Tolerance{});

}  // namespace pincert
