#pragma once

#include <vector>

#include "pincert/pinching.hpp"
#include "pincert/spectral.hpp"
#include "pincert/types.hpp"

namespace pincert {

// A finite unitary family {U_i} together with the scalars t_j it certifies:
// (1/k) sum_i U_i* X_j U_i = t_j I for each certified matrix X_j.
struct DixmierCertificate {
  std::vector<UnitaryMatrix> unitaries;
  std::vector<double> targets;    // one per certified matrix, t_j = tau(X_j)
  std::vector<double> residuals;  // ||(1/k) sum_i U_i* X_j U_i - t_j I||_F
};

struct AverageVerification {
  bool ok = false;
  std::vector<double> residuals;  // recomputed independently
  std::vector<double> bounds;     // acceptance bound per matrix
};

// Averages one Hermitian matrix to tau(X) I with the cyclic powers
// {W^0, ..., W^{n-1}} of the order-n averaging unitary built from the
// trace-constant pinching of X. Scalar inputs return the one-member
// identity certificate.
DixmierCertificate average_single(const HermitianMatrix& x, const Tolerance& tol = Tolerance{});

// Simultaneously averages every X_m to tau(X_m) I. Stage m averages the
// current mean A_m = (1/k) sum_g g* X_m g under the family built so far and
// multiplies the family by the cyclic powers for A_m, so k grows by a factor
// n per non-scalar stage (k = n^m for generic inputs). Stage order is input
// order. Throws ShapeError on dimension mismatch or an empty list and
// SizeError when the family would grow past max_family members.
DixmierCertificate average_simultaneous(const std::vector<HermitianMatrix>& xs,
                                        const Tolerance& tol = Tolerance{},
                                        long max_family = 100000);

// Convenience overload for general square matrices: each input is split into
// Hermitian real/imaginary parts (X = H + iK), clearly Hermitian inputs are
// kept whole, and the expanded Hermitian list is certified. `expanded`
// receives that list in certificate order when non-null.
DixmierCertificate average_simultaneous(const std::vector<MatrixC>& xs,
                                        std::vector<HermitianMatrix>* expanded = nullptr,
                                        const Tolerance& tol = Tolerance{},
                                        long max_family = 100000);

// Recomputes every residual of `cert` against `xs` from scratch and compares
// with the per-matrix acceptance bound 1e-8 * n * (1 + ||X||_F).
AverageVerification verify_average(const std::vector<HermitianMatrix>& xs,
                                   const DixmierCertificate& cert,
                                   const Tolerance& tol = Tolerance{});

}  // namespace pincert
