// Trace-constant pinchings and their averaging unitaries.
//
// A pinching certificate exhibits an orthogonal decomposition I = sum E_j with
// E_j X E_j = tau(X) E_j: conjugated into the right basis, X has constant
// diagonal tau(X). The two directions connecting pinchings to averaging are
// constructive here:
//   - forward: W = sum_k e^{2 pi i k/N} E_k satisfies W^N = I and averages X
//     to tau(X) I over its powers;
//   - backward: from an averaging unitary U, the root map f(e^{i theta}) =
//     e^{i theta/N} on [0, 2 pi) yields W = f(U^N)^{-1} U with W^N = I, whose
//     spectral projections (grouped by nearest N-th root of unity) pinch X.

#ifndef PINCERT_PINCHING_HPP
#define PINCERT_PINCHING_HPP

#include "pincert/spectral.hpp"

#include <cstdint>
#include <vector>

namespace pincert {

struct PinchingCertificate {
  std::vector<ProjectionMatrix> projections;  // mutually orthogonal, sum to I
  double target = 0.0;                        // tau(X)
  double residual = 0.0;                      // max_j ||E_j X E_j - target E_j||_F
  bool certified = true;                      // producer's claim that residual met its bound
  bool complete = true;                       // sum of the E_j is I (false: a sub-identity family)
  UnitaryMatrix basis;                        // columns group into the ranges of the E_j
};

struct ConstantDiagonalResult {
  UnitaryMatrix basis;  // U with diag(U* X U) = tau(X) entrywise
  PinchingCertificate certificate;
  int rotations = 0;  // Givens rotations used, always <= n - 1
};

// Drives the diagonal of U* X U to the constant tau(X) by Givens rotations:
// each step picks the argmin/argmax diagonal entries (ties to the lowest
// index), phase-aligns the pivot, and solves the 2x2 quadratic so the new
// entry equals tau(X) exactly; that index is never revisited.
ConstantDiagonalResult constant_diagonal_unitary(const HermitianMatrix& x,
                                                 const Tolerance& tol = Tolerance{});

// Unitary U with diag(U* X U) = target_diag entrywise; requires target_diag
// to be majorized by the spectrum (InfeasibleError carries the first violated
// prefix, 1-based, with index n for a trace mismatch).
UnitaryMatrix schur_horn_diagonal(const HermitianMatrix& x, const VectorR& target_diag,
                                  const Tolerance& tol = Tolerance{});

struct AveragingUnitary {
  UnitaryMatrix w;
  int order = 1;                    // N with W^N = I
  double target = 0.0;              // tau of the certified matrix
  double power_residual = 0.0;      // ||W^N - I||_F
  double averaging_residual = 0.0;  // ||(1/N) sum_j W^-j X W^j - tau(X) I||_F
};

// W = sum_k e^{2 pi i k/N} E_k from a pinching certificate for X. A family
// that is not an orthogonal decomposition of the identity fails the unitarity
// of W and raises CertificateError.
AveragingUnitary dixmier_unitary_from_pinching(const HermitianMatrix& x,
                                               const PinchingCertificate& cert,
                                               const Tolerance& tol = Tolerance{});

// Inverse direction: verifies that U averages X to tau(X) I over `order`
// powers (NotAveragingError otherwise), forms W = f(U^order)^{-1} U, and
// groups the spectral projections of W by nearest order-th root of unity.
// An eigenvalue of W farther than min(0.1, pi/(2 order)) in angle from every
// root raises BranchError.
PinchingCertificate pinching_from_averaging_unitary(const HermitianMatrix& x,
                                                    const UnitaryMatrix& u, int order,
                                                    const Tolerance& tol = Tolerance{});

// Best-effort block pinching: minimizes
//   f(U) = sum_j ||E_j U* X U E_j - tau(X) E_j||_F^2
// over unitaries U, where E_j are the coordinate projections with the given
// ranks, by cyclic sweeps of exactly minimized two-plane rotations. seed = 0
// warm-starts from constant_diagonal_unitary; a nonzero seed starts from a
// seeded random unitary instead. The result may carry residual > residual_tol
// and is then flagged not certified.
PinchingCertificate optimize_block_pinching(const HermitianMatrix& x,
                                            const std::vector<Index>& ranks, int max_sweeps,
                                            double residual_tol, std::uint64_t seed = 0,
                                            const Tolerance& tol = Tolerance{});

struct PinchingVerification {
  bool ok = false;
  double recomputed_residual = 0.0;
  double sum_deviation = 0.0;       // ||sum_j E_j - I||_F
  double max_orthogonality = 0.0;   // max_{j<k} ||E_j E_k||_F
};

// Full recheck by direct matrix arithmetic: family structure and the pinching
// residual, independent of how the certificate was produced.
PinchingVerification verify_pinching(const HermitianMatrix& x, const PinchingCertificate& cert,
                                     const Tolerance& tol = Tolerance{});

// U^k by square-and-multiply; k >= 0.
MatrixC unitary_power(const MatrixC& u, long k);

}  // namespace pincert

#endif  // PINCERT_PINCHING_HPP
