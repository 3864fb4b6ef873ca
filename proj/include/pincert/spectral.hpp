// Deterministic spectral kernels: everything downstream (pinchings, projection
// decompositions, averaging certificates) reduces to these primitives.
//
// The Hermitian eigensolver is a cyclic Jacobi iteration chosen for exactly
// reproducible output: eigenvalues ascend, ties keep their pre-sort column
// order, and each eigenvector's largest-magnitude entry is rotated to be real
// and positive. Certificates compare byte-for-byte across runs because every
// branch below is deterministic.

#ifndef PINCERT_SPECTRAL_HPP
#define PINCERT_SPECTRAL_HPP

#include "pincert/types.hpp"

#include <limits>

namespace pincert {

struct EigResult {
  VectorR values;         // ascending
  UnitaryMatrix vectors;  // column k pairs with values[k]
};

// Cyclic Jacobi for self-adjoint X: sweeps all (p,q) planes, phase-aligning
// each pivot before a real rotation, until the off-diagonal Frobenius norm
// drops below 1e-14 * ||X||_F (at most 30 sweeps).
EigResult hermitian_eig(const HermitianMatrix& x, const Tolerance& tol = Tolerance{});

struct UnitaryEigResult {
  VectorC values;  // on (numerically near) the unit circle
  UnitaryMatrix vectors;
};

// Eigendecomposition of a unitary via its commuting Hermitian real and
// imaginary parts: diagonalize Re U, then refine each eigenvalue cluster by
// diagonalizing the compressed Im U. Deterministic ordering: ascending real
// part, then ascending imaginary part within a cluster.
UnitaryEigResult unitary_eig(const UnitaryMatrix& u, const Tolerance& tol = Tolerance{});

// Positive square root by eigendecomposition. Eigenvalues below -structural
// tolerance raise NotPSDError; small negatives are clamped to zero.
HermitianMatrix sqrt_psd(const HermitianMatrix& a, const Tolerance& tol = Tolerance{});

struct PolarResult {
  UnitaryMatrix unitary;     // V
  HermitianMatrix positive;  // P = (M*M)^{1/2}, so M = V P
};

// Right polar decomposition with a deterministic unitary completion: left
// singular vectors for rank-deficient directions are filled in by
// Gram-Schmidt over the standard basis in index order.
PolarResult polar(const MatrixC& m, const Tolerance& tol = Tolerance{});

// Half-open/closed real interval for spectral cutoffs; +-infinity allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval left_open(double lo, double hi) { return {lo, hi, false, true}; }
  static Interval right_open(double lo, double hi) { return {lo, hi, true, false}; }

  // Membership after snapping: eigenvalues within snap of an endpoint are
  // treated as sitting exactly on it, so the open/closed flags decide.
  bool contains(double x, double snap) const;
};

// Spectral projection chi_J(A) of a self-adjoint A onto the eigenvalues lying
// in J; endpoint snapping uses rank_cutoff * max|eigenvalue|.
ProjectionMatrix spectral_projection(const HermitianMatrix& a, const Interval& j,
                                     const Tolerance& tol = Tolerance{});

// Projection onto the range (support) of a psd matrix.
ProjectionMatrix range_projection(const HermitianMatrix& a, const Tolerance& tol = Tolerance{});

// Partial isometry V with V*V = P and VV* <= Q; requires rank P <= rank Q.
// Maps the k-th basis vector of range(P) to the k-th of range(Q), both in the
// deterministic eigen-order.
PartialIsometry partial_isometry(const ProjectionMatrix& p, const ProjectionMatrix& q,
                                 const Tolerance& tol = Tolerance{});

}  // namespace pincert

#endif  // PINCERT_SPECTRAL_HPP
