// Finite sums of projections: feasibility, decomposition, positive
// combinations, the q_± pair construction, and two-projection geometry
// (canonical form and halving).

#ifndef PINCERT_PROJECTION_SUMS_HPP
#define PINCERT_PROJECTION_SUMS_HPP

#include "pincert/pinching.hpp"
#include "pincert/spectral.hpp"

#include <vector>

namespace pincert {

struct ProjectionSumCertificate {
  std::vector<ProjectionMatrix> projections;
  double sum_residual = 0.0;  // ||sum_j P_j - A||_F
  Index count = 0;            // = projections.size()
};

struct ExcessDefect {
  HermitianMatrix a_plus;   // (A - I) restricted to spectrum in (1, ||A||]
  HermitianMatrix a_minus;  // (I - A) restricted to spectrum in (0, 1)
  ProjectionMatrix range;   // R_A
  double tau_plus = 0.0;
  double tau_minus = 0.0;
  double tau_a = 0.0;
  double tau_range = 0.0;
};

struct FeasibilityFlags {
  bool tau_condition = false;  // tau(A) >= tau(R_A)
  bool integer_trace = false;  // |Tr A - round(Tr A)| <= 1e-8 n
  bool fillmore = false;       // both, and round(Tr A) >= rank A
};

struct PositiveCombination {
  std::vector<double> coefficients;          // all >= 0
  std::vector<ProjectionMatrix> projections; // nested top-eigenspace projections
  double residual = 0.0;                     // ||sum_i c_i Q_i - A||_F
};

struct TwoProjectionForm {
  UnitaryMatrix basis;  // columns ordered [E^F | E^Fperp | Eperp^F | Eperp^Fperp | u_1..u_m | w_1..w_m]
  Index dim_both = 0;          // dim(E ^ F)
  Index dim_e_only = 0;        // dim(E ^ F-perp)
  Index dim_f_only = 0;        // dim(E-perp ^ F)
  Index dim_neither = 0;       // dim(E-perp ^ F-perp)
  Index generic_pairs = 0;     // m
  VectorR angles;              // m principal angles in (0, pi/2)
  VectorR h;                   // diag cosines
  VectorR k;                   // diag sines, h^2 + k^2 = 1
};

struct HalvedProjections {
  ProjectionMatrix e1, e2, f1, f2;
};

struct QpmPair {
  ProjectionMatrix q_minus;
  ProjectionMatrix q_plus;
  double identity_residual = 0.0;  // against q_- + q_+ = (2/||b||) b + 2 E' - (2/||b||) V b V*
};

// A_+ = (A - I) chi_A(1, ||A||], A_- = (I - A) chi_A(0, 1), both psd, together
// with the range projection and the trace identity
// tau(A) - tau(R_A) = tau(A_+) - tau(A_-).
ExcessDefect excess_defect(const HermitianMatrix& a, const Tolerance& tol = Tolerance{});

// Decomposability flags; `fillmore` is the exact finite-dimensional criterion.
FeasibilityFlags feasibility(const HermitianMatrix& a, const Tolerance& tol = Tolerance{});

// Writes psd A with integer trace m >= rank(A) as a sum of exactly m rank-one
// projections: peel top eigenprojections while Tr > n, rotate the rest to a
// (1,...,1,0,...,0) diagonal, and split the unit-diagonal block B into
// B^{1/2} e_j e_j* B^{1/2}. InfeasibleError names the violated flag.
ProjectionSumCertificate fillmore_decompose(const HermitianMatrix& a,
                                            const Tolerance& tol = Tolerance{});

// P_j = A^{1/2} E_j A^{1/2} from a target-1 pinching certificate of A.
ProjectionSumCertificate projections_from_pinching(const HermitianMatrix& a,
                                                   const PinchingCertificate& cert,
                                                   const Tolerance& tol = Tolerance{});

// Inverse direction: from A = sum_j P_j builds mutually orthogonal coordinate
// projections F_j of the same ranks, partial isometries W_j (P_j = W_j* W_j,
// F_j = W_j W_j*), B = sum W_j with B*B = A, polar B = V A^{1/2}, and returns
// the pinching E_j = V* F_j V with E_j A E_j = E_j. When sum_j rank P_j < n
// the family is incomplete (certificate flagged complete = false).
PinchingCertificate pinching_from_projections(const HermitianMatrix& a,
                                              const std::vector<ProjectionMatrix>& parts,
                                              const Tolerance& tol = Tolerance{});

// Spectral telescoping A = sum_i (lambda_i - lambda_{i+1}) Q_i over nested
// top-eigenspace projections; at most rank(A) terms, all coefficients >= 0.
PositiveCombination positive_combination(const HermitianMatrix& a,
                                         const Tolerance& tol = Tolerance{});

// 12 + ceil(14 (norm * inv_norm - 1)) + 1; requires norm * inv_norm >= 1.
long gp_bound(double norm, double inv_norm);

// 15 + ceil(28 / mu); requires mu > 0.
long mu_bound(double mu);

// The q_± projection pair built from psd b (0 < ||b|| <= 1) supported on
// S = R_b and a partial isometry V with V*V = S whose final projection
// E' = V V* is orthogonal to S:
//   q_∓ = b/||b|| ∓ (G V* + V G) + (E' - (1/||b||) V b V*),
// G = (b/||b|| - b²/||b||²)^{1/2}. Both are projections and
// q_- + q_+ = (2/||b||) b + 2 E' - (2/||b||) V b V*.
QpmPair build_q_pm(const HermitianMatrix& b, const PartialIsometry& v,
                   const Tolerance& tol = Tolerance{});

// Canonical form of a projection pair: intersection dimensions, principal
// angles of the generic part, and a basis in which E and F are the standard
// two-projection block matrices.
TwoProjectionForm two_projection_form(const ProjectionMatrix& e, const ProjectionMatrix& f,
                                      const Tolerance& tol = Tolerance{});

// Rebuilds (E, F) from a canonical form; used by verification.
std::pair<MatrixC, MatrixC> two_projection_reconstruct(const TwoProjectionForm& form);

// Splits E = E1 + E2 and F = F1 + F2 with rank E_i = rank(E)/2,
// rank F_i = rank(F)/2, E1 ⊥ F1 and E2 ⊥ F2. Requires the dimensions of
// E^F, E^F-perp, E-perp^F and the generic multiplicity all even
// (ParityError names the odd part).
HalvedProjections halve_two_projections(const ProjectionMatrix& e, const ProjectionMatrix& f,
                                        const Tolerance& tol = Tolerance{});

}  // namespace pincert

#endif  // PINCERT_PROJECTION_SUMS_HPP
