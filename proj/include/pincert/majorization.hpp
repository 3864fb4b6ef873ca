#pragma once

#include <vector>

#include "pincert/spectral.hpp"
#include "pincert/types.hpp"

namespace pincert {

// Witness for A ≺ B (A is the equal-weights average of unitary conjugates
// of B): A = (1/N) sum_i U_i* B U_i within `residual`.
struct MajorizationCertificate {
  std::vector<UnitaryMatrix> unitaries;
  HermitianMatrix source;  // B
  HermitianMatrix target;  // A
  double residual = 0.0;   // ||(1/N) sum_i U_i* B U_i - A||_F
};

// Contiguous diagonal blocks of sizes ranks[0], ranks[1], ... summing to n.
struct BlockPartition {
  std::vector<Index> ranks;

  explicit BlockPartition(std::vector<Index> r);
  Index blocks() const { return static_cast<Index>(ranks.size()); }
  Index total() const;
  Index offset(Index block) const;  // start index of the given block
};

struct MajorizationVerification {
  bool ok = false;
  double recomputed_residual = 0.0;
  double bound = 0.0;
  double unitarity_deviation = 0.0;  // worst ||U*U - I||_F over members
  double trace_gap = 0.0;            // |tau(A) - tau(B)|
};

// blockdiag(B) ≺ B via the 2^{b-1} diagonal-sign unitaries (first block
// fixed at +1). Throws SizeError when the partition has more than 14 blocks.
MajorizationCertificate sign_pinch_certificate(const HermitianMatrix& b,
                                               const BlockPartition& part,
                                               const Tolerance& tol = Tolerance{});

// blockdiag(mean, ..., mean) ≺ blockdiag(A_1, ..., A_N) via the N block
// cyclic shifts. All blocks must share one size (ShapeError otherwise).
MajorizationCertificate cyclic_mean_certificate(const std::vector<HermitianMatrix>& blocks,
                                                const Tolerance& tol = Tolerance{});

// blockdiag(A_1, ..., A_N) ≺ blockdiag(A_1 + ... + A_N, 0, ..., 0) for psd
// blocks of one size, by induction: each step moves one block into the
// corner with a polar-derived unitary equivalence plus a two-member sign
// pinching. Member count is 2^(number of nonzero blocks beyond the first);
// more than 14 doubling steps throws SizeError.
MajorizationCertificate corner_sum_certificate(const std::vector<HermitianMatrix>& blocks,
                                               const Tolerance& tol = Tolerance{});

// A ≺ B and B ≺ C compose to A ≺ C with the product family {V_j U_i}.
// Throws CertificateError when c1's source and c2's target disagree.
MajorizationCertificate compose_certificates(const MajorizationCertificate& c1,
                                             const MajorizationCertificate& c2,
                                             const Tolerance& tol = Tolerance{});

// Transports A ≺ B1 along B1 = V* B2 V to A ≺ B2 by replacing U_i with
// V U_i. Throws CertificateError when the equivalence fails.
MajorizationCertificate conjugate_certificate(const MajorizationCertificate& cert,
                                              const UnitaryMatrix& v, const HermitianMatrix& b2,
                                              const Tolerance& tol = Tolerance{});

// From a certificate for diag(B, 0) ≺ diag(A, 0) with A positive definite on
// its block, extracts the certificate B ≺ A: injectivity forces the
// off-corner blocks of every member to vanish, so the top-left blocks are
// re-unitarized by their polar factors. Throws InfeasibleError when A is
// numerically singular, CertificateError when the certificate does not have
// the stated corner shape, StructureError when a member's off-corner block
// exceeds the derived tolerance.
MajorizationCertificate corner_reduction(const MajorizationCertificate& cert,
                                         const HermitianMatrix& a,
                                         const Tolerance& tol = Tolerance{});

// tau(A) I ≺ A via the cyclic Dixmier family of A.
MajorizationCertificate tau_scalar_certificate(const HermitianMatrix& a,
                                               const Tolerance& tol = Tolerance{});

// Recomputes the certificate residual for the given pair and checks member
// unitarity and trace preservation.
MajorizationVerification verify_majorization(const HermitianMatrix& a, const HermitianMatrix& b,
                                             const MajorizationCertificate& cert,
                                             const Tolerance& tol = Tolerance{});

// Necessary condition for A ≺ B: equal traces and top-k eigenvalue sums of A
// dominated by those of B, within 1e-8 scaled slack.
bool eigen_majorization_check(const HermitianMatrix& a, const HermitianMatrix& b,
                              const Tolerance& tol = Tolerance{});

}  // namespace pincert
