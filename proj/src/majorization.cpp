#include "pincert/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "pincert/averaging.hpp"

namespace pincert {

namespace {

double recompute(const MatrixC& a, const MatrixC& b, const std::vector<UnitaryMatrix>& us) {
  MatrixC sum = MatrixC::Zero(b.rows(), b.cols());
  for (const UnitaryMatrix& u : us) sum += u.matrix().adjoint() * b * u.matrix();
  sum /= static_cast<double>(us.size());
  return (sum - a).norm();
}

MajorizationCertificate identity_certificate(const HermitianMatrix& b) {
  MajorizationCertificate cert;
  cert.unitaries.push_back(UnitaryMatrix::identity(b.size()));
  cert.source = b;
  cert.target = b;
  cert.residual = 0.0;
  return cert;
}

}  // namespace

BlockPartition::BlockPartition(std::vector<Index> r) : ranks(std::move(r)) {
  if (ranks.empty()) throw ValueError("BlockPartition: no blocks");
  for (Index w : ranks)
    if (w <= 0) throw ValueError("BlockPartition: block sizes must be positive");
}

Index BlockPartition::total() const {
  return std::accumulate(ranks.begin(), ranks.end(), Index{0});
}

Index BlockPartition::offset(Index block) const {
  Index pos = 0;
  for (Index k = 0; k < block; ++k) pos += ranks[static_cast<std::size_t>(k)];
  return pos;
}

MajorizationCertificate sign_pinch_certificate(const HermitianMatrix& b,
                                               const BlockPartition& part,
                                               const Tolerance& tol) {
  const Index n = b.size();
  if (part.total() != n)
    throw ShapeError("sign_pinch_certificate: partition does not sum to the dimension");
  const Index nb = part.blocks();
  if (nb > 14)
    throw SizeError("sign_pinch_certificate: " + std::to_string(nb) +
                    " blocks would need 2^" + std::to_string(nb - 1) + " unitaries");

  // Target: the exact block pinching of B.
  MatrixC pinched = MatrixC::Zero(n, n);
  for (Index j = 0; j < nb; ++j) {
    const Index o = part.offset(j);
    const Index w = part.ranks[static_cast<std::size_t>(j)];
    pinched.block(o, o, w, w) = b.matrix().block(o, o, w, w);
  }

  MajorizationCertificate cert;
  cert.source = b;
  cert.target = HermitianMatrix(pinched, tol);

  const std::size_t family = std::size_t{1} << (nb - 1);
  cert.unitaries.reserve(family);
  for (std::size_t g = 0; g < family; ++g) {
    MatrixC u = MatrixC::Zero(n, n);
    for (Index j = 0; j < nb; ++j) {
      // First block always +1; block j >= 1 carries bit j-1 of g.
      const double sign = (j == 0 || ((g >> (j - 1)) & 1U) == 0U) ? 1.0 : -1.0;
      const Index o = part.offset(j);
      const Index w = part.ranks[static_cast<std::size_t>(j)];
      u.block(o, o, w, w) = sign * MatrixC::Identity(w, w);
    }
    cert.unitaries.push_back(UnitaryMatrix(u, tol));
  }
  cert.residual = recompute(cert.target.matrix(), cert.source.matrix(), cert.unitaries);
  return cert;
}

MajorizationCertificate cyclic_mean_certificate(const std::vector<HermitianMatrix>& blocks,
                                                const Tolerance& tol) {
  if (blocks.empty()) throw ShapeError("cyclic_mean_certificate: empty block list");
  const Index nb = static_cast<Index>(blocks.size());
  const Index s = blocks.front().size();
  for (const HermitianMatrix& a : blocks)
    if (a.size() != s) throw ShapeError("cyclic_mean_certificate: blocks have mixed sizes");
  const Index n = nb * s;

  MatrixC source = MatrixC::Zero(n, n);
  MatrixC mean = MatrixC::Zero(s, s);
  for (Index j = 0; j < nb; ++j) {
    source.block(j * s, j * s, s, s) = blocks[static_cast<std::size_t>(j)].matrix();
    mean += blocks[static_cast<std::size_t>(j)].matrix();
  }
  mean /= static_cast<double>(nb);
  MatrixC target = MatrixC::Zero(n, n);
  for (Index j = 0; j < nb; ++j) target.block(j * s, j * s, s, s) = mean;

  MajorizationCertificate cert;
  cert.source = HermitianMatrix(source, tol);
  cert.target = HermitianMatrix(target, tol);
  // Block shift by k: identity blocks at (r, r+k mod nb); conjugation moves
  // block r of the source to block r+k, so the average is the block mean.
  for (Index k = 0; k < nb; ++k) {
    MatrixC u = MatrixC::Zero(n, n);
    for (Index r = 0; r < nb; ++r) {
      const Index c = (r + k) % nb;
      u.block(r * s, c * s, s, s) = MatrixC::Identity(s, s);
    }
    cert.unitaries.push_back(UnitaryMatrix(u, tol));
  }
  cert.residual = recompute(cert.target.matrix(), cert.source.matrix(), cert.unitaries);
  return cert;
}

MajorizationCertificate corner_sum_certificate(const std::vector<HermitianMatrix>& blocks,
                                               const Tolerance& tol) {
  if (blocks.empty()) throw ShapeError("corner_sum_certificate: empty block list");
  const Index nb = static_cast<Index>(blocks.size());
  const Index s = blocks.front().size();
  for (const HermitianMatrix& a : blocks) {
    if (a.size() != s) throw ShapeError("corner_sum_certificate: blocks have mixed sizes");
    const EigResult eig = hermitian_eig(a, tol);
    if (eig.values(0) < -tol.structural(1.0 + a.matrix().norm(), s))
      throw NotPSDError("corner_sum_certificate: block has eigenvalue " +
                            std::to_string(eig.values(0)),
                        eig.values(0));
  }
  const Index n = nb * s;

  // state(k) = blockdiag(T_k, 0, ..., 0, A_{k+1}, ..., A_nb) with
  // T_k = A_1 + ... + A_k; state(1) is the target, state(nb) the source.
  auto state = [&](Index k) {
    MatrixC m = MatrixC::Zero(n, n);
    MatrixC head = MatrixC::Zero(s, s);
    for (Index j = 0; j < k; ++j) head += blocks[static_cast<std::size_t>(j)].matrix();
    m.block(0, 0, s, s) = head;
    for (Index j = k; j < nb; ++j)
      m.block(j * s, j * s, s, s) = blocks[static_cast<std::size_t>(j)].matrix();
    return m;
  };

  std::vector<HermitianMatrix> roots;  // A_j^{1/2}, cached
  roots.reserve(static_cast<std::size_t>(nb));
  for (const HermitianMatrix& a : blocks) roots.push_back(sqrt_psd(a, tol));

  Index doubling_steps = 0;
  for (Index k = 1; k < nb; ++k)
    if (blocks[static_cast<std::size_t>(k)].matrix().norm() > tol.abs_tol) ++doubling_steps;
  if (doubling_steps > 14)
    throw SizeError("corner_sum_certificate: " + std::to_string(doubling_steps) +
                    " corner steps would need 2^" + std::to_string(doubling_steps) +
                    " unitaries");

  // current: state(k+1) ≺ state(nb); fold the steps from the back.
  MajorizationCertificate current = identity_certificate(HermitianMatrix(state(nb), tol));
  MatrixC head = MatrixC::Zero(s, s);  // T_k while stepping downward needs all prefixes
  for (Index k = nb - 1; k >= 1; --k) {
    if (blocks[static_cast<std::size_t>(k)].matrix().norm() <= tol.abs_tol) continue;

    // Factor C with C C* = state(k+1) and C* C = state(k) + cross terms at
    // block (1, k+1): T_k^{1/2} at (1,1), A_{k+1}^{1/2} at (1, k+1), and
    // A_j^{1/2} riding along at (j, j) for j > k+1.
    head.setZero();
    for (Index j = 0; j < k; ++j) head += blocks[static_cast<std::size_t>(j)].matrix();
    const HermitianMatrix head_root = sqrt_psd(HermitianMatrix(head, tol), tol);

    MatrixC c = MatrixC::Zero(n, n);
    c.block(0, 0, s, s) = head_root.matrix();
    c.block(0, k * s, s, s) = roots[static_cast<std::size_t>(k)].matrix();
    for (Index j = k + 1; j < nb; ++j)
      c.block(j * s, j * s, s, s) = roots[static_cast<std::size_t>(j)].matrix();

    const PolarResult pol = polar(c, tol);
    const MatrixC& w = pol.unitary.matrix();
    MatrixC d = MatrixC::Identity(n, n);
    d.block(k * s, k * s, s, s) = -MatrixC::Identity(s, s);

    MajorizationCertificate step;
    step.source = current.target;  // state(k+1), shared object
    step.target = HermitianMatrix(state(k), tol);
    step.unitaries.push_back(UnitaryMatrix(w, tol));
    step.unitaries.push_back(UnitaryMatrix(MatrixC(w * d), tol));
    step.residual = recompute(step.target.matrix(), step.source.matrix(), step.unitaries);

    current = compose_certificates(step, current, tol);
  }
  current.residual = recompute(current.target.matrix(), current.source.matrix(),
                               current.unitaries);
  return current;
}

MajorizationCertificate compose_certificates(const MajorizationCertificate& c1,
                                             const MajorizationCertificate& c2,
                                             const Tolerance& tol) {
  if (c1.unitaries.empty() || c2.unitaries.empty())
    throw CertificateError("compose_certificates: empty unitary family");
  const Index n = c1.source.size();
  if (c2.target.size() != n)
    throw CertificateError("compose_certificates: certificate dimensions do not match");
  const double mid_scale = 1.0 + c2.target.matrix().norm();
  if ((c1.source.matrix() - c2.target.matrix()).norm() >
      1e-8 * static_cast<double>(n) * mid_scale)
    throw CertificateError("compose_certificates: middle matrices disagree");

  MajorizationCertificate out;
  out.target = c1.target;
  out.source = c2.source;
  out.unitaries.reserve(c1.unitaries.size() * c2.unitaries.size());
  for (const UnitaryMatrix& u : c1.unitaries)
    for (const UnitaryMatrix& v : c2.unitaries)
      out.unitaries.push_back(UnitaryMatrix(MatrixC(v.matrix() * u.matrix()), tol));
  out.residual = recompute(out.target.matrix(), out.source.matrix(), out.unitaries);
  return out;
}

MajorizationCertificate conjugate_certificate(const MajorizationCertificate& cert,
                                              const UnitaryMatrix& v, const HermitianMatrix& b2,
                                              const Tolerance& tol) {
  const Index n = cert.source.size();
  if (v.size() != n || b2.size() != n)
    throw CertificateError("conjugate_certificate: dimensions do not match");
  const MatrixC transported = v.matrix().adjoint() * b2.matrix() * v.matrix();
  if ((transported - cert.source.matrix()).norm() >
      1e-8 * static_cast<double>(n) * (1.0 + b2.matrix().norm()))
    throw CertificateError("conjugate_certificate: V* B2 V does not equal the old source");

  MajorizationCertificate out;
  out.target = cert.target;
  out.source = b2;
  out.unitaries.reserve(cert.unitaries.size());
  for (const UnitaryMatrix& u : cert.unitaries)
    out.unitaries.push_back(UnitaryMatrix(MatrixC(v.matrix() * u.matrix()), tol));
  out.residual = recompute(out.target.matrix(), out.source.matrix(), out.unitaries);
  return out;
}

MajorizationCertificate corner_reduction(const MajorizationCertificate& cert,
                                         const HermitianMatrix& a, const Tolerance& tol) {
  const Index s = a.size();
  const Index n = cert.source.size();
  if (n <= s) throw CertificateError("corner_reduction: certificate has no zero corner");
  if (cert.unitaries.empty()) throw CertificateError("corner_reduction: empty unitary family");

  const EigResult eig = hermitian_eig(a, tol);
  const double lam_max = std::max(eig.values(s - 1), 0.0);
  const double lam_min = eig.values(0);
  if (lam_min <= tol.rank_cutoff * std::max(lam_max, 1e-300))
    throw InfeasibleError(
        "corner_reduction: corner block is not positive definite (injectivity fails)");

  MatrixC embedded = MatrixC::Zero(n, n);
  embedded.block(0, 0, s, s) = a.matrix();
  const double scale = 1.0 + a.matrix().norm();
  if ((cert.source.matrix() - embedded).norm() > 1e-8 * static_cast<double>(n) * scale)
    throw CertificateError("corner_reduction: source is not diag(A, 0)");
  const MatrixC target_corner = cert.target.matrix().block(0, 0, s, s);
  MatrixC target_embedded = MatrixC::Zero(n, n);
  target_embedded.block(0, 0, s, s) = target_corner;
  if ((cert.target.matrix() - target_embedded).norm() >
      1e-8 * static_cast<double>(n) * (1.0 + cert.target.matrix().norm()))
    throw CertificateError("corner_reduction: target is not diag(B, 0)");

  // The (2,2) block of the averaged conjugates is (1/N) sum U12* A U12 = 0
  // up to the residual, and A >= lam_min I on its block, so every U12 (and by
  // unitarity U21) is bounded by the derived tolerance.
  const double families = static_cast<double>(cert.unitaries.size());
  const double slack = tol.structural(scale, n) * 10.0;
  const double forced =
      std::sqrt(std::max(families * std::sqrt(static_cast<double>(n)) *
                             (cert.residual + slack) / lam_min,
                         0.0)) +
      slack;

  MajorizationCertificate out;
  out.source = a;
  out.target = HermitianMatrix(target_corner, tol);
  for (const UnitaryMatrix& u : cert.unitaries) {
    const MatrixC u12 = u.matrix().block(0, s, s, n - s);
    const MatrixC u21 = u.matrix().block(s, 0, n - s, s);
    const double off = std::max(u12.norm(), u21.norm());
    if (off > forced)
      throw StructureError("corner_reduction: member off-corner block has norm " +
                           std::to_string(off) + " above the forced bound " +
                           std::to_string(forced));
    const PolarResult pol = polar(MatrixC(u.matrix().block(0, 0, s, s)), tol);
    out.unitaries.push_back(pol.unitary);
  }
  out.residual = recompute(out.target.matrix(), out.source.matrix(), out.unitaries);
  return out;
}

MajorizationCertificate tau_scalar_certificate(const HermitianMatrix& a, const Tolerance& tol) {
  const Index n = a.size();
  const DixmierCertificate dix = average_single(a, tol);

  MajorizationCertificate cert;
  cert.source = a;
  cert.target =
      HermitianMatrix(MatrixC(dix.targets[0] * MatrixC::Identity(n, n)), tol);
  cert.unitaries = dix.unitaries;
  cert.residual = dix.residuals[0];
  return cert;
}

MajorizationVerification verify_majorization(const HermitianMatrix& a, const HermitianMatrix& b,
                                             const MajorizationCertificate& cert,
                                             const Tolerance& tol) {
  const Index n = a.size();
  if (b.size() != n) throw ShapeError("verify_majorization: dimensions do not match");
  if (cert.unitaries.empty()) throw ShapeError("verify_majorization: empty unitary family");
  for (const UnitaryMatrix& u : cert.unitaries)
    if (u.size() != n) throw ShapeError("verify_majorization: member size does not match");

  MajorizationVerification out;
  out.recomputed_residual = recompute(a.matrix(), b.matrix(), cert.unitaries);
  for (const UnitaryMatrix& u : cert.unitaries) {
    const MatrixC dev = u.matrix().adjoint() * u.matrix() - MatrixC::Identity(n, n);
    out.unitarity_deviation = std::max(out.unitarity_deviation, dev.norm());
  }
  out.trace_gap = std::abs(a.trace_mean() - b.trace_mean());
  const double scale = 1.0 + b.matrix().norm();
  out.bound = std::max(cert.residual + tol.structural(scale, n) * 100.0,
                       1e-8 * static_cast<double>(n) * scale);
  out.ok = out.recomputed_residual <= out.bound &&
           out.unitarity_deviation <= 1e-11 * static_cast<double>(n) &&
           out.trace_gap <= 1e-10 * scale;
  return out;
}

bool eigen_majorization_check(const HermitianMatrix& a, const HermitianMatrix& b,
                              const Tolerance& tol) {
  const Index n = a.size();
  if (b.size() != n) throw ShapeError("eigen_majorization_check: dimensions do not match");
  const EigResult ea = hermitian_eig(a, tol);
  const EigResult eb = hermitian_eig(b, tol);
  const double scale =
      1.0 + std::max(a.matrix().norm(), b.matrix().norm());
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (Index k = 0; k < n; ++k) {
    sum_a += ea.values(n - 1 - k);  // descending partial sums
    sum_b += eb.values(n - 1 - k);
    if (sum_a > sum_b + 1e-8 * scale) return false;
  }
  return std::abs(sum_a - sum_b) <= 1e-8 * scale;  // equal traces
}

}  // namespace pincert
