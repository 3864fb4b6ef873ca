#include "pincert/projection_sums.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

namespace pincert {

namespace {

// Ceiling with a relative nudge so values that are integers up to rounding
// noise do not jump to the next integer.
long nudged_ceil(double v) {
  const double nudge = 1e-9 * std::max(1.0, std::abs(v));
  return static_cast<long>(std::ceil(v - nudge));
}

void require_psd(const EigResult& eig, const char* who, const Tolerance& tol, double norm,
                 Index n) {
  const double lo = eig.values(0);
  if (lo < -tol.structural(std::max(1.0, norm), n)) {
    throw NotPSDError(std::string(who) + ": matrix has eigenvalue " + std::to_string(lo), lo);
  }
}

// Gram-Schmidt of `cols` against the already-orthonormal `fixed` columns and
// against earlier columns of `cols` itself; collapse means the input was not
// the subspace it claimed to be.
void orthonormalize_against(MatrixC& cols, const MatrixC& fixed, const char* who) {
  for (Index c = 0; c < cols.cols(); ++c) {
    VectorC v = cols.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index f = 0; f < fixed.cols(); ++f) v -= fixed.col(f).dot(v) * fixed.col(f);
      for (Index f = 0; f < c; ++f) v -= cols.col(f).dot(v) * cols.col(f);
    }
    const double nrm = v.norm();
    if (nrm < 0.5)
      throw StructureError(std::string(who) + ": subspace basis collapsed during orthogonalization");
    cols.col(c) = v / nrm;
  }
}

}  // namespace

ExcessDefect excess_defect(const HermitianMatrix& a, const Tolerance& tol) {
  const Index n = a.size();
  const EigResult eig = hermitian_eig(a, tol);
  require_psd(eig, "excess_defect", tol, a.matrix().norm(), n);

  const double lam_max = std::max(eig.values(n - 1), 0.0);
  double abs_max = 0.0;
  for (Index k = 0; k < n; ++k) abs_max = std::max(abs_max, std::abs(eig.values(k)));
  const double snap = tol.rank_cutoff * std::max(abs_max, 1e-300);

  const Interval plus = Interval::left_open(1.0, lam_max);
  const Interval minus = Interval::open(0.0, 1.0);

  MatrixC ap = MatrixC::Zero(n, n);
  MatrixC am = MatrixC::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const double lam = eig.values(k);
    const VectorC v = eig.vectors.matrix().col(k);
    if (plus.contains(lam, snap)) ap += (lam - 1.0) * (v * v.adjoint());
    if (minus.contains(lam, snap)) am += (1.0 - lam) * (v * v.adjoint());
  }

  ExcessDefect out;
  out.a_plus = HermitianMatrix(0.5 * (ap + ap.adjoint().eval()), tol);
  out.a_minus = HermitianMatrix(0.5 * (am + am.adjoint().eval()), tol);
  out.range = range_projection(a, tol);
  out.tau_plus = out.a_plus.trace_mean();
  out.tau_minus = out.a_minus.trace_mean();
  out.tau_a = a.trace_mean();
  out.tau_range = out.range.trace_mean();
  return out;
}

FeasibilityFlags feasibility(const HermitianMatrix& a, const Tolerance& tol) {
  const Index n = a.size();
  const EigResult eig = hermitian_eig(a, tol);
  require_psd(eig, "feasibility", tol, a.matrix().norm(), n);

  const double lam_max = std::max(eig.values(n - 1), 0.0);
  const double cut = tol.rank_cutoff * std::max(lam_max, 1e-300);
  Index rank = 0;
  for (Index k = 0; k < n; ++k)
    if (eig.values(k) > cut) ++rank;

  const double tr = a.matrix().trace().real();
  const long m = std::lround(tr);
  const double slack = 1e-8 * static_cast<double>(n);

  FeasibilityFlags flags;
  flags.integer_trace = std::abs(tr - static_cast<double>(m)) <= slack;
  flags.tau_condition = tr >= static_cast<double>(rank) - slack;
  flags.fillmore = flags.integer_trace && flags.tau_condition && m >= rank && m >= 0;
  return flags;
}

ProjectionSumCertificate fillmore_decompose(const HermitianMatrix& a, const Tolerance& tol) {
  const Index n = a.size();
  const FeasibilityFlags flags = feasibility(a, tol);
  if (!flags.fillmore) {
    const char* failed = !flags.integer_trace ? "integer_trace"
                         : !flags.tau_condition ? "tau_condition"
                                                : "rank";
    throw InfeasibleError(std::string("fillmore_decompose: infeasible (") + failed +
                          " flag failed)");
  }
  const double tr = a.matrix().trace().real();
  const long m_total = std::lround(tr);
  if (m_total == 0)
    throw InfeasibleError(
        "fillmore_decompose: zero trace admits only the empty sum of projections");

  ProjectionSumCertificate out;
  out.projections.reserve(static_cast<std::size_t>(m_total));
  MatrixC work = a.matrix();

  // (i) While the trace exceeds n, peel top eigenprojections; lambda_max >=
  // Tr/n > 1 keeps the remainder psd and the rank unchanged.
  const long peels = std::max<long>(m_total - n, 0);
  for (long p = 0; p < peels; ++p) {
    const EigResult eig = hermitian_eig(HermitianMatrix(work, tol), tol);
    const double lam_max = eig.values(n - 1);
    const double tie = 1e-12 * std::max(1.0, std::abs(lam_max));
    Index pick = n - 1;
    for (Index k = 0; k < n; ++k) {
      if (eig.values(k) >= lam_max - tie) {
        pick = k;  // lowest index within the tied top group
        break;
      }
    }
    const VectorC v = eig.vectors.matrix().col(pick);
    out.projections.push_back(ProjectionMatrix::from_unit_vector(v, tol));
    work -= v * v.adjoint();
    work = 0.5 * (work + work.adjoint().eval());
  }

  // (ii) Remaining trace m <= n: rotate to the diagonal (1,...,1,0,...,0).
  const Index m = static_cast<Index>(m_total - peels);
  const HermitianMatrix rest(work, tol);
  VectorR d = VectorR::Zero(n);
  for (Index k = 0; k < m; ++k) d(k) = 1.0;
  const UnitaryMatrix u = schur_horn_diagonal(rest, d, tol);

  MatrixC y = u.matrix().adjoint() * work * u.matrix();
  // Zero diagonal entries of a psd matrix force zero rows/columns exactly in
  // exact arithmetic; truncate the numerical residue before compressing.
  const double trunc = 1e-8 * a.matrix().norm();
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r)
      if (std::abs(y(r, c)) < trunc) y(r, c) = Complex(0.0, 0.0);

  // (iii) Split the unit-diagonal block B via B^{1/2} e_j.
  const MatrixC b = y.topLeftCorner(m, m);
  const HermitianMatrix sq = sqrt_psd(HermitianMatrix(b, tol), tol);
  for (Index j = 0; j < m; ++j) {
    VectorC w = VectorC::Zero(n);
    w.head(m) = sq.matrix().col(j);
    const double nrm = w.norm();
    if (nrm < 0.5)
      throw StructureError("fillmore_decompose: splitting column lost its unit norm");
    w /= nrm;
    out.projections.push_back(ProjectionMatrix::from_unit_vector(MatrixC(u.matrix() * w), tol));
  }

  out.count = static_cast<Index>(out.projections.size());
  MatrixC sum = MatrixC::Zero(n, n);
  for (const ProjectionMatrix& p : out.projections) sum += p.matrix();
  out.sum_residual = (sum - a.matrix()).norm();
  return out;
}

ProjectionSumCertificate projections_from_pinching(const HermitianMatrix& a,
                                                   const PinchingCertificate& cert,
                                                   const Tolerance& tol) {
  const Index n = a.size();
  if (cert.projections.empty())
    throw CertificateError("projections_from_pinching: empty certificate");
  for (const ProjectionMatrix& e : cert.projections)
    if (e.size() != n)
      throw CertificateError("projections_from_pinching: projection size does not match matrix");
  const double scale = 1.0 + a.matrix().norm();
  if (std::abs(cert.target - 1.0) > 1e-8 * static_cast<double>(n) * scale)
    throw CertificateError("projections_from_pinching: certificate target is not 1");
  if (cert.residual > 1e-8 * static_cast<double>(n) * scale)
    throw CertificateError("projections_from_pinching: certificate residual too large");

  const HermitianMatrix root = sqrt_psd(a, tol);

  // E_j A E_j = E_j up to the certificate residual, so P_j = A^{1/2} E_j
  // A^{1/2} is idempotent up to ||A|| times that residual.
  Tolerance ptol = tol;
  ptol.abs_tol = std::max(tol.abs_tol, 10.0 * a.matrix().norm() * (cert.residual + tol.abs_tol));

  ProjectionSumCertificate out;
  out.projections.reserve(cert.projections.size());
  MatrixC sum = MatrixC::Zero(n, n);
  for (const ProjectionMatrix& e : cert.projections) {
    MatrixC p = root.matrix() * e.matrix() * root.matrix();
    p = 0.5 * (p + p.adjoint().eval());
    out.projections.push_back(ProjectionMatrix(p, ptol));
    sum += out.projections.back().matrix();
  }
  out.count = static_cast<Index>(out.projections.size());
  out.sum_residual = (sum - a.matrix()).norm();
  return out;
}

PinchingCertificate pinching_from_projections(const HermitianMatrix& a,
                                              const std::vector<ProjectionMatrix>& parts,
                                              const Tolerance& tol) {
  const Index n = a.size();
  if (parts.empty()) throw CertificateError("pinching_from_projections: empty projection list");
  Index total_rank = 0;
  MatrixC sum = MatrixC::Zero(n, n);
  for (const ProjectionMatrix& p : parts) {
    if (p.size() != n)
      throw CertificateError("pinching_from_projections: projection size does not match matrix");
    total_rank += p.rank();
    sum += p.matrix();
  }
  if (total_rank > n)
    throw RankError("pinching_from_projections: total rank " + std::to_string(total_rank) +
                    " exceeds dimension " + std::to_string(n));
  const double scale = 1.0 + a.matrix().norm();
  const double sum_dev = (sum - a.matrix()).norm();
  if (sum_dev > 1e-8 * static_cast<double>(n) * scale)
    throw CertificateError("pinching_from_projections: parts do not sum to the matrix (deviation " +
                           std::to_string(sum_dev) + ")");

  // Coordinate blocks F_j of the same ranks, stacked from index 0.
  MatrixC bsum = MatrixC::Zero(n, n);
  std::vector<Index> offsets{0};
  Index pos = 0;
  for (const ProjectionMatrix& p : parts) {
    const Index r = p.rank();
    MatrixC fcols = MatrixC::Zero(n, r);
    for (Index k = 0; k < r; ++k) fcols(pos + k, k) = Complex(1.0, 0.0);
    const ProjectionMatrix f = r > 0 ? ProjectionMatrix::from_orthonormal_columns(fcols, tol)
                                     : ProjectionMatrix::zero(n);
    if (r > 0) {
      const PartialIsometry w = partial_isometry(p, f, tol);
      bsum += w.matrix();
    }
    pos += r;
    offsets.push_back(pos);
  }

  // B*B = sum_j P_j = A; polar gives B = V A^{1/2} with V unitary (kernel
  // completion deterministic), so E_j = V* F_j V satisfies
  // A^{1/2} E_j A^{1/2} = B* F_j B = W_j* W_j = P_j and E_j A E_j = E_j.
  const PolarResult pol = polar(bsum, tol);
  const MatrixC v = pol.unitary.matrix();

  PinchingCertificate cert;
  cert.target = 1.0;
  cert.complete = (total_rank == n);
  cert.basis = UnitaryMatrix(MatrixC(v.adjoint()), tol);
  double residual = 0.0;
  for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
    const Index b = offsets[j];
    const Index w = offsets[j + 1] - b;
    if (w == 0) {
      cert.projections.push_back(ProjectionMatrix::zero(n));
      continue;
    }
    const MatrixC cols = cert.basis.matrix().middleCols(b, w);
    cert.projections.push_back(ProjectionMatrix::from_orthonormal_columns(cols, tol));
    const MatrixC dev = cols.adjoint() * a.matrix() * cols - MatrixC::Identity(w, w);
    residual = std::max(residual, dev.norm());
  }
  cert.residual = residual;
  cert.certified = residual <= 1e-8 * static_cast<double>(n) * scale;
  return cert;
}

PositiveCombination positive_combination(const HermitianMatrix& a, const Tolerance& tol) {
  const Index n = a.size();
  const EigResult eig = hermitian_eig(a, tol);
  require_psd(eig, "positive_combination", tol, a.matrix().norm(), n);

  const double lam_max = std::max(eig.values(n - 1), 0.0);
  const double cut = tol.rank_cutoff * std::max(lam_max, 1e-300);
  Index rank = 0;
  for (Index k = 0; k < n; ++k)
    if (eig.values(k) > cut) ++rank;

  PositiveCombination out;
  if (rank == 0) {
    out.residual = a.matrix().norm();
    return out;
  }

  // Descending eigenvalues lam_1 >= ... >= lam_r with nested top-eigenspace
  // projections Q_i; telescoping A = sum (lam_i - lam_{i+1}) Q_i. Zero
  // coefficients (ties) are dropped.
  const double drop = 1e-12 * std::max(1.0, lam_max);
  MatrixC sum = MatrixC::Zero(n, n);
  for (Index i = 1; i <= rank; ++i) {
    const double lam_i = eig.values(n - i);
    const double lam_next = (i < rank) ? eig.values(n - i - 1) : 0.0;
    const double coeff = lam_i - lam_next;
    if (coeff <= drop) continue;
    MatrixC cols(n, i);
    for (Index k = 0; k < i; ++k) cols.col(k) = eig.vectors.matrix().col(n - 1 - k);
    out.coefficients.push_back(coeff);
    out.projections.push_back(ProjectionMatrix::from_orthonormal_columns(cols, tol));
    sum += coeff * out.projections.back().matrix();
  }
  out.residual = (sum - a.matrix()).norm();
  return out;
}

long gp_bound(double norm, double inv_norm) {
  if (!std::isfinite(norm) || !std::isfinite(inv_norm))
    throw ValueError("gp_bound: non-finite argument");
  const double prod = norm * inv_norm;
  if (prod < 1.0 - 1e-12)
    throw DomainError("gp_bound: norm * inv_norm = " + std::to_string(prod) + " is below 1");
  return 12 + nudged_ceil(14.0 * std::max(prod - 1.0, 0.0)) + 1;
}

long mu_bound(double mu) {
  if (!std::isfinite(mu) || mu <= 0.0)
    throw DomainError("mu_bound: mu must be positive");
  return 15 + nudged_ceil(28.0 / mu);
}

QpmPair build_q_pm(const HermitianMatrix& b, const PartialIsometry& v, const Tolerance& tol) {
  const Index n = b.size();
  if (v.size() != n) throw ShapeError("build_q_pm: isometry size does not match matrix");

  const EigResult eig = hermitian_eig(b, tol);
  require_psd(eig, "build_q_pm", tol, b.matrix().norm(), n);
  const double bnorm = std::max(eig.values(n - 1), 0.0);  // operator norm of psd b
  if (bnorm <= tol.abs_tol) throw ValueError("build_q_pm: b must be nonzero");
  const double structural = tol.structural(1.0 + b.matrix().norm(), n) * 10.0;
  if (bnorm > 1.0 + structural)
    throw DomainError("build_q_pm: ||b|| = " + std::to_string(bnorm) + " exceeds 1");

  const ProjectionMatrix support = range_projection(b, tol);
  if ((v.initial().matrix() - support.matrix()).norm() > structural)
    throw StructureError("build_q_pm: V*V does not equal the support projection of b");
  const MatrixC eprime = v.final().matrix();
  if ((support.matrix() * eprime).norm() > structural)
    throw StructureError("build_q_pm: final projection V V* is not orthogonal to the support");

  const MatrixC beta = b.matrix() / bnorm;
  // Apply mu -> sqrt(mu (1 - mu)) to the spectrum of beta in the eigenbasis
  // of b itself, so the root commutes with beta to working precision. A fresh
  // factorization of beta - beta^2 would scatter sqrt(eps) noise in arbitrary
  // directions whenever ||b|| = 1 and ruin the idempotency of q_-/q_+.
  const double cut = tol.rank_cutoff * bnorm;
  VectorR gvals(n);
  for (Index k = 0; k < n; ++k) {
    const double mu = std::clamp(eig.values(k) / bnorm, 0.0, 1.0);
    gvals(k) = (eig.values(k) > cut) ? std::sqrt(mu * (1.0 - mu)) : 0.0;
  }
  const MatrixC g =
      eig.vectors.matrix() * gvals.asDiagonal() * eig.vectors.matrix().adjoint();
  const MatrixC vb = v.matrix() * beta * v.matrix().adjoint();  // (1/||b||) V b V*
  const MatrixC cross = g * v.matrix().adjoint() + v.matrix() * g;
  const MatrixC tail = eprime - vb;

  MatrixC qm = beta - cross + tail;
  MatrixC qp = beta + cross + tail;
  qm = 0.5 * (qm + qm.adjoint().eval());
  qp = 0.5 * (qp + qp.adjoint().eval());

  QpmPair out;
  out.q_minus = ProjectionMatrix(qm, tol);
  out.q_plus = ProjectionMatrix(qp, tol);
  const MatrixC rhs = (2.0 / bnorm) * b.matrix() + 2.0 * eprime - 2.0 * vb;
  out.identity_residual = (qm + qp - rhs).norm();
  return out;
}

TwoProjectionForm two_projection_form(const ProjectionMatrix& e, const ProjectionMatrix& f,
                                      const Tolerance& tol) {
  const Index n = e.size();
  if (f.size() != n) throw ShapeError("two_projection_form: projection sizes differ");
  const Index re = e.rank();
  const double cut = tol.rank_cutoff;  // spectrum of the compressions lies in [0, 1]

  const EigResult ee = hermitian_eig(e.hermitian(tol), tol);
  const MatrixC range_e = ee.vectors.matrix().rightCols(re);
  const MatrixC kernel_e = ee.vectors.matrix().leftCols(n - re);

  TwoProjectionForm form;
  MatrixC both(n, 0), e_only(n, 0), generic_u(n, 0), generic_w(n, 0);
  std::vector<double> mus;

  if (re > 0) {
    const MatrixC me = range_e.adjoint() * f.matrix() * range_e;
    const EigResult fe = hermitian_eig(HermitianMatrix(me, tol), tol);
    std::vector<Index> idx_both, idx_only, idx_gen;
    for (Index k = 0; k < re; ++k) {
      const double mu = fe.values(k);
      if (mu > 1.0 - cut) idx_both.push_back(k);
      else if (mu < cut) idx_only.push_back(k);
      else idx_gen.push_back(k);
    }
    auto lift = [&](const std::vector<Index>& idx) {
      MatrixC cols(n, static_cast<Index>(idx.size()));
      for (std::size_t t = 0; t < idx.size(); ++t)
        cols.col(static_cast<Index>(t)) = range_e * fe.vectors.matrix().col(idx[t]);
      return cols;
    };
    both = lift(idx_both);
    e_only = lift(idx_only);
    generic_u = lift(idx_gen);
    for (Index k : idx_gen) mus.push_back(fe.values(k));
  }

  const Index m = generic_u.cols();
  form.angles = VectorR(m);
  form.h = VectorR(m);
  form.k = VectorR(m);
  generic_w.resize(n, m);
  for (Index i = 0; i < m; ++i) {
    const double mu = std::clamp(mus[static_cast<std::size_t>(i)], 0.0, 1.0);
    const double c = std::sqrt(mu);
    const double s = std::sqrt(1.0 - mu);
    form.h(i) = c;
    form.k(i) = s;
    form.angles(i) = std::acos(std::min(c, 1.0));
    // w_i = (I - E) F u_i / (c s); F u_i = mu u_i + c s w_i since u_i is an
    // eigenvector of the compression of F to range(E).
    const VectorC u = generic_u.col(i);
    VectorC w = (f.matrix() * u - mu * u) / (c * s);
    const double nrm = w.norm();
    if (std::abs(nrm - 1.0) > 1e-6)
      throw StructureError("two_projection_form: generic partner vector lost normalization");
    generic_w.col(i) = w / nrm;
  }

  MatrixC f_only(n, 0), neither(n, 0);
  if (n - re > 0) {
    const MatrixC mo = kernel_e.adjoint() * f.matrix() * kernel_e;
    const EigResult fo = hermitian_eig(HermitianMatrix(mo, tol), tol);
    std::vector<Index> idx_f, idx_none;
    for (Index k = 0; k < n - re; ++k) {
      const double nu = fo.values(k);
      if (nu > 1.0 - cut) idx_f.push_back(k);
      else if (nu < cut) idx_none.push_back(k);
      // middle eigenvalues are the generic partners, already represented by w_i
    }
    auto lift = [&](const std::vector<Index>& idx) {
      MatrixC cols(n, static_cast<Index>(idx.size()));
      for (std::size_t t = 0; t < idx.size(); ++t)
        cols.col(static_cast<Index>(t)) = kernel_e * fo.vectors.matrix().col(idx[t]);
      return cols;
    };
    f_only = lift(idx_f);
    neither = lift(idx_none);
    // Guard against contamination from nearly-degenerate clusters: make the
    // intersection bases exactly orthogonal to the generic partners.
    if (m > 0) {
      if (f_only.cols() > 0) orthonormalize_against(f_only, generic_w, "two_projection_form");
      if (neither.cols() > 0) orthonormalize_against(neither, generic_w, "two_projection_form");
    }
  }

  form.dim_both = both.cols();
  form.dim_e_only = e_only.cols();
  form.dim_f_only = f_only.cols();
  form.dim_neither = neither.cols();
  form.generic_pairs = m;
  if (form.dim_both + form.dim_e_only + form.dim_f_only + form.dim_neither + 2 * m != n)
    throw StructureError(
        "two_projection_form: inconsistent subspace classification near the rank cutoff");

  MatrixC basis(n, n);
  Index col = 0;
  for (const MatrixC* part : {&both, &e_only, &f_only, &neither, &generic_u, &generic_w}) {
    basis.middleCols(col, part->cols()) = *part;
    col += part->cols();
  }
  form.basis = UnitaryMatrix(basis, tol);
  return form;
}

std::pair<MatrixC, MatrixC> two_projection_reconstruct(const TwoProjectionForm& form) {
  const Index n = form.basis.size();
  const Index a = form.dim_both;
  const Index b = form.dim_e_only;
  const Index c = form.dim_f_only;
  const Index d = form.dim_neither;
  const Index m = form.generic_pairs;
  const Index ou = a + b + c + d;
  const Index ow = ou + m;

  MatrixC eb = MatrixC::Zero(n, n);
  MatrixC fb = MatrixC::Zero(n, n);
  for (Index k = 0; k < a; ++k) {
    eb(k, k) = 1.0;
    fb(k, k) = 1.0;
  }
  for (Index k = 0; k < b; ++k) eb(a + k, a + k) = 1.0;
  for (Index k = 0; k < c; ++k) fb(a + b + k, a + b + k) = 1.0;
  for (Index i = 0; i < m; ++i) {
    const double h = form.h(i);
    const double s = form.k(i);
    eb(ou + i, ou + i) = 1.0;
    fb(ou + i, ou + i) = h * h;
    fb(ou + i, ow + i) = h * s;
    fb(ow + i, ou + i) = h * s;
    fb(ow + i, ow + i) = s * s;
  }
  const MatrixC u = form.basis.matrix();
  return {u * eb * u.adjoint(), u * fb * u.adjoint()};
}

HalvedProjections halve_two_projections(const ProjectionMatrix& e, const ProjectionMatrix& f,
                                        const Tolerance& tol) {
  const TwoProjectionForm form = two_projection_form(e, f, tol);
  const Index a = form.dim_both;
  const Index b = form.dim_e_only;
  const Index c = form.dim_f_only;
  const Index d = form.dim_neither;
  const Index m = form.generic_pairs;
  if (a % 2 != 0) throw ParityError("halve_two_projections: dim(E^F) is odd", "E^F");
  if (b % 2 != 0) throw ParityError("halve_two_projections: dim(E^F-perp) is odd", "E^F-perp");
  if (c % 2 != 0) throw ParityError("halve_two_projections: dim(E-perp^F) is odd", "E-perp^F");
  if (m % 2 != 0)
    throw ParityError("halve_two_projections: generic multiplicity is odd", "generic");

  const Index n = form.basis.size();
  const Index ou = a + b + c + d;
  const Index ow = ou + m;
  MatrixC e1 = MatrixC::Zero(n, n);
  MatrixC e2 = MatrixC::Zero(n, n);
  MatrixC f1 = MatrixC::Zero(n, n);
  MatrixC f2 = MatrixC::Zero(n, n);

  // Intersection parts: split each into lowest-index and highest-index
  // halves; the E and F halves cross inside E^F so that E_i F_i = 0.
  for (Index k = 0; k < a / 2; ++k) {
    e1(k, k) = 1.0;                      // P1
    f2(k, k) = 1.0;                      // P1
    e2(a / 2 + k, a / 2 + k) = 1.0;      // P2
    f1(a / 2 + k, a / 2 + k) = 1.0;      // P2
  }
  for (Index k = 0; k < b / 2; ++k) {
    e1(a + k, a + k) = 1.0;
    e2(a + b / 2 + k, a + b / 2 + k) = 1.0;
  }
  for (Index k = 0; k < c / 2; ++k) {
    f1(a + b + k, a + b + k) = 1.0;
    f2(a + b + c / 2 + k, a + b + c / 2 + k) = 1.0;
  }
  // Generic pairs: e0 selects the lowest-index half. E1 takes e0 on the
  // u-side; F2 takes the full 2x2 angle blocks over e0, F1 over the rest.
  for (Index i = 0; i < m; ++i) {
    const bool low = i < m / 2;
    const double h = form.h(i);
    const double s = form.k(i);
    MatrixC& ei = low ? e1 : e2;
    MatrixC& fi = low ? f2 : f1;
    ei(ou + i, ou + i) = 1.0;
    fi(ou + i, ou + i) = h * h;
    fi(ou + i, ow + i) = h * s;
    fi(ow + i, ou + i) = h * s;
    fi(ow + i, ow + i) = s * s;
  }

  const MatrixC u = form.basis.matrix();
  HalvedProjections out;
  out.e1 = ProjectionMatrix(MatrixC(u * e1 * u.adjoint()), tol);
  out.e2 = ProjectionMatrix(MatrixC(u * e2 * u.adjoint()), tol);
  out.f1 = ProjectionMatrix(MatrixC(u * f1 * u.adjoint()), tol);
  out.f2 = ProjectionMatrix(MatrixC(u * f2 * u.adjoint()), tol);
  return out;
}

}  // namespace pincert
