#include "pincert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pincert {

namespace {

double offdiag_norm(const MatrixC& a) {
  const Index n = a.rows();
  double s = 0.0;
  for (Index q = 0; q < n; ++q) {
    for (Index p = 0; p < n; ++p) {
      if (p != q) s += std::norm(a(p, q));
    }
  }
  return std::sqrt(s);
}

// Rotate the largest-magnitude entry of each column to the positive real axis
// so eigenvectors come out with a canonical phase.
void fix_column_phases(MatrixC& v) {
  const Index n = v.rows();
  for (Index k = 0; k < v.cols(); ++k) {
    Index best = 0;
    double best_mag = std::abs(v(0, k));
    for (Index i = 1; i < n; ++i) {
      const double mag = std::abs(v(i, k));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag > 0.0) {
      const Complex phase = v(best, k) / best_mag;
      v.col(k) *= std::conj(phase);
    }
  }
}

// Orthonormal basis of the range of a projection: its eigencolumns with
// eigenvalue above 1/2, in the solver's deterministic order.
MatrixC range_basis(const ProjectionMatrix& p, const Tolerance& tol, const char* who) {
  EigResult e = hermitian_eig(p.hermitian(tol), tol);
  std::vector<Index> keep;
  for (Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > 0.5) keep.push_back(k);
  }
  if (static_cast<Index>(keep.size()) != p.rank()) {
    throw StructureError(std::string(who) +
                         ": projection eigenvalues disagree with its recorded rank");
  }
  MatrixC basis(p.size(), static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    basis.col(static_cast<Index>(i)) = e.vectors.matrix().col(keep[i]);
  }
  return basis;
}

}  // namespace

EigResult hermitian_eig(const HermitianMatrix& x, const Tolerance&) {
  MatrixC a = x.matrix();
  const Index n = a.rows();
  MatrixC v = MatrixC::Identity(n, n);
  const double scale = a.norm();

  if (n > 1 && scale > 0.0) {
    const double stop = 1e-14 * scale;
    const double skip = 0.1 * stop / static_cast<double>(n);
    for (int sweep = 0; sweep < 30; ++sweep) {
      if (offdiag_norm(a) <= stop) break;
      for (Index p = 0; p < n - 1; ++p) {
        for (Index q = p + 1; q < n; ++q) {
          const double apq = std::abs(a(p, q));
          if (apq <= skip) continue;
          // Phase-align: with D = diag(..., d at q), (D* A D)(p,q) = |a(p,q)|.
          const Complex d = std::conj(a(p, q)) / apq;
          const double app = a(p, p).real();
          const double aqq = a(q, q).real();
          const double tau = (aqq - app) / (2.0 * apq);
          const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                        : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          // Combined rotation R = D * J, J the real Jacobi rotation zeroing
          // the aligned (p,q) pivot: R e_p = c e_p - s d e_q, R e_q = s e_p + c d e_q.
          const Complex sd = s * d;
          const Complex cd = c * d;
          const VectorC colp = a.col(p);
          const VectorC colq = a.col(q);
          a.col(p) = c * colp - sd * colq;
          a.col(q) = s * colp + cd * colq;
          const Eigen::RowVectorXcd rowp = a.row(p);
          const Eigen::RowVectorXcd rowq = a.row(q);
          a.row(p) = c * rowp - std::conj(sd) * rowq;
          a.row(q) = s * rowp + std::conj(cd) * rowq;
          a(p, q) = Complex(0, 0);
          a(q, p) = Complex(0, 0);
          a(p, p) = Complex(a(p, p).real(), 0);
          a(q, q) = Complex(a(q, q).real(), 0);
          const VectorC vp = v.col(p);
          const VectorC vq = v.col(q);
          v.col(p) = c * vp - sd * vq;
          v.col(q) = s * vp + cd * vq;
        }
      }
    }
  }

  // Ascending eigenvalues; stable sort keeps pre-sort column order on ties.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&a](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });

  EigResult out;
  out.values.resize(n);
  MatrixC sorted(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    sorted.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  fix_column_phases(sorted);
  out.vectors = UnitaryMatrix(std::move(sorted));
  return out;
}

UnitaryEigResult unitary_eig(const UnitaryMatrix& u, const Tolerance& tol) {
  const MatrixC& m = u.matrix();
  const Index n = m.rows();
  const MatrixC re = 0.5 * (m + m.adjoint());
  const MatrixC im = (m - m.adjoint()) / Complex(0.0, 2.0);

  EigResult stage1 = hermitian_eig(HermitianMatrix(re, tol), tol);
  MatrixC v = stage1.vectors.matrix();

  // Re U and Im U commute, so each eigenvalue cluster of Re U is invariant
  // under Im U; diagonalizing the compressed Im U splits the cluster.
  const double gap = 1e-5 * std::max(1.0, stage1.values.cwiseAbs().maxCoeff());
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && stage1.values[end] - stage1.values[end - 1] <= gap) ++end;
    const Index width = end - start;
    if (width > 1) {
      const MatrixC vc = v.middleCols(start, width);
      const MatrixC compressed = vc.adjoint() * im * vc;
      EigResult stage2 = hermitian_eig(HermitianMatrix(compressed, tol), tol);
      v.middleCols(start, width) = vc * stage2.vectors.matrix();
    }
    start = end;
  }

  UnitaryEigResult out;
  out.values.resize(n);
  const MatrixC uv = m * v;
  for (Index k = 0; k < n; ++k) {
    out.values[k] = v.col(k).dot(uv.col(k));  // Rayleigh quotient v_k^* U v_k
  }
  out.vectors = UnitaryMatrix(std::move(v), tol);
  return out;
}

HermitianMatrix sqrt_psd(const HermitianMatrix& a, const Tolerance& tol) {
  EigResult e = hermitian_eig(a, tol);
  const Index n = a.size();
  const double floor_tol = tol.structural(a.matrix().norm(), n);
  if (e.values[0] < -floor_tol) {
    throw NotPSDError("sqrt_psd: smallest eigenvalue " + std::to_string(e.values[0]) +
                          " is negative beyond tolerance",
                      e.values[0]);
  }
  const VectorR roots = e.values.cwiseMax(0.0).cwiseSqrt();
  const MatrixC& v = e.vectors.matrix();
  MatrixC s = v * roots.asDiagonal() * v.adjoint();
  s = 0.5 * (s + s.adjoint().eval());
  return HermitianMatrix(std::move(s), tol);
}

PolarResult polar(const MatrixC& m, const Tolerance& tol) {
  require_square_nonempty(m, "polar");
  const Index n = m.rows();
  EigResult e = hermitian_eig(HermitianMatrix(MatrixC(m.adjoint() * m), tol), tol);
  const VectorR sigma = e.values.cwiseMax(0.0).cwiseSqrt();
  const MatrixC& w = e.vectors.matrix();
  const double cut = tol.rank_cutoff * sigma[n - 1];

  // Left vectors for the supported directions, largest singular value first so
  // the best-conditioned columns anchor the re-orthogonalization.
  MatrixC uleft = MatrixC::Zero(n, n);
  std::vector<Index> accepted;
  std::vector<bool> filled(static_cast<std::size_t>(n), false);
  for (Index k = n - 1; k >= 0; --k) {
    if (sigma[k] <= cut || sigma[k] <= 0.0) continue;
    VectorC uk = m * w.col(k) / sigma[k];
    for (Index j : accepted) uk -= uleft.col(j).dot(uk) * uleft.col(j);
    const double nrm = uk.norm();
    if (nrm <= 0.5) continue;  // defensive: fell into the span, treat as rank-deficient
    uleft.col(k) = uk / nrm;
    filled[static_cast<std::size_t>(k)] = true;
    accepted.push_back(k);
  }
  // Deterministic completion: Gram-Schmidt over standard basis vectors in
  // index order, filling the remaining slots in ascending slot order.
  for (Index k = 0; k < n; ++k) {
    if (filled[static_cast<std::size_t>(k)]) continue;
    for (Index cand = 0; cand < n; ++cand) {
      VectorC uk = VectorC::Zero(n);
      uk[cand] = Complex(1, 0);
      for (Index j : accepted) uk -= uleft.col(j).dot(uk) * uleft.col(j);
      const double nrm = uk.norm();
      if (nrm > 0.1) {
        uleft.col(k) = uk / nrm;
        filled[static_cast<std::size_t>(k)] = true;
        accepted.push_back(k);
        break;
      }
    }
    if (!filled[static_cast<std::size_t>(k)]) {
      throw StructureError("polar: failed to complete the unitary factor");
    }
  }

  MatrixC p = w * sigma.asDiagonal() * w.adjoint();
  p = 0.5 * (p + p.adjoint().eval());
  PolarResult out;
  out.unitary = UnitaryMatrix(MatrixC(uleft * w.adjoint()), tol);
  out.positive = HermitianMatrix(std::move(p), tol);
  return out;
}

bool Interval::contains(double x, double snap) const {
  if (hi < lo || (hi == lo && !(lo_closed && hi_closed))) return false;
  if (std::isfinite(lo) && std::abs(x - lo) <= snap) return lo_closed;
  if (std::isfinite(hi) && std::abs(x - hi) <= snap) return hi_closed;
  return x > lo && x < hi;
}

ProjectionMatrix spectral_projection(const HermitianMatrix& a, const Interval& j,
                                     const Tolerance& tol) {
  EigResult e = hermitian_eig(a, tol);
  const Index n = a.size();
  const double snap = tol.rank_cutoff * e.values.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index k = 0; k < n; ++k) {
    if (j.contains(e.values[k], snap)) keep.push_back(k);
  }
  if (keep.empty()) return ProjectionMatrix::zero(n);
  MatrixC cols(n, static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    cols.col(static_cast<Index>(i)) = e.vectors.matrix().col(keep[i]);
  }
  return ProjectionMatrix::from_orthonormal_columns(cols, tol);
}

ProjectionMatrix range_projection(const HermitianMatrix& a, const Tolerance& tol) {
  EigResult e = hermitian_eig(a, tol);
  const Index n = a.size();
  const double floor_tol = tol.structural(a.matrix().norm(), n);
  if (e.values[0] < -floor_tol) {
    throw NotPSDError("range_projection: input is not psd within tolerance", e.values[0]);
  }
  const double cut = tol.rank_cutoff * std::max(e.values[n - 1], 0.0);
  std::vector<Index> keep;
  for (Index k = 0; k < n; ++k) {
    if (e.values[k] > cut) keep.push_back(k);
  }
  if (keep.empty()) return ProjectionMatrix::zero(n);
  MatrixC cols(n, static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    cols.col(static_cast<Index>(i)) = e.vectors.matrix().col(keep[i]);
  }
  return ProjectionMatrix::from_orthonormal_columns(cols, tol);
}

PartialIsometry partial_isometry(const ProjectionMatrix& p, const ProjectionMatrix& q,
                                 const Tolerance& tol) {
  if (p.size() != q.size()) {
    throw ShapeError("partial_isometry: projections live in different dimensions");
  }
  if (p.rank() > q.rank()) {
    throw RankError("partial_isometry: rank(P) = " + std::to_string(p.rank()) +
                    " exceeds rank(Q) = " + std::to_string(q.rank()));
  }
  const Index n = p.size();
  if (p.rank() == 0) return PartialIsometry(MatrixC::Zero(n, n), tol);
  const MatrixC pb = range_basis(p, tol, "partial_isometry");
  const MatrixC qb = range_basis(q, tol, "partial_isometry");
  MatrixC v = MatrixC::Zero(n, n);
  for (Index k = 0; k < p.rank(); ++k) {
    v += qb.col(k) * pb.col(k).adjoint();
  }
  PartialIsometry out(v, tol);
  const double dev = (out.initial().matrix() - p.matrix()).norm();
  if (dev > tol.structural(std::max(1.0, p.matrix().norm()), n)) {
    throw StructureError("partial_isometry: V*V failed to reproduce P, deviation " +
                         std::to_string(dev));
  }
  return out;
}

}  // namespace pincert
