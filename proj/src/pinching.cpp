#include "pincert/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace pincert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle of a unit-circle value mapped into [0, 2 pi).
double principal_angle(Complex lambda) {
  double theta = std::atan2(lambda.imag(), lambda.real());
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return theta;
}

// max_j ||E_j X E_j - t E_j||_F where E_j spans columns [offsets[j], offsets[j+1])
// of `basis`; equivalent to the in-block deviation of basis* X basis from t I.
double grouped_residual(const MatrixC& x, const MatrixC& basis, const std::vector<Index>& offsets,
                        double t) {
  const MatrixC y = basis.adjoint() * x * basis;
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
    const Index b = offsets[j];
    const Index w = offsets[j + 1] - b;
    if (w == 0) continue;
    MatrixC block = y.block(b, b, w, w);
    block.diagonal().array() -= t;
    worst = std::max(worst, block.norm());
  }
  return worst;
}

}  // namespace

MatrixC unitary_power(const MatrixC& u, long k) {
  if (k < 0) throw DomainError("unitary_power: negative exponent");
  MatrixC acc = MatrixC::Identity(u.rows(), u.cols());
  MatrixC sq = u;
  long e = k;
  while (e > 0) {
    if (e & 1) acc = acc * sq;
    e >>= 1;
    if (e > 0) sq = sq * sq;
  }
  return acc;
}

ConstantDiagonalResult constant_diagonal_unitary(const HermitianMatrix& x, const Tolerance& tol) {
  const Index n = x.size();
  const double t = x.trace_mean();
  const double scale = 1.0 + x.matrix().norm();

  MatrixC y = x.matrix();
  MatrixC u = MatrixC::Identity(n, n);
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);

  // Entries already at the target within this slack are left untouched; the
  // final residual is recomputed honestly below.
  const double settle = 1e-11 * scale;
  int rotations = 0;

  for (Index step = 0; step + 1 < n; ++step) {
    Index imin = -1, imax = -1;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    double spread = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (fixed[static_cast<std::size_t>(k)]) continue;
      const double v = y(k, k).real();
      if (v < vmin) { vmin = v; imin = k; }
      if (v > vmax) { vmax = v; imax = k; }
      spread = std::max(spread, std::abs(v - t));
    }
    if (spread <= settle) break;  // every unfixed entry is already at target

    // The unfixed diagonal averages to t, so vmin <= t <= vmax with
    // vmin < vmax; pivot on the extremes, fixing the min index at t.
    const Index i = imin;
    const Index j = imax;
    if (i == j) break;  // single unfixed entry; cannot rotate (spread ~ 0 anyway)

    const double a = y(i, i).real();
    const double dd = y(j, j).real();
    const Complex yij = y(i, j);
    const double b = std::abs(yij);
    // Phase that makes the rotation's cross term real positive: d * y_ij = |y_ij|.
    const Complex d = (b > 0.0) ? std::conj(yij) / b : Complex(1.0, 0.0);

    // New (i,i) entry of R* Y R with R e_i = c e_i + s conj(d) ... solved for
    // tan(theta): c^2 a + s^2 dd + 2 c s b = t. Stable root of the quadratic
    // (dd - t) x^2 + 2 b x + (a - t) = 0 in x = tan(theta):
    const double rad = b * b + (dd - t) * std::max(t - a, 0.0);
    const double den = b + std::sqrt(std::max(rad, 0.0));
    double c, s;
    if (den <= settle) {
      // b ~ 0 and (dd - t)(t - a) ~ 0. With spread > settle the only live
      // case is a ~ t already (then dd > t picks up the slack later).
      if (std::abs(a - t) <= 10 * settle) {
        fixed[static_cast<std::size_t>(i)] = true;
        continue;
      }
      c = 0.0;
      s = 1.0;  // swap the two entries
    } else {
      const double tanth = (t - a) / den;
      c = 1.0 / std::sqrt(1.0 + tanth * tanth);
      s = tanth * c;
    }

    // R: col_i -> c e_i + s d e_j, col_j -> -s e_i + c d e_j (unitary).
    const VectorC coli = y.col(i);
    const VectorC colj = y.col(j);
    y.col(i) = c * coli + (s * d) * colj;
    y.col(j) = (-s) * coli + (c * d) * colj;
    const MatrixC rowi = y.row(i);
    const MatrixC rowj = y.row(j);
    y.row(i) = c * rowi + (s * std::conj(d)) * rowj;
    y.row(j) = (-s) * rowi + (c * std::conj(d)) * rowj;
    y(i, i) = Complex(t, 0.0);  // exact by construction of the rotation
    y(j, j) = Complex(y(j, j).real(), 0.0);

    const VectorC ucoli = u.col(i);
    const VectorC ucolj = u.col(j);
    u.col(i) = c * ucoli + (s * d) * ucolj;
    u.col(j) = (-s) * ucoli + (c * d) * ucolj;

    fixed[static_cast<std::size_t>(i)] = true;
    ++rotations;
  }

  ConstantDiagonalResult out;
  out.basis = UnitaryMatrix(u, tol);
  out.rotations = rotations;

  // Honest residual: recompute the conjugation from scratch.
  const MatrixC z = out.basis.matrix().adjoint() * x.matrix() * out.basis.matrix();
  double residual = 0.0;
  for (Index k = 0; k < n; ++k) residual = std::max(residual, std::abs(z(k, k) - Complex(t, 0.0)));

  PinchingCertificate cert;
  cert.target = t;
  cert.residual = residual;
  cert.certified = residual <= 1e-10 * scale;
  cert.basis = out.basis;
  cert.projections.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k)
    cert.projections.push_back(ProjectionMatrix::from_unit_vector(out.basis.matrix().col(k), tol));
  out.certificate = std::move(cert);
  return out;
}

UnitaryMatrix schur_horn_diagonal(const HermitianMatrix& x, const VectorR& target_diag,
                                  const Tolerance& tol) {
  const Index n = x.size();
  if (target_diag.size() != n)
    throw ShapeError("schur_horn_diagonal: target diagonal length does not match matrix size");
  for (Index k = 0; k < n; ++k)
    if (!std::isfinite(target_diag(k)))
      throw ValueError("schur_horn_diagonal: target diagonal has a non-finite entry");

  const EigResult eig = hermitian_eig(x, tol);
  const double scale = 1.0 + x.matrix().norm();
  const double slack = 1e-9 * static_cast<double>(n) * scale;

  // Majorization check on descending prefix sums.
  std::vector<double> lam(eig.values.data(), eig.values.data() + n);
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  std::vector<double> tgt(target_diag.data(), target_diag.data() + n);
  std::sort(tgt.begin(), tgt.end(), std::greater<double>());
  double pl = 0.0, pt = 0.0;
  for (Index k = 0; k < n; ++k) {
    pl += lam[static_cast<std::size_t>(k)];
    pt += tgt[static_cast<std::size_t>(k)];
    if (k + 1 < n) {
      if (pt > pl + slack) throw InfeasibleError("schur_horn_diagonal: prefix sum exceeds spectrum", k + 1);
    } else {
      if (std::abs(pt - pl) > slack)
        throw InfeasibleError("schur_horn_diagonal: trace mismatch with spectrum", n);
    }
  }

  // Deterministic rank of each caller entry under a stable descending sort.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return target_diag(a) > target_diag(b);
  });
  std::vector<Index> rank_of(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) rank_of[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;

  // Work in the eigenbasis: y starts diagonal; each step places the largest
  // remaining target exactly on one diagonal slot by a real rotation against
  // a bracketing partner, then retires that slot. Off-diagonal fill only ever
  // touches retired rows/columns, so active pivots stay on a real diagonal.
  MatrixC y = MatrixC::Zero(n, n);
  for (Index k = 0; k < n; ++k) y(k, k) = Complex(eig.values(k), 0.0);
  MatrixC q = MatrixC::Identity(n, n);
  std::vector<Index> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), Index{0});
  std::vector<Index> slot_of_rank(static_cast<std::size_t>(n), Index{-1});

  for (Index r = 0; r < n; ++r) {
    const double dv = tgt[static_cast<std::size_t>(r)];
    // Active slots in descending diagonal value (ties to lower matrix index).
    std::stable_sort(active.begin(), active.end(), [&](Index p, Index w) {
      return y(p, p).real() > y(w, w).real();
    });
    const std::size_t m = active.size();
    std::size_t hi = m;  // last position with value >= dv
    for (std::size_t p = 0; p < m; ++p)
      if (y(active[p], active[p]).real() >= dv) hi = p;
    if (hi == m) hi = 0;  // dv above the maximum by rounding slop: clamp at the top

    std::size_t lo;
    if (hi + 1 < m) {
      lo = hi + 1;
    } else if (m == 1) {
      // Last slot: must already match dv within the majorization slack.
      slot_of_rank[static_cast<std::size_t>(r)] = active[0];
      active.clear();
      continue;
    } else {
      lo = hi;
      hi = lo - 1;
    }

    const Index ih = active[hi];
    const Index il = active[lo];
    const double vh = y(ih, ih).real();
    const double vl = y(il, il).real();
    double s2 = (vh > vl) ? (vh - dv) / (vh - vl) : 0.0;
    s2 = std::clamp(s2, 0.0, 1.0);
    // Snap near-identity and near-swap rotations exact. A pivot already at
    // its target up to rounding would otherwise get a sqrt(eps)-sized angle,
    // smearing sqrt(eps) mass into rows that later retire at zero.
    const double snap = 1e-12 * scale;
    if (vh - dv <= snap) {
      s2 = 0.0;
    } else if (dv - vl <= snap) {
      s2 = 1.0;
    }
    const double s = std::sqrt(s2);
    const double c = std::sqrt(1.0 - s2);

    if (s2 > 0.0) {
      // Real rotation on (ih, il): new (ih,ih) = c^2 vh + s^2 vl = dv.
      const VectorC colh = y.col(ih);
      const VectorC coll = y.col(il);
      y.col(ih) = c * colh + s * coll;
      y.col(il) = (-s) * colh + c * coll;
      const MatrixC rowh = y.row(ih);
      const MatrixC rowl = y.row(il);
      y.row(ih) = c * rowh + s * rowl;
      y.row(il) = (-s) * rowh + c * rowl;
      y(ih, ih) = Complex(c * c * vh + s2 * vl, 0.0);
      y(il, il) = Complex(s2 * vh + c * c * vl, 0.0);

      const VectorC qh = q.col(ih);
      const VectorC ql = q.col(il);
      q.col(ih) = c * qh + s * ql;
      q.col(il) = (-s) * qh + c * ql;
    }

    slot_of_rank[static_cast<std::size_t>(r)] = ih;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(hi));
  }

  // Permute so output position p carries target_diag(p).
  MatrixC perm = MatrixC::Zero(n, n);
  for (Index p = 0; p < n; ++p)
    perm(slot_of_rank[static_cast<std::size_t>(rank_of[static_cast<std::size_t>(p)])], p) =
        Complex(1.0, 0.0);

  UnitaryMatrix u(eig.vectors.matrix() * q * perm, tol);

  const MatrixC z = u.matrix().adjoint() * x.matrix() * u.matrix();
  double dev = 0.0;
  for (Index p = 0; p < n; ++p) dev = std::max(dev, std::abs(z(p, p) - Complex(target_diag(p), 0.0)));
  if (dev > 1e-9 * scale * static_cast<double>(n))
    throw StructureError("schur_horn_diagonal: placed diagonal failed its own tolerance");
  return u;
}

AveragingUnitary dixmier_unitary_from_pinching(const HermitianMatrix& x,
                                               const PinchingCertificate& cert,
                                               const Tolerance& tol) {
  const Index n = x.size();
  if (cert.projections.empty())
    throw CertificateError("dixmier_unitary_from_pinching: empty projection family");
  for (const ProjectionMatrix& e : cert.projections)
    if (e.size() != n)
      throw CertificateError("dixmier_unitary_from_pinching: projection size does not match matrix");
  const double t = x.trace_mean();
  if (std::abs(cert.target - t) > tol.structural(1.0 + std::abs(t), n) * 10.0 + 1e-9) {
    std::ostringstream os;
    os << "dixmier_unitary_from_pinching: certificate target " << cert.target
       << " does not match trace mean " << t;
    throw CertificateError(os.str());
  }

  const int order = static_cast<int>(cert.projections.size());
  MatrixC w = MatrixC::Zero(n, n);
  for (int k = 1; k <= order; ++k) {
    const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(order);
    w += std::polar(1.0, ang) * cert.projections[static_cast<std::size_t>(k - 1)].matrix();
  }

  AveragingUnitary out;
  try {
    out.w = UnitaryMatrix(w, tol);
  } catch (const StructureError&) {
    throw CertificateError(
        "dixmier_unitary_from_pinching: projections are not an orthogonal decomposition of the "
        "identity");
  }
  out.order = order;
  out.target = t;
  out.power_residual =
      (unitary_power(out.w.matrix(), order) - MatrixC::Identity(n, n)).norm();

  MatrixC z = x.matrix();
  MatrixC sum = z;
  for (int j = 1; j < order; ++j) {
    z = out.w.matrix().adjoint() * z * out.w.matrix();
    sum += z;
  }
  sum /= static_cast<double>(order);
  sum.diagonal().array() -= Complex(t, 0.0);
  out.averaging_residual = sum.norm();
  return out;
}

PinchingCertificate pinching_from_averaging_unitary(const HermitianMatrix& x,
                                                    const UnitaryMatrix& u, int order,
                                                    const Tolerance& tol) {
  const Index n = x.size();
  if (u.size() != n)
    throw ShapeError("pinching_from_averaging_unitary: unitary size does not match matrix");
  if (order < 1) throw DomainError("pinching_from_averaging_unitary: order must be at least 1");
  const double t = x.trace_mean();
  const double scale = 1.0 + x.matrix().norm();
  const double bound = 1e-8 * static_cast<double>(n) * scale;

  // Averaging precondition: (1/N) sum_{j<N} U^-j X U^j = tau(X) I.
  MatrixC z = x.matrix();
  MatrixC sum = z;
  for (int j = 1; j < order; ++j) {
    z = u.matrix().adjoint() * z * u.matrix();
    sum += z;
  }
  sum /= static_cast<double>(order);
  MatrixC dev = sum;
  dev.diagonal().array() -= Complex(t, 0.0);
  const double pre_residual = dev.norm();
  if (pre_residual > bound) {
    std::ostringstream os;
    os << "pinching_from_averaging_unitary: averaging residual " << pre_residual
       << " exceeds bound " << bound;
    throw NotAveragingError(os.str());
  }

  // W = f(U^N)^{-1} U with the root map f(e^{i theta}) = e^{i theta / N},
  // theta in [0, 2 pi). Eigenvalues of U^N within a hair of 1 sit on the
  // branch cut; snap their angle to 0 so roundoff cannot split a cluster
  // across the cut.
  PinchingCertificate cert;
  cert.target = t;
  MatrixC wmat;
  if (order == 1) {
    // The root map is the identity for N = 1, so W = U^{-1} U = I.
    wmat = MatrixC::Identity(n, n);
  } else {
    const MatrixC upow = unitary_power(u.matrix(), order);
    const UnitaryEigResult pe = unitary_eig(UnitaryMatrix(upow, tol), tol);
    VectorC roots(n);
    constexpr double kBranchSnap = 1e-6;
    for (Index k = 0; k < n; ++k) {
      double theta = principal_angle(pe.values(k));
      if (theta <= kBranchSnap || theta >= kTwoPi - kBranchSnap) theta = 0.0;
      roots(k) = std::polar(1.0, -theta / static_cast<double>(order));
    }
    const MatrixC finv =
        pe.vectors.matrix() * roots.asDiagonal() * pe.vectors.matrix().adjoint();
    wmat = finv * u.matrix();
  }

  const UnitaryMatrix w(wmat, tol);
  const UnitaryEigResult we = unitary_eig(w, tol);

  // Assign each eigenvalue of W to its nearest N-th root of unity.
  const double branch_tol = std::min(0.1, std::numbers::pi / (2.0 * static_cast<double>(order)));
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(order));
  for (Index k = 0; k < n; ++k) {
    const double phi = principal_angle(we.values(k));
    long root = std::lround(phi * static_cast<double>(order) / kTwoPi);
    double dist = std::abs(phi - kTwoPi * static_cast<double>(root) / static_cast<double>(order));
    root %= order;
    if (root < 0) root += order;
    if (dist >= branch_tol) {
      std::ostringstream os;
      os << "pinching_from_averaging_unitary: eigenvalue angle " << phi << " is " << dist
         << " away from the nearest root of unity (tolerance " << branch_tol << ")";
      throw BranchError(os.str());
    }
    groups[static_cast<std::size_t>(root)].push_back(k);
  }

  MatrixC basis(n, n);
  std::vector<Index> offsets{0};
  Index col = 0;
  for (const std::vector<Index>& g : groups) {
    if (g.empty()) continue;
    MatrixC cols(n, static_cast<Index>(g.size()));
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      cols.col(static_cast<Index>(idx)) = we.vectors.matrix().col(g[idx]);
    cert.projections.push_back(ProjectionMatrix::from_orthonormal_columns(cols, tol));
    basis.middleCols(col, cols.cols()) = cols;
    col += cols.cols();
    offsets.push_back(col);
  }
  cert.basis = UnitaryMatrix(basis, tol);
  cert.residual = grouped_residual(x.matrix(), basis, offsets, t);
  cert.certified = cert.residual <= bound;
  return cert;
}

namespace {

// Exact minimizer of  h(v) = l . v + 2 (k . v)^2  over the unit sphere in R^3,
// restricted (without loss) to span{l, k}. Returns the optimal v.
Eigen::Vector3d minimize_sphere_quadratic(const Eigen::Vector3d& l, const Eigen::Vector3d& k) {
  const double ln = l.norm();
  const double kn = k.norm();
  if (ln < 1e-300 && kn < 1e-300) return Eigen::Vector3d(1.0, 0.0, 0.0);

  if (ln < 1e-300) {
    // Minimum 0 along any direction orthogonal to k: pick deterministically.
    Eigen::Vector3d e = Eigen::Vector3d::UnitX();
    if (std::abs(k.normalized().x()) > 0.9) e = Eigen::Vector3d::UnitY();
    Eigen::Vector3d v = e - (k.normalized().dot(e)) * k.normalized();
    return v.normalized();
  }

  const Eigen::Vector3d b1 = l / ln;
  Eigen::Vector3d kperp = k - k.dot(b1) * b1;
  const double k2 = kperp.norm();
  const double k1 = k.dot(b1);

  if (k2 < 1e-14 * std::max(1.0, kn)) {
    // One-dimensional: v = +-b1.
    const double hplus = ln + 2.0 * k1 * k1;
    const double hminus = -ln + 2.0 * k1 * k1;
    return (hminus <= hplus) ? Eigen::Vector3d(-b1) : Eigen::Vector3d(b1);
  }
  const Eigen::Vector3d b2 = kperp / k2;

  // Minimize zeta(psi) = ln cos(psi) + 2 (k1 cos(psi) + k2 sin(psi))^2 by a
  // coarse scan plus golden-section refinement (deterministic).
  auto zeta = [&](double psi) {
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    const double g = k1 * cp + k2 * sp;
    return ln * cp + 2.0 * g * g;
  };
  constexpr int kGrid = 96;
  double best_psi = 0.0;
  double best_val = zeta(0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double psi = kTwoPi * static_cast<double>(i) / kGrid;
    const double val = zeta(psi);
    if (val < best_val) {
      best_val = val;
      best_psi = psi;
    }
  }
  const double h = kTwoPi / kGrid;
  double a = best_psi - h;
  double b = best_psi + h;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a);
  double c2 = a + gr * (b - a);
  double f1 = zeta(c1);
  double f2 = zeta(c2);
  for (int it = 0; it < 90; ++it) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = zeta(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = zeta(c2);
    }
  }
  const double psi = 0.5 * (a + b);
  return std::cos(psi) * b1 + std::sin(psi) * b2;
}

}  // namespace

PinchingCertificate optimize_block_pinching(const HermitianMatrix& x,
                                            const std::vector<Index>& ranks, int max_sweeps,
                                            double residual_tol, std::uint64_t seed,
                                            const Tolerance& tol) {
  const Index n = x.size();
  if (ranks.empty()) throw ShapeError("optimize_block_pinching: empty rank list");
  Index total = 0;
  for (Index r : ranks) {
    if (r <= 0) throw ValueError("optimize_block_pinching: ranks must be positive");
    total += r;
  }
  if (total != n) throw ShapeError("optimize_block_pinching: ranks must sum to the matrix size");
  if (max_sweeps < 0) throw DomainError("optimize_block_pinching: negative sweep count");
  if (!(residual_tol > 0.0) || !std::isfinite(residual_tol))
    throw ValueError("optimize_block_pinching: residual tolerance must be positive");

  const double t = x.trace_mean();
  std::vector<Index> blk(static_cast<std::size_t>(n));
  std::vector<Index> offsets{0};
  {
    Index pos = 0;
    for (std::size_t j = 0; j < ranks.size(); ++j) {
      for (Index r = 0; r < ranks[j]; ++r) blk[static_cast<std::size_t>(pos + r)] = static_cast<Index>(j);
      pos += ranks[j];
      offsets.push_back(pos);
    }
  }

  // Starting point.
  MatrixC u;
  if (seed == 0) {
    u = constant_diagonal_unitary(x, tol).basis.matrix();
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixC g(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) g(r, c) = Complex(gauss(rng), gauss(rng));
    u = polar(g, tol).unitary.matrix();
  }
  MatrixC y = u.adjoint() * x.matrix() * u;

  // In-block squared deviation of y from t I.
  auto objective = [&]() {
    double total_obj = 0.0;
    for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
      const Index b = offsets[j];
      const Index w = offsets[j + 1] - b;
      MatrixC block = y.block(b, b, w, w);
      block.diagonal().array() -= t;
      total_obj += block.squaredNorm();
    }
    return total_obj;
  };

  if (ranks.size() > 1) {
    double obj = objective();
    const double stop_gain = std::max(1e-30, 1e-6 * residual_tol * residual_tol);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          const Index ba = blk[static_cast<std::size_t>(i)];
          const Index bb = blk[static_cast<std::size_t>(j)];
          if (ba == bb) continue;  // same-block rotations leave the objective invariant

          // Local data of the plane (i, j) against blocks a = block(i), b = block(j).
          double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
          Complex alpha(0.0, 0.0), beta(0.0, 0.0);
          for (Index q = offsets[static_cast<std::size_t>(ba)];
               q < offsets[static_cast<std::size_t>(ba) + 1]; ++q) {
            if (q == i) continue;
            const Complex zi = y(q, i);
            const Complex zj = y(q, j);
            a1 += std::norm(zi);
            a2 += std::norm(zj);
            alpha += std::conj(zi) * zj;
          }
          for (Index q = offsets[static_cast<std::size_t>(bb)];
               q < offsets[static_cast<std::size_t>(bb) + 1]; ++q) {
            if (q == j) continue;
            const Complex zi = y(q, i);
            const Complex zj = y(q, j);
            b1 += std::norm(zi);
            b2 += std::norm(zj);
            beta += std::conj(zi) * zj;
          }
          const double a0 = y(i, i).real() - t;
          const double d0 = y(j, j).real() - t;
          const Complex g0 = y(i, j);
          const Complex gamma = alpha - beta;

          const Eigen::Vector3d lvec(((a1 + b2) - (a2 + b1)) / 2.0, gamma.real(), -gamma.imag());
          const Eigen::Vector3d kvec((a0 - d0) / 2.0, g0.real(), -g0.imag());
          const auto h = [&](const Eigen::Vector3d& v) {
            const double kv = kvec.dot(v);
            return lvec.dot(v) + 2.0 * kv * kv;
          };
          const Eigen::Vector3d v0(1.0, 0.0, 0.0);  // identity rotation
          const Eigen::Vector3d vstar = minimize_sphere_quadratic(lvec, kvec);
          if (h(v0) - h(vstar) <= 1e-30) continue;

          // v = (cos 2 theta, sin 2 theta cos phi, sin 2 theta sin phi).
          const double sv = std::hypot(vstar.y(), vstar.z());
          const double theta = 0.5 * std::atan2(sv, vstar.x());
          const double phi = (sv > 0.0) ? std::atan2(vstar.z(), vstar.y()) : 0.0;
          const double c = std::cos(theta);
          const double s = std::sin(theta);
          const Complex eip = std::polar(1.0, phi);

          // R: col_i -> c e_i + s e^{i phi} e_j, col_j -> -s e^{-i phi} e_i + c e_j.
          const VectorC coli = y.col(i);
          const VectorC colj = y.col(j);
          y.col(i) = c * coli + (s * eip) * colj;
          y.col(j) = (-s * std::conj(eip)) * coli + c * colj;
          const MatrixC rowi = y.row(i);
          const MatrixC rowj = y.row(j);
          y.row(i) = c * rowi + (s * std::conj(eip)) * rowj;
          y.row(j) = (-s * eip) * rowi + c * rowj;
          y(i, i) = Complex(y(i, i).real(), 0.0);
          y(j, j) = Complex(y(j, j).real(), 0.0);

          const VectorC ucoli = u.col(i);
          const VectorC ucolj = u.col(j);
          u.col(i) = c * ucoli + (s * eip) * ucolj;
          u.col(j) = (-s * std::conj(eip)) * ucoli + c * ucolj;
        }
      }
      const double next = objective();
      const double gain = obj - next;
      obj = next;
      if (gain <= stop_gain) break;
    }
  }

  PinchingCertificate cert;
  cert.target = t;
  cert.basis = UnitaryMatrix(u, tol);

  // Honest residual from a fresh conjugation.
  cert.residual = grouped_residual(x.matrix(), cert.basis.matrix(), offsets, t);
  cert.certified = cert.residual <= residual_tol;
  cert.projections.reserve(ranks.size());
  for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
    const Index b = offsets[j];
    const Index w = offsets[j + 1] - b;
    cert.projections.push_back(
        ProjectionMatrix::from_orthonormal_columns(cert.basis.matrix().middleCols(b, w), tol));
  }
  return cert;
}

PinchingVerification verify_pinching(const HermitianMatrix& x, const PinchingCertificate& cert,
                                     const Tolerance& tol) {
  const Index n = x.size();
  PinchingVerification out;
  if (cert.projections.empty()) return out;
  for (const ProjectionMatrix& e : cert.projections)
    if (e.size() != n) return out;

  MatrixC sum = MatrixC::Zero(n, n);
  for (const ProjectionMatrix& e : cert.projections) sum += e.matrix();
  // A complete family sums to I; an incomplete one to a sub-identity
  // projection, so then only idempotency of the sum is checked.
  out.sum_deviation = cert.complete ? (sum - MatrixC::Identity(n, n)).norm()
                                    : (sum * sum - sum).norm();
  for (std::size_t a = 0; a < cert.projections.size(); ++a)
    for (std::size_t b = a + 1; b < cert.projections.size(); ++b)
      out.max_orthogonality = std::max(
          out.max_orthogonality,
          (cert.projections[a].matrix() * cert.projections[b].matrix()).norm());

  double worst = 0.0;
  for (const ProjectionMatrix& e : cert.projections) {
    const MatrixC d = e.matrix() * x.matrix() * e.matrix() - cert.target * e.matrix();
    worst = std::max(worst, d.norm());
  }
  out.recomputed_residual = worst;

  const double structural = tol.identity_scale(n) * 10.0;
  const double slack = tol.structural(1.0 + x.matrix().norm(), n) * 10.0;
  out.ok = out.sum_deviation <= structural && out.max_orthogonality <= structural &&
           out.recomputed_residual <= cert.residual + slack;
  return out;
}

}  // namespace pincert
