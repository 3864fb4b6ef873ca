// Core value types for trace-normalized matrix analysis over M_n(C).
//
// Everything downstream works with the normalized trace tau(X) = Tr(X)/n and
// with certificates whose claims are checked against explicit residuals, so
// the domain types here validate their defining property (Hermitian, unitary,
// idempotent, partial isometry) on construction instead of trusting callers.
// A single Tolerance object is threaded through every operation; structural
// checks scale as abs_tol + rel_scale * n * ||.||_F.

#ifndef PINCERT_TYPES_HPP
#define PINCERT_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace pincert {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input has the wrong dimensions (non-square, size mismatch, empty list).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite entries or otherwise unusable numeric values.
class ValueError : public Error {
 public:
  using Error::Error;
};

// A matrix fails the structural property its type promises.
class StructureError : public Error {
 public:
  using Error::Error;
};

class NotPSDError : public Error {
 public:
  NotPSDError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue = 0.0;
};

class RankError : public Error {
 public:
  using Error::Error;
};

// Feasibility violated; for majorization checks carries the first bad prefix.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, Index first_violation = -1)
      : Error(what), first_violation(first_violation) {}
  Index first_violation = -1;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

class NotAveragingError : public Error {
 public:
  using Error::Error;
};

// Spectrum of a would-be root-of-unity unitary strays off the expected rays.
class BranchError : public Error {
 public:
  using Error::Error;
};

class ParityError : public Error {
 public:
  ParityError(const std::string& what, std::string part)
      : Error(what), part(std::move(part)) {}
  std::string part;  // which rank was odd
};

class TraceError : public Error {
 public:
  TraceError(const std::string& what, double trace) : Error(what), trace(trace) {}
  double trace = 0.0;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line(line) {}
  long line = -1;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// tolerance

struct Tolerance {
  double abs_tol = 1e-12;
  double rel_scale = 1e-12;    // multiplies n * ||.||_F in structural checks
  double rank_cutoff = 1e-10;  // relative cutoff for numerical rank decisions

  // Structural comparison threshold for an n x n matrix of Frobenius norm nrm.
  double structural(double nrm, Index n) const {
    return abs_tol + rel_scale * static_cast<double>(n) * nrm;
  }
  // Threshold for comparisons against the identity (||I||_F = sqrt(n)).
  double identity_scale(Index n) const {
    return structural(std::sqrt(static_cast<double>(n)), n);
  }
};

// ---------------------------------------------------------------------------
// small helpers

inline bool entries_finite(const MatrixC& m) {
  return m.allFinite();
}

inline void require_square_nonempty(const MatrixC& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ShapeError(std::string(who) + ": expected a nonempty square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!entries_finite(m)) {
    throw ValueError(std::string(who) + ": matrix has non-finite entries");
  }
}

// tau(X) = Tr(X)/n, the normalized trace.
inline Complex normalized_trace(const MatrixC& x) {
  require_square_nonempty(x, "normalized_trace");
  return x.trace() / static_cast<double>(x.rows());
}

// ---------------------------------------------------------------------------
// validated wrappers

class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  // Validates ||X - X*||_F against tol, then stores the Hermitian part so all
  // downstream arithmetic sees an exactly self-adjoint matrix.
  explicit HermitianMatrix(const MatrixC& raw, const Tolerance& tol = Tolerance{}) {
    require_square_nonempty(raw, "HermitianMatrix");
    const double dev = (raw - raw.adjoint()).norm();
    if (dev > tol.structural(raw.norm(), raw.rows())) {
      throw StructureError("HermitianMatrix: ||X - X*||_F = " + std::to_string(dev) +
                           " exceeds tolerance");
    }
    m_ = 0.5 * (raw + raw.adjoint().eval());
  }

  Index size() const { return m_.rows(); }
  const MatrixC& matrix() const { return m_; }
  // tau(X), real for self-adjoint X.
  double trace_mean() const { return m_.trace().real() / static_cast<double>(m_.rows()); }

 private:
  MatrixC m_;
};

inline double normalized_trace(const HermitianMatrix& x) { return x.trace_mean(); }

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  explicit UnitaryMatrix(MatrixC raw, const Tolerance& tol = Tolerance{}) : m_(std::move(raw)) {
    require_square_nonempty(m_, "UnitaryMatrix");
    const Index n = m_.rows();
    const double dev = (m_.adjoint() * m_ - MatrixC::Identity(n, n)).norm();
    if (dev > tol.identity_scale(n)) {
      throw StructureError("UnitaryMatrix: ||U*U - I||_F = " + std::to_string(dev) +
                           " exceeds tolerance");
    }
  }

  static UnitaryMatrix identity(Index n) { return UnitaryMatrix(MatrixC::Identity(n, n)); }

  Index size() const { return m_.rows(); }
  const MatrixC& matrix() const { return m_; }

 private:
  MatrixC m_;
};

class ProjectionMatrix {
 public:
  ProjectionMatrix() = default;

  // Full check: Hermitian, idempotent within tol, trace within 0.1 of an integer.
  explicit ProjectionMatrix(const MatrixC& raw, const Tolerance& tol = Tolerance{}) {
    HermitianMatrix h(raw, tol);
    m_ = h.matrix();
    const Index n = m_.rows();
    const double idem = (m_ * m_ - m_).norm();
    const double scale = tol.structural(std::max(1.0, m_.norm()), n);
    if (idem > scale) {
      throw StructureError("ProjectionMatrix: ||P^2 - P||_F = " + std::to_string(idem) +
                           " exceeds tolerance");
    }
    const double tr = m_.trace().real();
    rank_ = static_cast<Index>(std::lround(tr));
    if (rank_ < 0 || rank_ > n || std::abs(tr - static_cast<double>(rank_)) > 0.1) {
      throw StructureError("ProjectionMatrix: trace " + std::to_string(tr) +
                           " is not close to an admissible integer rank");
    }
  }

  // Rank-one projection u u* from a unit vector; cheaper than the full check.
  static ProjectionMatrix from_unit_vector(const VectorC& u, const Tolerance& tol = Tolerance{}) {
    if (u.size() == 0 || !u.allFinite()) {
      throw ValueError("ProjectionMatrix::from_unit_vector: bad vector");
    }
    const double nrm = u.norm();
    if (std::abs(nrm - 1.0) > tol.structural(1.0, u.size())) {
      throw StructureError("ProjectionMatrix::from_unit_vector: ||u|| = " + std::to_string(nrm) +
                           " is not 1 within tolerance");
    }
    ProjectionMatrix p;
    p.m_ = u * u.adjoint();
    p.m_ = 0.5 * (p.m_ + p.m_.adjoint().eval());
    p.rank_ = 1;
    return p;
  }

  // V V* from an n x r matrix with orthonormal columns.
  static ProjectionMatrix from_orthonormal_columns(const MatrixC& v,
                                                   const Tolerance& tol = Tolerance{}) {
    if (v.rows() == 0 || v.cols() == 0 || v.cols() > v.rows() || !entries_finite(v)) {
      throw ShapeError("ProjectionMatrix::from_orthonormal_columns: bad column frame");
    }
    const double dev = (v.adjoint() * v - MatrixC::Identity(v.cols(), v.cols())).norm();
    if (dev > tol.identity_scale(v.rows())) {
      throw StructureError(
          "ProjectionMatrix::from_orthonormal_columns: columns not orthonormal, deviation " +
          std::to_string(dev));
    }
    ProjectionMatrix p;
    p.m_ = v * v.adjoint();
    p.m_ = 0.5 * (p.m_ + p.m_.adjoint().eval());
    p.rank_ = v.cols();
    return p;
  }

  static ProjectionMatrix zero(Index n) {
    ProjectionMatrix p;
    p.m_ = MatrixC::Zero(n, n);
    p.rank_ = 0;
    return p;
  }

  static ProjectionMatrix identity(Index n) {
    ProjectionMatrix p;
    p.m_ = MatrixC::Identity(n, n);
    p.rank_ = n;
    return p;
  }

  Index size() const { return m_.rows(); }
  Index rank() const { return rank_; }
  const MatrixC& matrix() const { return m_; }
  double trace_mean() const { return m_.trace().real() / static_cast<double>(m_.rows()); }
  HermitianMatrix hermitian(const Tolerance& tol = Tolerance{}) const {
    return HermitianMatrix(m_, tol);
  }

 private:
  MatrixC m_;
  Index rank_ = 0;
};

// V with V*V and VV* both projections; initial() and final() record them.
class PartialIsometry {
 public:
  PartialIsometry() = default;

  explicit PartialIsometry(const MatrixC& raw, const Tolerance& tol = Tolerance{}) : m_(raw) {
    require_square_nonempty(m_, "PartialIsometry");
    initial_ = ProjectionMatrix(MatrixC(m_.adjoint() * m_), tol);
    final_ = ProjectionMatrix(MatrixC(m_ * m_.adjoint()), tol);
  }

  Index size() const { return m_.rows(); }
  Index rank() const { return initial_.rank(); }
  const MatrixC& matrix() const { return m_; }
  const ProjectionMatrix& initial() const { return initial_; }
  const ProjectionMatrix& final() const { return final_; }

 private:
  MatrixC m_;
  ProjectionMatrix initial_;
  ProjectionMatrix final_;
};

}  // namespace pincert

#endif  // PINCERT_TYPES_HPP
