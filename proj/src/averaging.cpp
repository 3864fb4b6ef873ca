#include "pincert/averaging.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pincert {

namespace {

bool is_scalar(const HermitianMatrix& x, const Tolerance& tol) {
  const Index n = x.size();
  const double tau = x.trace_mean();
  const MatrixC dev = x.matrix() - tau * MatrixC::Identity(n, n);
  return dev.norm() <= tol.structural(1.0 + x.matrix().norm(), n) * 10.0;
}

double recompute_residual(const HermitianMatrix& x, const std::vector<UnitaryMatrix>& us,
                          double target) {
  const Index n = x.size();
  MatrixC sum = MatrixC::Zero(n, n);
  for (const UnitaryMatrix& u : us)
    sum += u.matrix().adjoint() * x.matrix() * u.matrix();
  sum /= static_cast<double>(us.size());
  return (sum - target * MatrixC::Identity(n, n)).norm();
}

}  // namespace

DixmierCertificate average_single(const HermitianMatrix& x, const Tolerance& tol) {
  const Index n = x.size();
  DixmierCertificate cert;
  cert.targets.push_back(x.trace_mean());

  if (is_scalar(x, tol)) {
    cert.unitaries.push_back(UnitaryMatrix::identity(n));
    cert.residuals.push_back(recompute_residual(x, cert.unitaries, cert.targets[0]));
    return cert;
  }

  const ConstantDiagonalResult pin = constant_diagonal_unitary(x, tol);
  const AveragingUnitary w = dixmier_unitary_from_pinching(x, pin.certificate, tol);
  MatrixC power = MatrixC::Identity(n, n);
  for (Index k = 0; k < n; ++k) {
    cert.unitaries.push_back(UnitaryMatrix(power, tol));
    power = power * w.w.matrix();
  }
  cert.residuals.push_back(recompute_residual(x, cert.unitaries, cert.targets[0]));
  return cert;
}

DixmierCertificate average_simultaneous(const std::vector<HermitianMatrix>& xs,
                                        const Tolerance& tol, long max_family) {
  if (xs.empty()) throw ShapeError("average_simultaneous: empty input list");
  const Index n = xs.front().size();
  for (const HermitianMatrix& x : xs)
    if (x.size() != n) throw ShapeError("average_simultaneous: inputs have mixed dimensions");

  DixmierCertificate cert;
  cert.unitaries.push_back(UnitaryMatrix::identity(n));

  for (const HermitianMatrix& x : xs) {
    // Average of X under the family built so far; earlier inputs are already
    // scalar under it, so right-multiplying by the new stage preserves them.
    MatrixC mean = MatrixC::Zero(n, n);
    for (const UnitaryMatrix& g : cert.unitaries)
      mean += g.matrix().adjoint() * x.matrix() * g.matrix();
    mean /= static_cast<double>(cert.unitaries.size());
    const HermitianMatrix stage_input(mean, tol);

    const DixmierCertificate stage = average_single(stage_input, tol);
    if (stage.unitaries.size() > 1) {
      const long grown = static_cast<long>(stage.unitaries.size() * cert.unitaries.size());
      if (grown > max_family)
        throw SizeError("average_simultaneous: family would reach " + std::to_string(grown) +
                        " members, past the cap " + std::to_string(max_family));
      std::vector<UnitaryMatrix> next;
      next.reserve(stage.unitaries.size() * cert.unitaries.size());
      for (const UnitaryMatrix& w : stage.unitaries)
        for (const UnitaryMatrix& g : cert.unitaries)
          next.push_back(UnitaryMatrix(MatrixC(g.matrix() * w.matrix()), tol));
      cert.unitaries = std::move(next);
    }
    cert.targets.push_back(x.trace_mean());
  }

  for (std::size_t j = 0; j < xs.size(); ++j)
    cert.residuals.push_back(recompute_residual(xs[j], cert.unitaries, cert.targets[j]));
  return cert;
}

DixmierCertificate average_simultaneous(const std::vector<MatrixC>& xs,
                                        std::vector<HermitianMatrix>* expanded,
                                        const Tolerance& tol, long max_family) {
  if (xs.empty()) throw ShapeError("average_simultaneous: empty input list");
  std::vector<HermitianMatrix> parts;
  for (const MatrixC& x : xs) {
    if (x.rows() != x.cols() || x.rows() == 0)
      throw ShapeError("average_simultaneous: inputs must be square and nonempty");
    const MatrixC h = 0.5 * (x + x.adjoint().eval());
    const MatrixC k = Complex(0.0, -0.5) * (x - x.adjoint().eval());
    parts.emplace_back(h, tol);
    if (k.norm() > tol.structural(1.0 + x.norm(), x.rows()))
      parts.emplace_back(k, tol);
  }
  if (expanded) *expanded = parts;
  return average_simultaneous(parts, tol, max_family);
}

AverageVerification verify_average(const std::vector<HermitianMatrix>& xs,
                                   const DixmierCertificate& cert, const Tolerance& tol) {
  if (xs.empty() || cert.unitaries.empty())
    throw ShapeError("verify_average: empty matrix or unitary list");
  if (cert.targets.size() != xs.size() || cert.residuals.size() != xs.size())
    throw ShapeError("verify_average: certificate does not cover the input list");
  const Index n = xs.front().size();
  for (const HermitianMatrix& x : xs)
    if (x.size() != n) throw ShapeError("verify_average: inputs have mixed dimensions");
  for (const UnitaryMatrix& u : cert.unitaries)
    if (u.size() != n) throw ShapeError("verify_average: unitary size does not match inputs");

  AverageVerification out;
  out.ok = true;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double res = recompute_residual(xs[j], cert.unitaries, cert.targets[j]);
    const double scale = 1.0 + xs[j].matrix().norm();
    const double bound =
        std::max(1e-8 * static_cast<double>(n) * scale, tol.structural(scale, n) * 100.0);
    out.residuals.push_back(res);
    out.bounds.push_back(bound);
    if (res > bound) out.ok = false;
    // Trace preservation holds for any unitary family; a target far from
    // tau(X) can therefore never verify.
    if (std::abs(cert.targets[j] - xs[j].trace_mean()) > bound) out.ok = false;
  }
  return out;
}

}  // namespace pincert
