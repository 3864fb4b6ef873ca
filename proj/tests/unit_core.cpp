#include <cmath>

#include "doctest.h"
#include "pincert/spectral.hpp"
#include "pincert/types.hpp"
#include "test_helpers.hpp"

using namespace pincert;
using namespace pincert::testing;

TEST_SUITE("core") {

TEST_CASE("normalized trace") {
  MatrixC m = MatrixC::Identity(4, 4) * Complex(2.0, 0.0);
  CHECK(normalized_trace(m).real() == doctest::Approx(2.0));
  CHECK(normalized_trace(m).imag() == doctest::Approx(0.0));
}

TEST_CASE("hermitian wrapper symmetrizes and rejects") {
  MatrixC ok(2, 2);
  ok << Complex(1, 0), Complex(0, 1e-14), Complex(0, -1e-14 + 1e-16), Complex(2, 0);
  const HermitianMatrix h(ok);
  CHECK((h.matrix() - h.matrix().adjoint().eval()).norm() == 0.0);

  MatrixC bad(2, 2);
  bad << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(2, 0);
  CHECK_THROWS_AS(HermitianMatrix{bad}, StructureError);

  MatrixC rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(HermitianMatrix{rect}, ShapeError);

  MatrixC inf = MatrixC::Identity(2, 2);
  inf(0, 0) = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(HermitianMatrix{inf}, ValueError);
}

TEST_CASE("projection wrapper validates idempotency and rank") {
  MatrixC p(2, 2);
  p << 1, 0, 0, 0;
  const ProjectionMatrix proj(p);
  CHECK(proj.rank() == 1);
  CHECK(proj.trace_mean() == doctest::Approx(0.5));

  MatrixC half(2, 2);
  half << 0.5, 0, 0, 0;
  CHECK_THROWS_AS(ProjectionMatrix{half}, StructureError);

  VectorC u(2);
  u << Complex(1.0 / std::sqrt(2.0), 0), Complex(0, 1.0 / std::sqrt(2.0));
  const ProjectionMatrix rank1 = ProjectionMatrix::from_unit_vector(u);
  CHECK(rank1.rank() == 1);
  CHECK((rank1.matrix() * rank1.matrix() - rank1.matrix()).norm() < 1e-14);

  VectorC big(2);
  big << Complex(2, 0), Complex(0, 0);
  CHECK_THROWS_AS(ProjectionMatrix::from_unit_vector(big), StructureError);
}

TEST_CASE("unitary wrapper") {
  MatrixC had(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  had << s, s, s, -s;
  CHECK_NOTHROW(UnitaryMatrix{had});
  CHECK_THROWS_AS(UnitaryMatrix{MatrixC(2.0 * MatrixC::Identity(2, 2))}, StructureError);
}

TEST_CASE("partial isometry wrapper records initial and final") {
  MatrixC v(2, 2);
  v << 0, 0, 1, 0;  // e2 e1*
  const PartialIsometry w(v);
  CHECK(w.rank() == 1);
  CHECK(w.initial().matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(w.final().matrix()(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("eig oracle: real symmetric swap") {
  // X = [[0,1],[1,0]] has eigenvalues -1, 1 (characteristic polynomial l^2-1).
  MatrixC x(2, 2);
  x << 0, 1, 1, 0;
  const EigResult eig = hermitian_eig(HermitianMatrix(x));
  CHECK(eig.values(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.values(1) == doctest::Approx(1.0).epsilon(1e-12));
  const MatrixC rebuilt = eig.vectors.matrix() * eig.values.cast<Complex>().asDiagonal() *
                          eig.vectors.matrix().adjoint();
  CHECK((rebuilt - x).norm() < 1e-13);
}

TEST_CASE("eig oracle: complex Hermitian") {
  // X = [[2, i], [-i, 2]]: det(lI - X) = (l-2)^2 - 1, eigenvalues 1 and 3.
  MatrixC x(2, 2);
  x << Complex(2, 0), Complex(0, 1), Complex(0, -1), Complex(2, 0);
  const EigResult eig = hermitian_eig(HermitianMatrix(x));
  CHECK(eig.values(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.values(1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eig property sweep: reconstruction and ordering") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 15);
    const HermitianMatrix x = random_hermitian(n, g);
    const EigResult eig = hermitian_eig(x);
    for (Index k = 0; k + 1 < n; ++k) CHECK(eig.values(k) <= eig.values(k + 1));
    const MatrixC rebuilt = eig.vectors.matrix() * eig.values.cast<Complex>().asDiagonal() *
                            eig.vectors.matrix().adjoint();
    CHECK((rebuilt - x.matrix()).norm() <= 1e-12 * (1.0 + x.matrix().norm()));
  }
}

TEST_CASE("sqrt oracle") {
  // A = [[2,1],[1,2]]: eigenvalues 1, 3; sqrt has entries (sqrt(3)+-1)/2.
  MatrixC a(2, 2);
  a << 2, 1, 1, 2;
  const HermitianMatrix s = sqrt_psd(HermitianMatrix(a));
  const double hi = (std::sqrt(3.0) + 1.0) / 2.0;
  const double lo = (std::sqrt(3.0) - 1.0) / 2.0;
  CHECK(s.matrix()(0, 0).real() == doctest::Approx(hi).epsilon(1e-12));
  CHECK(s.matrix()(0, 1).real() == doctest::Approx(lo).epsilon(1e-12));
  CHECK((s.matrix() * s.matrix() - a).norm() < 1e-13);

  MatrixC neg(2, 2);
  neg << -1, 0, 0, 1;
  CHECK_THROWS_AS(sqrt_psd(HermitianMatrix(neg)), NotPSDError);
}

TEST_CASE("polar oracle: diagonal with a negative entry") {
  MatrixC m(2, 2);
  m << 2, 0, 0, -3;
  const PolarResult pr = polar(m);
  CHECK(pr.unitary.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(pr.unitary.matrix()(1, 1).real() == doctest::Approx(-1.0));
  CHECK(pr.positive.matrix()(0, 0).real() == doctest::Approx(2.0));
  CHECK(pr.positive.matrix()(1, 1).real() == doctest::Approx(3.0));
  CHECK((pr.unitary.matrix() * pr.positive.matrix() - m).norm() < 1e-13);
}

TEST_CASE("polar property: rank-deficient completion stays unitary") {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 3 + static_cast<Index>(g() % 6);
    MatrixC m = random_matrix(n, g);
    m.col(0).setZero();  // force rank deficiency
    const PolarResult pr = polar(m);
    CHECK((pr.unitary.matrix() * pr.positive.matrix() - m).norm() <=
          1e-11 * (1.0 + m.norm()));
  }
}

TEST_CASE("interval membership and snapping") {
  const Interval j = Interval::left_open(1.0, 2.0);
  CHECK(!j.contains(1.0, 1e-10));
  CHECK(j.contains(2.0, 1e-10));
  CHECK(j.contains(1.5, 1e-10));
  CHECK(j.contains(2.0 + 1e-12, 1e-10));   // snapped onto the closed end
  CHECK(!j.contains(1.0 - 1e-12, 1e-10));  // snapped onto the open end

  // Empty interval: (1, 0.8] must contain nothing, even values that snap
  // onto an endpoint.
  const Interval empty = Interval::left_open(1.0, 0.8);
  CHECK(!empty.contains(0.8, 1e-6));
  CHECK(!empty.contains(1.0, 1e-6));
  CHECK(!empty.contains(0.9, 1e-6));
}

TEST_CASE("spectral projection and range projection") {
  MatrixC a(3, 3);
  a.setZero();
  a(0, 0) = 1;
  a(2, 2) = 2;
  const ProjectionMatrix r = range_projection(HermitianMatrix(a));
  CHECK(r.rank() == 2);
  CHECK(r.matrix()(0, 0).real() == doctest::Approx(1.0));
  CHECK(r.matrix()(1, 1).real() == doctest::Approx(0.0));
  CHECK(r.matrix()(2, 2).real() == doctest::Approx(1.0));

  const ProjectionMatrix top =
      spectral_projection(HermitianMatrix(a), Interval::left_open(1.5, 3.0));
  CHECK(top.rank() == 1);
  CHECK(top.matrix()(2, 2).real() == doctest::Approx(1.0));
}

TEST_CASE("partial isometry builder maps range to range") {
  MatrixC p(2, 2), q(2, 2);
  p << 1, 0, 0, 0;
  q << 0, 0, 0, 1;
  const PartialIsometry v = partial_isometry(ProjectionMatrix(p), ProjectionMatrix(q));
  // V = e2 e1* up to phase: V V* = q, V* V = p.
  CHECK((v.initial().matrix() - p).norm() < 1e-13);
  CHECK((v.final().matrix() - q).norm() < 1e-13);

  MatrixC big(2, 2);
  big.setIdentity();
  CHECK_THROWS_AS(partial_isometry(ProjectionMatrix(big), ProjectionMatrix(q)), RankError);
}

TEST_CASE("unitary eigendecomposition reconstructs") {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 7);
    const UnitaryMatrix u = random_unitary(n, g);
    const UnitaryEigResult eig = unitary_eig(u);
    const MatrixC rebuilt = eig.vectors.matrix() * eig.values.asDiagonal() *
                            eig.vectors.matrix().adjoint();
    CHECK((rebuilt - u.matrix()).norm() <= 1e-11 * static_cast<double>(n));
    for (Index k = 0; k < n; ++k)
      CHECK(std::abs(std::abs(eig.values(k)) - 1.0) <= 1e-11);
  }
}

}  // TEST_SUITE
