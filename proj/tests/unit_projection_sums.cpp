#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pincert/pinching.hpp"
#include "pincert/projection_sums.hpp"
#include "test_helpers.hpp"

using namespace pincert;
using namespace pincert::testing;

namespace {

MatrixC diag2(double a, double b) {
  MatrixC m(2, 2);
  m.setZero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

double worst_idempotency(const std::vector<ProjectionMatrix>& ps) {
  double worst = 0.0;
  for (const ProjectionMatrix& p : ps)
    worst = std::max(worst, (p.matrix() * p.matrix() - p.matrix()).norm());
  return worst;
}

MatrixC sum_of(const std::vector<ProjectionMatrix>& ps, Index n) {
  MatrixC sum = MatrixC::Zero(n, n);
  for (const ProjectionMatrix& p : ps) sum += p.matrix();
  return sum;
}

// Projection pair in block form with the given intersection dimensions and
// generic angles, conjugated by a random unitary.
std::pair<ProjectionMatrix, ProjectionMatrix> block_model_pair(
    Index a, Index b, Index c, Index d, const std::vector<double>& angles,
    std::mt19937_64& g) {
  const Index m = static_cast<Index>(angles.size());
  const Index n = a + b + c + d + 2 * m;
  MatrixC eb = MatrixC::Zero(n, n);
  MatrixC fb = MatrixC::Zero(n, n);
  for (Index k = 0; k < a; ++k) {
    eb(k, k) = 1;
    fb(k, k) = 1;
  }
  for (Index k = 0; k < b; ++k) eb(a + k, a + k) = 1;
  for (Index k = 0; k < c; ++k) fb(a + b + k, a + b + k) = 1;
  const Index ou = a + b + c + d;
  for (Index i = 0; i < m; ++i) {
    const double h = std::cos(angles[static_cast<std::size_t>(i)]);
    const double s = std::sin(angles[static_cast<std::size_t>(i)]);
    eb(ou + i, ou + i) = 1;
    fb(ou + i, ou + i) = h * h;
    fb(ou + i, ou + m + i) = h * s;
    fb(ou + m + i, ou + i) = h * s;
    fb(ou + m + i, ou + m + i) = s * s;
  }
  const UnitaryMatrix u = random_unitary(n, g);
  return {ProjectionMatrix(MatrixC(u.matrix() * eb * u.matrix().adjoint())),
          ProjectionMatrix(MatrixC(u.matrix() * fb * u.matrix().adjoint()))};
}

}  // namespace

TEST_SUITE("projection_sums") {

TEST_CASE("excess/defect oracle: diag(2, 0.5)") {
  const ExcessDefect ed = excess_defect(HermitianMatrix(diag2(2.0, 0.5)));
  CHECK(ed.tau_plus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ed.tau_minus == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ed.range.rank() == 2);
  // A_+ = diag(1, 0), A_- = diag(0, 0.5).
  CHECK((ed.a_plus.matrix() - diag2(1.0, 0.0)).norm() < 1e-12);
  CHECK((ed.a_minus.matrix() - diag2(0.0, 0.5)).norm() < 1e-12);
  CHECK(ed.tau_a - ed.tau_range ==
        doctest::Approx(ed.tau_plus - ed.tau_minus).epsilon(1e-12));
}

TEST_CASE("excess/defect oracle: projection input has no excess or defect") {
  MatrixC a(3, 3);
  a.setZero();
  a(0, 0) = 1;
  a(1, 1) = 1;
  const ExcessDefect ed = excess_defect(HermitianMatrix(a));
  CHECK(ed.tau_plus == doctest::Approx(0.0));
  CHECK(ed.tau_minus == doctest::Approx(0.0));
  CHECK(ed.tau_a == doctest::Approx(2.0 / 3.0));
  CHECK(ed.tau_range == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("excess/defect trace identity property") {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 10);
    const Index rank = 1 + static_cast<Index>(g() % n);
    const HermitianMatrix a = random_psd(n, rank, 0.5 + static_cast<double>(rank), g);
    const ExcessDefect ed = excess_defect(a);
    CHECK(std::abs((ed.tau_a - ed.tau_range) - (ed.tau_plus - ed.tau_minus)) <= 1e-10);
  }
}

TEST_CASE("feasibility flags") {
  // Trace 2 = rank 2, integer: feasible.
  const FeasibilityFlags f1 = feasibility(HermitianMatrix(diag2(1.5, 0.5)));
  CHECK(f1.integer_trace);
  CHECK(f1.tau_condition);
  CHECK(f1.fillmore);

  // Non-integer trace.
  const FeasibilityFlags f2 = feasibility(HermitianMatrix(diag2(0.5, 0.25)));
  CHECK(!f2.integer_trace);
  CHECK(!f2.fillmore);

  // Integer trace 1 below rank 2.
  const FeasibilityFlags f3 = feasibility(HermitianMatrix(diag2(0.5, 0.5)));
  CHECK(f3.integer_trace);
  CHECK(!f3.tau_condition);
  CHECK(!f3.fillmore);

  // The identity is a sum of projections.
  const FeasibilityFlags f4 = feasibility(HermitianMatrix(MatrixC(MatrixC::Identity(3, 3))));
  CHECK(f4.fillmore);
}

TEST_CASE("fillmore oracle: 2I needs four projections") {
  const ProjectionSumCertificate cert = fillmore_decompose(HermitianMatrix(diag2(2.0, 2.0)));
  CHECK(cert.count == 4);
  CHECK(worst_idempotency(cert.projections) < 1e-12);
  CHECK((sum_of(cert.projections, 2) - diag2(2.0, 2.0)).norm() < 1e-10);
}

TEST_CASE("fillmore oracle: diag(1.5, 0.5) splits into two projections") {
  const ProjectionSumCertificate cert = fillmore_decompose(HermitianMatrix(diag2(1.5, 0.5)));
  CHECK(cert.count == 2);
  CHECK(worst_idempotency(cert.projections) < 1e-12);
  CHECK((sum_of(cert.projections, 2) - diag2(1.5, 0.5)).norm() < 1e-10);
  CHECK(cert.projections[0].rank() == 1);
  CHECK(cert.projections[1].rank() == 1);
}

TEST_CASE("fillmore rejections name the failed flag") {
  CHECK_THROWS_AS(fillmore_decompose(HermitianMatrix(diag2(0.5, 0.25))), InfeasibleError);
  try {
    fillmore_decompose(HermitianMatrix(diag2(0.5, 0.25)));
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("integer_trace") != std::string::npos);
  }

  MatrixC three(3, 3);
  three.setZero();
  three(0, 0) = 0.3;
  three(1, 1) = 0.3;
  three(2, 2) = 0.4;
  try {
    fillmore_decompose(HermitianMatrix(three));
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("tau_condition") != std::string::npos);
  }

  // A = 0 has nothing to decompose into nonzero projections.
  CHECK_THROWS_AS(fillmore_decompose(HermitianMatrix(MatrixC(MatrixC::Zero(2, 2)))),
                  InfeasibleError);

  MatrixC neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(fillmore_decompose(HermitianMatrix(neg)), NotPSDError);
}

TEST_CASE("fillmore property: count equals the trace") {
  std::mt19937_64 g(32);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 7);
    const Index rank = 1 + static_cast<Index>(g() % n);
    const long m = rank + static_cast<long>(g() % 3);
    const HermitianMatrix a = random_psd(n, rank, static_cast<double>(m), g);
    const ProjectionSumCertificate cert = fillmore_decompose(a);
    CHECK(cert.count == m);
    CHECK(worst_idempotency(cert.projections) <= 1e-9 * static_cast<double>(n));
    CHECK((sum_of(cert.projections, n) - a.matrix()).norm() <=
          1e-8 * static_cast<double>(n) * a.matrix().norm());
    // Necessity: rank of the range projection never exceeds the total rank.
    Index total = 0;
    for (const ProjectionMatrix& p : cert.projections) total += p.rank();
    CHECK(range_projection(a).rank() <= total);
  }
}

TEST_CASE("pinching_from_projections round trip") {
  // A = diag(1.5, 0.5) = P1 + P2 from the Fillmore construction.
  const HermitianMatrix a(diag2(1.5, 0.5));
  const ProjectionSumCertificate sum_cert = fillmore_decompose(a);
  const PinchingCertificate pin = pinching_from_projections(a, sum_cert.projections);
  CHECK(pin.target == doctest::Approx(1.0));
  // E_j A E_j = E_j: verify through the stored residual and by hand.
  CHECK(pin.residual <= 1e-10);
  MatrixC sum = MatrixC::Zero(2, 2);
  for (const ProjectionMatrix& e : pin.projections) sum += e.matrix();
  CHECK(pin.complete == (sum_cert.count == 2));

  const ProjectionSumCertificate back = projections_from_pinching(a, pin);
  CHECK(back.count == sum_cert.count);
  CHECK(worst_idempotency(back.projections) <= 1e-10);
  CHECK((sum_of(back.projections, 2) - a.matrix()).norm() <= 1e-10);
}

TEST_CASE("pinching_from_projections: identity with standard parts") {
  const HermitianMatrix a(MatrixC(MatrixC::Identity(2, 2)));
  std::vector<ProjectionMatrix> parts;
  parts.push_back(ProjectionMatrix(diag2(1, 0)));
  parts.push_back(ProjectionMatrix(diag2(0, 1)));
  const PinchingCertificate pin = pinching_from_projections(a, parts);
  CHECK(pin.complete);
  CHECK(pin.projections.size() == 2);
  CHECK((pin.projections[0].matrix() - diag2(1, 0)).norm() < 1e-12);
  CHECK((pin.projections[1].matrix() - diag2(0, 1)).norm() < 1e-12);
}

TEST_CASE("pinching_from_projections errors") {
  // Three rank-1 parts cannot fit orthogonally in M_2.
  std::vector<ProjectionMatrix> parts(3, ProjectionMatrix(diag2(1, 0)));
  const HermitianMatrix a3(MatrixC(3.0 * diag2(1, 0)));
  CHECK_THROWS_AS(pinching_from_projections(a3, parts), RankError);

  // Parts that do not sum to A.
  std::vector<ProjectionMatrix> one(1, ProjectionMatrix(diag2(1, 0)));
  const HermitianMatrix id(MatrixC(MatrixC::Identity(2, 2)));
  CHECK_THROWS_AS(pinching_from_projections(id, one), CertificateError);
}

TEST_CASE("projections_from_pinching: trace-n psd with rank-1 pinching") {
  std::mt19937_64 g(33);
  const Index n = 8;
  const HermitianMatrix a = random_psd(n, n, static_cast<double>(n), g);
  const ConstantDiagonalResult pin = constant_diagonal_unitary(a);
  CHECK(pin.certificate.target == doctest::Approx(1.0).epsilon(1e-12));
  const ProjectionSumCertificate cert = projections_from_pinching(a, pin.certificate);
  CHECK(cert.count == n);
  CHECK(worst_idempotency(cert.projections) <= 1e-9);
  CHECK((sum_of(cert.projections, n) - a.matrix()).norm() <= 1e-9 * static_cast<double>(n));
}

TEST_CASE("positive combination oracle: diag(3,1)") {
  const PositiveCombination comb = positive_combination(HermitianMatrix(diag2(3, 1)));
  REQUIRE(comb.coefficients.size() == 2);
  CHECK(comb.coefficients[0] == doctest::Approx(2.0));
  CHECK(comb.coefficients[1] == doctest::Approx(1.0));
  CHECK(comb.projections[0].rank() == 1);
  CHECK(comb.projections[1].rank() == 2);
  CHECK(comb.residual <= 1e-12);
}

TEST_CASE("positive combination oracle: scaled projection and zero") {
  MatrixC p(2, 2);
  p << 1.5, 1.5, 1.5, 1.5;  // 3 * rank-1 projection
  const PositiveCombination comb = positive_combination(HermitianMatrix(p));
  REQUIRE(comb.coefficients.size() == 1);
  CHECK(comb.coefficients[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(comb.projections[0].rank() == 1);

  const PositiveCombination empty =
      positive_combination(HermitianMatrix(MatrixC(MatrixC::Zero(2, 2))));
  CHECK(empty.coefficients.empty());
  CHECK(empty.residual == doctest::Approx(0.0));
}

TEST_CASE("positive combination property: nested and reconstructing") {
  std::mt19937_64 g(34);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 8);
    const Index rank = 1 + static_cast<Index>(g() % n);
    const HermitianMatrix a = random_psd(n, rank, 1.0 + static_cast<double>(rank), g);
    const PositiveCombination comb = positive_combination(a);
    MatrixC sum = MatrixC::Zero(n, n);
    for (std::size_t i = 0; i < comb.coefficients.size(); ++i) {
      CHECK(comb.coefficients[i] >= 0.0);
      sum += comb.coefficients[i] * comb.projections[i].matrix();
      if (i + 1 < comb.projections.size()) {
        const MatrixC nest = comb.projections[i].matrix() * comb.projections[i + 1].matrix() -
                             comb.projections[i].matrix();
        CHECK(nest.norm() <= 1e-10 * static_cast<double>(n));
      }
    }
    CHECK((sum - a.matrix()).norm() <= 1e-10 * static_cast<double>(n) * a.matrix().norm());
    CHECK(static_cast<Index>(comb.coefficients.size()) <= rank);
  }
}

TEST_CASE("closed-form bounds") {
  CHECK(gp_bound(1.0, 1.0) == 13);
  CHECK(gp_bound(2.0, 1.0) == 27);  // 12 + 14 + 1
  CHECK_THROWS_AS(gp_bound(0.5, 1.0), DomainError);
  CHECK(mu_bound(28.0) == 16);  // 15 + 1
  CHECK(mu_bound(1.0) == 43);   // 15 + 28
  CHECK_THROWS_AS(mu_bound(0.0), DomainError);
  CHECK_THROWS_AS(mu_bound(-2.0), DomainError);
}

TEST_CASE("q_pm oracle: half a rank-1 support") {
  // b = (1/2) e1 e1*, V = e2 e1*: beta = b/||b|| is the support projection,
  // the defect root vanishes, and q_- = q_+ = e1 e1*. The proof identity
  // reads q_- + q_+ = (2/||b||) b + 2E' - (2/||b||) V b V* = 2 e1 e1*.
  const HermitianMatrix b(diag2(0.5, 0.0));
  MatrixC vm(2, 2);
  vm << 0, 0, 1, 0;
  const QpmPair pair = build_q_pm(b, PartialIsometry(vm));
  CHECK((pair.q_minus.matrix() - diag2(1, 0)).norm() < 1e-12);
  CHECK((pair.q_plus.matrix() - diag2(1, 0)).norm() < 1e-12);
  CHECK(pair.identity_residual < 1e-13);
}

TEST_CASE("q_pm property sweep") {
  std::mt19937_64 g(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + static_cast<Index>(g() % 9);  // up to 12
    const Index r = 1 + static_cast<Index>(g() % (n / 2));
    const UnitaryMatrix q = random_unitary(n, g);
    const MatrixC s_cols = q.matrix().leftCols(r);
    const MatrixC f_cols = q.matrix().middleCols(r, r);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    VectorR d(r);
    for (Index i = 0; i < r; ++i) d(i) = u(g);
    d(0) = 1.0;  // ||b|| = 1 sometimes matters; keep it on the boundary
    const MatrixC bm = s_cols * d.cast<Complex>().asDiagonal() * s_cols.adjoint();
    const MatrixC vm = f_cols * s_cols.adjoint();
    const QpmPair pair = build_q_pm(HermitianMatrix(bm), PartialIsometry(vm));
    const double bound = 1e-10 * static_cast<double>(n);
    CHECK((pair.q_minus.matrix() * pair.q_minus.matrix() - pair.q_minus.matrix()).norm() <=
          bound);
    CHECK((pair.q_plus.matrix() * pair.q_plus.matrix() - pair.q_plus.matrix()).norm() <=
          bound);
    CHECK(pair.identity_residual <= bound);
  }
}

TEST_CASE("q_pm precondition errors") {
  MatrixC vm(2, 2);
  vm << 0, 0, 1, 0;
  const PartialIsometry v(vm);

  MatrixC neg(2, 2);
  neg << -0.5, 0, 0, 0;
  CHECK_THROWS_AS(build_q_pm(HermitianMatrix(neg), v), NotPSDError);
  CHECK_THROWS_AS(build_q_pm(HermitianMatrix(MatrixC(MatrixC::Zero(2, 2))), v), ValueError);
  CHECK_THROWS_AS(build_q_pm(HermitianMatrix(diag2(2.0, 0.0)), v), DomainError);

  // V whose initial space is not the support of b.
  MatrixC wrong(2, 2);
  wrong << 0, 1, 0, 0;  // e1 e2*
  CHECK_THROWS_AS(build_q_pm(HermitianMatrix(diag2(0.5, 0.0)), PartialIsometry(wrong)),
                  StructureError);

  // V mapping the support onto itself: final space not orthogonal to it.
  MatrixC onto(2, 2);
  onto << 1, 0, 0, 0;  // e1 e1*
  CHECK_THROWS_AS(build_q_pm(HermitianMatrix(diag2(0.5, 0.0)), PartialIsometry(onto)),
                  StructureError);
}

TEST_CASE("two projection form oracle: one generic angle") {
  const double theta = std::numbers::pi / 3.0;
  const double c = std::cos(theta), s = std::sin(theta);
  MatrixC f(2, 2);
  f << c * c, c * s, c * s, s * s;
  const TwoProjectionForm form =
      two_projection_form(ProjectionMatrix(diag2(1, 0)), ProjectionMatrix(f));
  CHECK(form.dim_both == 0);
  CHECK(form.dim_e_only == 0);
  CHECK(form.dim_f_only == 0);
  CHECK(form.dim_neither == 0);
  CHECK(form.generic_pairs == 1);
  CHECK(form.angles(0) == doctest::Approx(theta).epsilon(1e-10));
  CHECK(form.h(0) * form.h(0) + form.k(0) * form.k(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two projection form oracle: equal and orthogonal pairs") {
  const TwoProjectionForm same =
      two_projection_form(ProjectionMatrix(diag2(1, 0)), ProjectionMatrix(diag2(1, 0)));
  CHECK(same.dim_both == 1);
  CHECK(same.dim_neither == 1);
  CHECK(same.generic_pairs == 0);

  const TwoProjectionForm orth =
      two_projection_form(ProjectionMatrix(diag2(1, 0)), ProjectionMatrix(diag2(0, 1)));
  CHECK(orth.dim_e_only == 1);
  CHECK(orth.dim_f_only == 1);
  CHECK(orth.generic_pairs == 0);
}

TEST_CASE("two projection reconstruction property") {
  std::mt19937_64 g(36);
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_real_distribution<double> ang(0.15, std::numbers::pi / 2.0 - 0.15);
    std::vector<double> angles;
    const int m = static_cast<int>(g() % 3);
    for (int i = 0; i < m; ++i) angles.push_back(ang(g));
    const Index a = static_cast<Index>(g() % 2), b = static_cast<Index>(g() % 2),
                c = static_cast<Index>(g() % 2), d = 1 + static_cast<Index>(g() % 2);
    const auto [e, f] = block_model_pair(a, b, c, d, angles, g);
    const TwoProjectionForm form = two_projection_form(e, f);
    CHECK(form.dim_both == a);
    CHECK(form.dim_e_only == b);
    CHECK(form.dim_f_only == c);
    CHECK(form.dim_neither == d);
    CHECK(form.generic_pairs == static_cast<Index>(m));
    const auto [erec, frec] = two_projection_reconstruct(form);
    const Index n = e.size();
    CHECK((erec - e.matrix()).norm() <= 1e-9 * static_cast<double>(n));
    CHECK((frec - f.matrix()).norm() <= 1e-9 * static_cast<double>(n));
    // h^2 + k^2 = 1 pairwise.
    for (Index i = 0; i < form.generic_pairs; ++i)
      CHECK(form.h(i) * form.h(i) + form.k(i) * form.k(i) ==
            doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("halving oracle: E = F = diag(1,1,0,0)") {
  MatrixC e(4, 4);
  e.setZero();
  e(0, 0) = 1;
  e(1, 1) = 1;
  const ProjectionMatrix ep(e);
  const HalvedProjections h = halve_two_projections(ep, ep);
  CHECK(h.e1.rank() == 1);
  CHECK(h.e2.rank() == 1);
  CHECK(h.f1.rank() == 1);
  CHECK(h.f2.rank() == 1);
  CHECK((h.e1.matrix() + h.e2.matrix() - e).norm() < 1e-12);
  CHECK((h.f1.matrix() + h.f2.matrix() - e).norm() < 1e-12);
  // Crossing split: E1 F1 = 0 and E2 F2 = 0 despite E = F.
  CHECK((h.e1.matrix() * h.f1.matrix()).norm() < 1e-12);
  CHECK((h.e2.matrix() * h.f2.matrix()).norm() < 1e-12);
}

TEST_CASE("halving property: block models with even parts") {
  std::mt19937_64 g(37);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> ang(0.2, std::numbers::pi / 2.0 - 0.2);
    std::vector<double> angles = {ang(g), ang(g)};
    const auto [e, f] = block_model_pair(2, 2, 2, 2, angles, g);
    const Index n = e.size();
    const HalvedProjections h = halve_two_projections(e, f);
    const double bound = 1e-9 * static_cast<double>(n);
    CHECK((h.e1.matrix() + h.e2.matrix() - e.matrix()).norm() <= bound);
    CHECK((h.f1.matrix() + h.f2.matrix() - f.matrix()).norm() <= bound);
    CHECK((h.e1.matrix() * h.f1.matrix()).norm() <= bound);
    CHECK((h.e2.matrix() * h.f2.matrix()).norm() <= bound);
    CHECK(h.e1.rank() * 2 == e.rank());
    CHECK(h.f1.rank() * 2 == f.rank());
  }
}

TEST_CASE("halving parity errors name the offending part") {
  std::mt19937_64 g(38);
  // Odd generic multiplicity.
  const auto [e1, f1] = block_model_pair(0, 0, 0, 1, {0.7}, g);
  CHECK_THROWS_AS(halve_two_projections(e1, f1), ParityError);
  try {
    halve_two_projections(e1, f1);
  } catch (const ParityError& e) {
    CHECK(e.part == "generic");
  }

  // Odd intersection E ^ F.
  const auto [e2, f2] = block_model_pair(1, 0, 0, 1, {}, g);
  try {
    halve_two_projections(e2, f2);
  } catch (const ParityError& e) {
    CHECK(e.part == "E^F");
  }

  // Odd E ^ F-perp.
  const auto [e3, f3] = block_model_pair(0, 1, 0, 1, {}, g);
  try {
    halve_two_projections(e3, f3);
  } catch (const ParityError& e) {
    CHECK(e.part == "E^F-perp");
  }

  // Odd E-perp ^ F.
  const auto [e4, f4] = block_model_pair(0, 0, 1, 1, {}, g);
  try {
    halve_two_projections(e4, f4);
  } catch (const ParityError& e) {
    CHECK(e.part == "E-perp^F");
  }
}

}  // TEST_SUITE
