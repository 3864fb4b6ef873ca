#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pincert/averaging.hpp"
#include "pincert/io.hpp"
#include "pincert/majorization.hpp"
#include "pincert/nilpotent.hpp"
#include "pincert/pinching.hpp"
#include "pincert/projection_sums.hpp"
#include "test_helpers.hpp"

using namespace pincert;
using namespace pincert::testing;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "pincert_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string path_for(const std::string& leaf) { return (work_dir() / leaf).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// Replaces the first line starting with `prefix` by `line`.
std::string replace_line(const std::string& text, const std::string& prefix,
                         const std::string& line) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string current;
  bool done = false;
  while (std::getline(in, current)) {
    if (!done && current.rfind(prefix, 0) == 0) {
      out << line << '\n';
      done = true;
    } else {
      out << current << '\n';
    }
  }
  REQUIRE(done);
  return out.str();
}

std::vector<MatrixC> raw(const std::vector<UnitaryMatrix>& us) {
  std::vector<MatrixC> out;
  for (const UnitaryMatrix& u : us) out.push_back(u.matrix());
  return out;
}

std::vector<MatrixC> raw(const std::vector<ProjectionMatrix>& ps) {
  std::vector<MatrixC> out;
  for (const ProjectionMatrix& p : ps) out.push_back(p.matrix());
  return out;
}

// Emits, loads (expecting a clean load), re-emits, and requires byte-identical
// files plus a passing verification.
void round_trip_and_verify(const CertificateFile& file, const std::string& leaf) {
  const std::string first = path_for(leaf + ".cert");
  const std::string second = path_for(leaf + "_again.cert");
  emit_certificate(file, first);
  const LoadResult loaded = load_certificate(first);
  CHECK(loaded.warnings.empty());
  CHECK(kind_name(loaded.file) == kind_name(file));
  emit_certificate(loaded.file, second);
  CHECK(slurp(first) == slurp(second));
  const CertificateVerification v = verify_certificate(loaded.file);
  if (!v.ok)
    for (const std::string& note : v.notes) MESSAGE(note);
  CHECK(v.ok);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix files round trip exactly") {
  std::mt19937_64 g(71);
  const MatrixC m = random_matrix(3, g);
  const std::string path = path_for("general.mat");
  write_matrix(path, m, "sample");
  const LoadedMatrix back = parse_matrix(path);
  CHECK(back.matrix.rows() == 3);
  CHECK((back.matrix - m).norm() == 0.0);  // 17 digits reproduce doubles
  CHECK(back.name == "sample");
  CHECK(!back.hermitian);

  const HermitianMatrix h = random_hermitian(4, g);
  const std::string hpath = path_for("hermitian.mat");
  write_matrix(hpath, h.matrix());
  const LoadedMatrix hback = parse_matrix(hpath);
  CHECK(hback.hermitian);
  CHECK((hback.matrix - h.matrix()).norm() == 0.0);
}

TEST_CASE("malformed matrix files raise parse errors") {
  const std::string good = path_for("mangle.mat");
  write_matrix(good, MatrixC(MatrixC::Identity(2, 2)));
  const std::string text = slurp(good);

  const std::string truncated = path_for("truncated.mat");
  spit(truncated, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(parse_matrix(truncated), ParseError);

  const std::string badheader = path_for("badheader.mat");
  spit(badheader, "pincert-matrix v2\n" + text.substr(text.find('\n') + 1));
  CHECK_THROWS_AS(parse_matrix(badheader), ParseError);

  const std::string badtoken = path_for("badtoken.mat");
  spit(badtoken, replace_line(text, "1 0", "1 zebra"));
  CHECK_THROWS_AS(parse_matrix(badtoken), ParseError);

  const std::string nonfinite = path_for("nonfinite.mat");
  spit(nonfinite, replace_line(text, "1 0", "nan 0"));
  CHECK_THROWS_AS(parse_matrix(nonfinite), ValueError);

  CHECK_THROWS_AS(parse_matrix(path_for("missing.mat")), ParseError);
}

TEST_CASE("pinching certificates round trip") {
  std::mt19937_64 g(72);
  const HermitianMatrix x = random_hermitian(4, g);
  const ConstantDiagonalResult r = constant_diagonal_unitary(x);
  PinchingFilePayload p;
  p.x = x.matrix();
  p.basis = r.basis.matrix();
  for (const ProjectionMatrix& e : r.certificate.projections) p.ranks.push_back(e.rank());
  p.target = r.certificate.target;
  p.residual = r.certificate.residual;
  p.certified = r.certificate.certified;
  p.complete = r.certificate.complete;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "pinching");
}

TEST_CASE("dixmier certificates round trip") {
  std::mt19937_64 g(73);
  const std::vector<HermitianMatrix> xs = {random_hermitian(2, g), random_hermitian(2, g)};
  const DixmierCertificate cert = average_simultaneous(xs);
  DixmierFilePayload p;
  p.inputs = {xs[0].matrix(), xs[1].matrix()};
  p.unitaries = raw(cert.unitaries);
  p.targets = cert.targets;
  p.residuals = cert.residuals;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "dixmier");
}

TEST_CASE("projection sum certificates round trip") {
  MatrixC a(2, 2);
  a.setZero();
  a(0, 0) = 1.5;
  a(1, 1) = 0.5;
  const ProjectionSumCertificate cert = fillmore_decompose(HermitianMatrix(a));
  ProjectionSumFilePayload p;
  p.a = a;
  p.projections = raw(cert.projections);
  p.sum_residual = cert.sum_residual;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "projection_sum");
}

TEST_CASE("positive combination certificates round trip") {
  MatrixC a(2, 2);
  a.setZero();
  a(0, 0) = 3;
  a(1, 1) = 1;
  const PositiveCombination comb = positive_combination(HermitianMatrix(a));
  PositiveCombinationFilePayload p;
  p.a = a;
  p.coefficients = comb.coefficients;
  p.projections = raw(comb.projections);
  p.residual = comb.residual;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "combination");
}

TEST_CASE("nilpotent certificates round trip") {
  MatrixC x(2, 2);
  x << 0, 1, 1, 0;
  const NilpotentRealization r = nilpotent_realization(HermitianMatrix(x));
  NilpotentFilePayload p;
  p.x = x;
  p.z = r.z;
  p.basis = r.basis.matrix();
  p.triangular = r.triangular;
  p.reconstruction_residual = r.reconstruction_residual;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "nilpotent");
}

TEST_CASE("majorization certificates round trip") {
  MatrixC b(2, 2);
  b.setZero();
  b(0, 0) = 1;
  b(1, 1) = -1;
  const MajorizationCertificate cert = tau_scalar_certificate(HermitianMatrix(b));
  MajorizationFilePayload p;
  p.source = cert.source.matrix();
  p.target = cert.target.matrix();
  p.unitaries = raw(cert.unitaries);
  p.residual = cert.residual;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "majorization");
}

TEST_CASE("two projection certificates round trip, plain and halved") {
  const double theta = std::numbers::pi / 3.0;
  const double c = std::cos(theta), s = std::sin(theta);
  MatrixC e(2, 2), f(2, 2);
  e.setZero();
  e(0, 0) = 1;
  f << c * c, c * s, c * s, s * s;
  const TwoProjectionForm form =
      two_projection_form(ProjectionMatrix(e), ProjectionMatrix(f));
  const auto [erec, frec] = two_projection_reconstruct(form);
  TwoProjectionFilePayload p;
  p.e = e;
  p.f = f;
  p.basis = form.basis.matrix();
  p.dims = {form.dim_both, form.dim_e_only, form.dim_f_only, form.dim_neither,
            form.generic_pairs};
  p.angles = form.angles;
  p.h = form.h;
  p.k = form.k;
  p.reconstruction_residual =
      std::max((erec - e).norm(), (frec - f).norm());
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "twoproj");

  // Halved variant: E = F = diag(1,1,0,0).
  MatrixC e4 = MatrixC::Zero(4, 4);
  e4(0, 0) = 1;
  e4(1, 1) = 1;
  const ProjectionMatrix ep(e4);
  const TwoProjectionForm form4 = two_projection_form(ep, ep);
  const auto [erec4, frec4] = two_projection_reconstruct(form4);
  const HalvedProjections h = halve_two_projections(ep, ep);
  TwoProjectionFilePayload q;
  q.e = e4;
  q.f = e4;
  q.basis = form4.basis.matrix();
  q.dims = {form4.dim_both, form4.dim_e_only, form4.dim_f_only, form4.dim_neither,
            form4.generic_pairs};
  q.angles = form4.angles;
  q.h = form4.h;
  q.k = form4.k;
  q.reconstruction_residual = std::max((erec4 - e4).norm(), (frec4 - e4).norm());
  q.halved = true;
  q.halves = {h.e1.matrix(), h.e2.matrix(), h.f1.matrix(), h.f2.matrix()};
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, q}, "twoproj_halved");
}

TEST_CASE("q_pm certificates round trip") {
  MatrixC b = MatrixC::Zero(2, 2);
  b(0, 0) = 0.5;
  MatrixC vm(2, 2);
  vm << 0, 0, 1, 0;
  const QpmPair pair = build_q_pm(HermitianMatrix(b), PartialIsometry(vm));
  QpmFilePayload p;
  p.b = b;
  p.v = vm;
  p.q_minus = pair.q_minus.matrix();
  p.q_plus = pair.q_plus.matrix();
  p.identity_residual = pair.identity_residual;
  round_trip_and_verify(CertificateFile{kToolVersion, Tolerance{}, p}, "qpm");
}

TEST_CASE("tolerance records round trip") {
  MatrixC b(2, 2);
  b.setZero();
  b(0, 0) = 1;
  b(1, 1) = -1;
  const MajorizationCertificate cert = tau_scalar_certificate(HermitianMatrix(b));
  MajorizationFilePayload p;
  p.source = cert.source.matrix();
  p.target = cert.target.matrix();
  p.unitaries = raw(cert.unitaries);
  p.residual = cert.residual;
  Tolerance tol;
  tol.abs_tol = 1e-9;
  tol.rel_scale = 2e-9;
  tol.rank_cutoff = 3e-7;
  const std::string path = path_for("tolerance.cert");
  emit_certificate(CertificateFile{kToolVersion, tol, p}, path);
  const LoadResult loaded = load_certificate(path);
  CHECK(loaded.file.tolerance.abs_tol == 1e-9);
  CHECK(loaded.file.tolerance.rel_scale == 2e-9);
  CHECK(loaded.file.tolerance.rank_cutoff == 3e-7);
  CHECK(loaded.file.tool_version == std::string(kToolVersion));
}

TEST_CASE("edited residuals are overridden with a warning") {
  MatrixC b(2, 2);
  b.setZero();
  b(0, 0) = 1;
  b(1, 1) = -1;
  const MajorizationCertificate cert = tau_scalar_certificate(HermitianMatrix(b));
  MajorizationFilePayload p;
  p.source = cert.source.matrix();
  p.target = cert.target.matrix();
  p.unitaries = raw(cert.unitaries);
  p.residual = cert.residual;
  const std::string path = path_for("edited.cert");
  emit_certificate(CertificateFile{kToolVersion, Tolerance{}, p}, path);
  spit(path, replace_line(slurp(path), "scalar residual", "scalar residual 999"));
  const LoadResult loaded = load_certificate(path);
  CHECK(!loaded.warnings.empty());
  const auto& mp = std::get<MajorizationFilePayload>(loaded.file.payload);
  CHECK(mp.residual <= 1e-10);  // recomputed, not the stored lie
}

TEST_CASE("corrupted certificates load but fail verification") {
  std::mt19937_64 g(74);
  const HermitianMatrix x = random_hermitian(3, g);
  const DixmierCertificate cert = average_single(x);
  DixmierFilePayload p;
  p.inputs = {x.matrix()};
  p.unitaries = raw(cert.unitaries);
  p.unitaries[0] *= 2.0;  // no longer unitary
  p.targets = cert.targets;
  p.residuals = cert.residuals;
  const std::string path = path_for("corrupt.cert");
  emit_certificate(CertificateFile{kToolVersion, Tolerance{}, p}, path);
  const LoadResult loaded = load_certificate(path);  // lenient: parses fine
  const CertificateVerification v = verify_certificate(loaded.file);
  CHECK(!v.ok);
  CHECK(v.kind == "dixmier");
  CHECK(!v.notes.empty());
}

TEST_CASE("unknown kinds and truncated certificates are rejected") {
  MatrixC b(2, 2);
  b.setZero();
  b(0, 0) = 1;
  b(1, 1) = -1;
  const MajorizationCertificate cert = tau_scalar_certificate(HermitianMatrix(b));
  MajorizationFilePayload p;
  p.source = cert.source.matrix();
  p.target = cert.target.matrix();
  p.unitaries = raw(cert.unitaries);
  p.residual = cert.residual;
  const std::string path = path_for("mutant.cert");
  emit_certificate(CertificateFile{kToolVersion, Tolerance{}, p}, path);
  const std::string text = slurp(path);

  const std::string unknown = path_for("unknown.cert");
  spit(unknown, replace_line(text, "kind ", "kind banana"));
  CHECK_THROWS_AS(load_certificate(unknown), SchemaError);

  const std::string shortfile = path_for("short.cert");
  spit(shortfile, text.substr(0, text.size() * 2 / 3));
  CHECK_THROWS_AS(load_certificate(shortfile), ParseError);

  const std::string trailing = path_for("trailing.cert");
  spit(trailing, text + "surplus content\n");
  CHECK_THROWS_AS(load_certificate(trailing), ParseError);
}

}  // TEST_SUITE
