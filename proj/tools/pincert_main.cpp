// pincert command-line tool: builds, writes, and re-checks certificates for
// the pinching / projection-sum / averaging / majorization pipeline.

#include <cstdio>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "pincert/averaging.hpp"
#include "pincert/io.hpp"
#include "pincert/majorization.hpp"
#include "pincert/nilpotent.hpp"
#include "pincert/pinching.hpp"
#include "pincert/projection_sums.hpp"
#include "pincert/spectral.hpp"

namespace {

using namespace pincert;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

HermitianMatrix load_hermitian(const std::string& path, const Tolerance& tol) {
  const LoadedMatrix lm = parse_matrix(path);
  if (!lm.hermitian)
    throw StructureError(path + ": input matrix must be Hermitian for this command");
  return HermitianMatrix(lm.matrix, tol);
}

ProjectionMatrix load_projection(const std::string& path, const Tolerance& tol) {
  const LoadedMatrix lm = parse_matrix(path);
  Tolerance loose = tol;
  loose.abs_tol = std::max(tol.abs_tol, 1e-10 * static_cast<double>(lm.matrix.rows()));
  return ProjectionMatrix(lm.matrix, loose);
}

std::vector<Index> parse_blocks(const std::string& spec) {
  std::vector<Index> ranks;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw ValueError("--blocks: '" + item + "' is not an integer");
    }
    if (used != item.size() || v <= 0)
      throw ValueError("--blocks must be a comma-separated list of positive integers");
    ranks.push_back(v);
  }
  if (ranks.empty()) throw ValueError("--blocks: empty rank list");
  return ranks;
}

// Writes the certificate, reloads it, and re-checks it from scratch.
// Returns 0 when the reloaded file verifies, 2 otherwise.
int finish_certificate(const CertificateFile& file, const std::string& out,
                       const Tolerance& tol) {
  emit_certificate(file, out);
  const LoadResult reloaded = load_certificate(out);
  for (const std::string& w : reloaded.warnings) std::cout << "warning: " << w << "\n";
  const CertificateVerification v = verify_certificate(reloaded.file, tol);
  std::cout << "certificate (" << v.kind << ") written to " << out << "\n";
  if (!v.ok) {
    std::cout << "re-verification FAILED:\n";
    for (const std::string& note : v.notes) std::cout << "  " << note << "\n";
    return 2;
  }
  std::cout << "re-verification passed (" << v.notes.size() << " checks)\n";
  return 0;
}

std::vector<MatrixC> raw_members(const std::vector<UnitaryMatrix>& us) {
  std::vector<MatrixC> out;
  out.reserve(us.size());
  for (const UnitaryMatrix& u : us) out.push_back(u.matrix());
  return out;
}

MajorizationCertificate typed_majorization(const CertificateFile& f, const Tolerance& tol) {
  const auto* p = std::get_if<MajorizationFilePayload>(&f.payload);
  if (!p) throw SchemaError("expected a majorization certificate, got kind " + kind_name(f));
  MajorizationCertificate cert;
  cert.source = HermitianMatrix(p->source, tol);
  cert.target = HermitianMatrix(p->target, tol);
  cert.residual = p->residual;
  for (const MatrixC& u : p->unitaries) cert.unitaries.emplace_back(u, tol);
  return cert;
}

MajorizationFilePayload majorization_payload(const MajorizationCertificate& cert) {
  MajorizationFilePayload p;
  p.source = cert.source.matrix();
  p.target = cert.target.matrix();
  p.unitaries = raw_members(cert.unitaries);
  p.residual = cert.residual;
  return p;
}

int cmd_pinch(const std::string& input, const std::string& blocks, int max_sweeps,
              std::uint64_t seed, const std::string& out, const Tolerance& tol) {
  const HermitianMatrix x = load_hermitian(input, tol);
  const Index n = x.size();
  const double scale = 1.0 + x.matrix().norm();

  PinchingCertificate cert;
  if (blocks.empty()) {
    const ConstantDiagonalResult res = constant_diagonal_unitary(x, tol);
    cert = res.certificate;
    std::cout << "trace-constant pinching of " << input << " (n = " << n << ", tau = "
              << fmt(cert.target) << ") in " << res.rotations << " rotations\n";
  } else {
    const std::vector<Index> ranks = parse_blocks(blocks);
    cert = optimize_block_pinching(x, ranks, max_sweeps, 1e-8 * static_cast<double>(n) * scale,
                                   seed, tol);
    std::cout << "block pinching of " << input << " with " << ranks.size()
              << " blocks: residual " << fmt(cert.residual)
              << (cert.certified ? " (certified)" : " (NOT certified)") << "\n";
  }

  PinchingFilePayload p;
  p.x = x.matrix();
  p.basis = cert.basis.matrix();
  for (const ProjectionMatrix& e : cert.projections) p.ranks.push_back(e.rank());
  p.target = cert.target;
  p.residual = cert.residual;
  p.certified = cert.certified;
  p.complete = cert.complete;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_average(const std::vector<std::string>& inputs, long max_k, const std::string& out,
                const Tolerance& tol) {
  std::vector<MatrixC> raw;
  bool all_hermitian = true;
  for (const std::string& path : inputs) {
    const LoadedMatrix lm = parse_matrix(path);
    raw.push_back(lm.matrix);
    all_hermitian = all_hermitian && lm.hermitian;
  }

  std::vector<HermitianMatrix> certified;
  DixmierCertificate cert;
  if (all_hermitian) {
    for (const MatrixC& m : raw) certified.emplace_back(m, tol);
    cert = average_simultaneous(certified, tol, max_k);
  } else {
    std::cout << "non-Hermitian input detected; averaging the Hermitian parts X = H + iK\n";
    cert = average_simultaneous(raw, &certified, tol, max_k);
  }

  std::cout << "simultaneous averaging of " << certified.size() << " matrices with "
            << cert.unitaries.size() << " unitaries\n";
  for (std::size_t j = 0; j < certified.size(); ++j)
    std::cout << "  input " << j << ": target " << fmt(cert.targets[j]) << ", residual "
              << fmt(cert.residuals[j]) << "\n";

  DixmierFilePayload p;
  for (const HermitianMatrix& h : certified) p.inputs.push_back(h.matrix());
  p.unitaries = raw_members(cert.unitaries);
  p.targets = cert.targets;
  p.residuals = cert.residuals;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_decompose(const std::string& input, const std::string& out, const Tolerance& tol) {
  const HermitianMatrix a = load_hermitian(input, tol);
  const FeasibilityFlags flags = feasibility(a, tol);
  std::cout << "feasibility of " << input << ": integer_trace=" << flags.integer_trace
            << " tau_condition=" << flags.tau_condition << " fillmore=" << flags.fillmore
            << "\n";
  const ProjectionSumCertificate cert = fillmore_decompose(a, tol);
  std::cout << "decomposed into " << cert.count << " projections, sum residual "
            << fmt(cert.sum_residual) << "\n";

  ProjectionSumFilePayload p;
  p.a = a.matrix();
  for (const ProjectionMatrix& q : cert.projections) p.projections.push_back(q.matrix());
  p.sum_residual = cert.sum_residual;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_combine(const std::string& input, const std::string& out, const Tolerance& tol) {
  const HermitianMatrix a = load_hermitian(input, tol);
  const PositiveCombination comb = positive_combination(a, tol);
  std::cout << "positive combination of " << input << " with " << comb.coefficients.size()
            << " nested projections, residual " << fmt(comb.residual) << "\n";

  PositiveCombinationFilePayload p;
  p.a = a.matrix();
  p.coefficients = comb.coefficients;
  for (const ProjectionMatrix& q : comb.projections) p.projections.push_back(q.matrix());
  p.residual = comb.residual;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_nilpotent(const std::string& input, bool shift_trace, const std::string& out,
                  const Tolerance& tol) {
  HermitianMatrix x = load_hermitian(input, tol);
  if (shift_trace) {
    const double tau = x.trace_mean();
    const MatrixC shifted =
        x.matrix() - tau * MatrixC::Identity(x.size(), x.size());
    x = HermitianMatrix(shifted, tol);
    std::cout << "trace shifted: certifying X - tau(X) I with tau = " << fmt(tau) << "\n";
  }
  const NilpotentRealization nr = nilpotent_realization(x, tol);
  std::cout << "nilpotent realization: ||Z + Z* - X|| = " << fmt(nr.reconstruction_residual)
            << "\n";

  NilpotentFilePayload p;
  p.x = x.matrix();
  p.z = nr.z;
  p.basis = nr.basis.matrix();
  p.triangular = nr.triangular;
  p.reconstruction_residual = nr.reconstruction_residual;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_qpm(const std::string& b_path, const std::string& v_path, const std::string& out,
            const Tolerance& tol) {
  const HermitianMatrix b = load_hermitian(b_path, tol);
  const LoadedMatrix vm = parse_matrix(v_path);
  const PartialIsometry v(vm.matrix, tol);
  const QpmPair pair = build_q_pm(b, v, tol);
  std::cout << "q_- and q_+ built: ranks " << pair.q_minus.rank() << " and "
            << pair.q_plus.rank() << ", identity residual " << fmt(pair.identity_residual)
            << "\n";

  QpmFilePayload p;
  p.b = b.matrix();
  p.v = v.matrix();
  p.q_minus = pair.q_minus.matrix();
  p.q_plus = pair.q_plus.matrix();
  p.identity_residual = pair.identity_residual;
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int cmd_twoproj(const std::string& e_path, const std::string& f_path, bool halve,
                const std::string& out, const Tolerance& tol) {
  const ProjectionMatrix e = load_projection(e_path, tol);
  const ProjectionMatrix f = load_projection(f_path, tol);
  const TwoProjectionForm form = two_projection_form(e, f, tol);
  const auto [erec, frec] = two_projection_reconstruct(form);
  const double residual =
      std::max((erec - e.matrix()).norm(), (frec - f.matrix()).norm());
  std::cout << "two-projection form: dims (both, e-only, f-only, neither) = ("
            << form.dim_both << ", " << form.dim_e_only << ", " << form.dim_f_only << ", "
            << form.dim_neither << "), " << form.generic_pairs
            << " generic pairs, reconstruction residual " << fmt(residual) << "\n";

  TwoProjectionFilePayload p;
  p.e = e.matrix();
  p.f = f.matrix();
  p.basis = form.basis.matrix();
  p.dims = {form.dim_both, form.dim_e_only, form.dim_f_only, form.dim_neither,
            form.generic_pairs};
  p.angles = form.angles;
  p.h = form.h;
  p.k = form.k;
  p.reconstruction_residual = residual;
  if (halve) {
    const HalvedProjections halves = halve_two_projections(e, f, tol);
    p.halved = true;
    p.halves = {halves.e1.matrix(), halves.e2.matrix(), halves.f1.matrix(),
                halves.f2.matrix()};
    std::cout << "halving: rank(E1) = " << halves.e1.rank() << ", rank(F1) = "
              << halves.f1.rank() << ", E1 F1 = 0\n";
  }
  return finish_certificate(CertificateFile{kToolVersion, tol, std::move(p)}, out, tol);
}

int finish_majorization(const MajorizationCertificate& cert, const std::string& what,
                        const std::string& out, const Tolerance& tol) {
  std::cout << what << ": " << cert.unitaries.size() << " unitaries, residual "
            << fmt(cert.residual) << "\n";
  return finish_certificate(CertificateFile{kToolVersion, tol, majorization_payload(cert)},
                            out, tol);
}

int cmd_verify(const std::vector<std::string>& paths, bool batch, const Tolerance& tol) {
  struct Item {
    std::string path;
    std::vector<std::string> warnings;
    CertificateVerification verification;
    std::string load_error;
    int load_error_code = 0;
  };

  auto check_one = [&tol](const std::string& path) {
    Item item;
    item.path = path;
    try {
      const LoadResult lr = load_certificate(path);
      item.warnings = lr.warnings;
      item.verification = verify_certificate(lr.file, tol);
    } catch (const ParseError& e) {
      item.load_error = e.what();
      item.load_error_code = 3;
    } catch (const SchemaError& e) {
      item.load_error = e.what();
      item.load_error_code = 3;
    } catch (const ValueError& e) {
      item.load_error = e.what();
      item.load_error_code = 3;
    }
    return item;
  };

  std::vector<Item> items;
  if (batch && paths.size() > 1) {
    std::vector<std::future<Item>> futures;
    futures.reserve(paths.size());
    for (const std::string& path : paths)
      futures.push_back(std::async(std::launch::async, check_one, path));
    for (std::future<Item>& f : futures) items.push_back(f.get());
  } else {
    for (const std::string& path : paths) items.push_back(check_one(path));
  }

  int exit_code = 0;
  bool any_fail = false;
  for (const Item& item : items) {
    if (item.load_error_code != 0) {
      std::cout << item.path << ": LOAD ERROR: " << item.load_error << "\n";
      exit_code = 3;
      continue;
    }
    for (const std::string& w : item.warnings)
      std::cout << item.path << ": warning: " << w << "\n";
    std::cout << item.path << " (" << item.verification.kind << "): "
              << (item.verification.ok ? "VERIFIED" : "VERIFICATION FAILED") << "\n";
    for (const std::string& note : item.verification.notes)
      std::cout << "  " << note << "\n";
    if (!item.verification.ok) any_fail = true;
  }
  if (exit_code == 0 && any_fail) exit_code = 2;
  return exit_code;
}

int run(int argc, char** argv) {
  CLI::App app{"pincert: certificates for pinchings, projection sums, averaging, and "
               "majorization in M_n"};
  app.require_subcommand(1);
  app.fallthrough();

  double tol_abs = -1.0;
  std::uint64_t seed = 0;
  std::string out;
  long max_k = 100000;
  app.add_option("--tol", tol_abs, "absolute tolerance (default 1e-12)");
  app.add_option("--seed", seed, "seed for randomized searches (0 = deterministic warm start)");
  app.add_option("-o,--out", out, "output certificate path");
  app.add_option("--max-k", max_k, "cap on the averaging family size (default 100000)")
      ->check(CLI::PositiveNumber);

  // pinch
  auto* pinch = app.add_subcommand("pinch", "trace-constant or block pinching certificate");
  std::string pinch_input, pinch_blocks;
  int pinch_sweeps = 200;
  pinch->add_option("input", pinch_input, "Hermitian matrix file")->required();
  pinch->add_option("--blocks", pinch_blocks, "comma-separated block ranks (best effort)");
  pinch->add_option("--max-sweeps", pinch_sweeps, "optimizer sweep cap (with --blocks)");

  // average
  auto* average = app.add_subcommand("average", "simultaneous averaging to scalars");
  std::vector<std::string> average_inputs;
  average->add_option("inputs", average_inputs, "matrix files")->required()->expected(-1);

  // decompose
  auto* decompose = app.add_subcommand("decompose", "write A as a finite sum of projections");
  std::string decompose_input;
  decompose->add_option("input", decompose_input, "psd matrix file")->required();

  // combine
  auto* combine =
      app.add_subcommand("combine", "positive combination of nested projections");
  std::string combine_input;
  combine->add_option("input", combine_input, "psd matrix file")->required();

  // nilpotent
  auto* nilpotent = app.add_subcommand("nilpotent", "realize X = Z + Z* with Z^n = 0");
  std::string nilpotent_input;
  bool shift_trace = false;
  nilpotent->add_option("input", nilpotent_input, "traceless Hermitian matrix file")
      ->required();
  nilpotent->add_flag("--shift-trace", shift_trace, "subtract tau(X) I first");

  // qpm
  auto* qpm = app.add_subcommand("qpm", "build the idempotent pair q_- and q_+");
  std::string qpm_b, qpm_v;
  qpm->add_option("b", qpm_b, "psd contraction file")->required();
  qpm->add_option("v", qpm_v, "partial isometry file")->required();

  // twoproj
  auto* twoproj = app.add_subcommand("twoproj", "canonical form of a projection pair");
  std::string twoproj_e, twoproj_f;
  bool halve = false;
  twoproj->add_option("e", twoproj_e, "projection file")->required();
  twoproj->add_option("f", twoproj_f, "projection file")->required();
  twoproj->add_flag("--halve", halve, "also halve both projections with crossing halves");

  // majorize
  auto* majorize = app.add_subcommand("majorize", "unitary-average majorization certificates");
  majorize->require_subcommand(1);
  majorize->fallthrough();

  auto* mj_pinch = majorize->add_subcommand("pinch", "blockdiag(B) from B by sign unitaries");
  std::string mj_pinch_input, mj_pinch_blocks;
  mj_pinch->add_option("input", mj_pinch_input, "Hermitian matrix file")->required();
  mj_pinch->add_option("--blocks", mj_pinch_blocks, "comma-separated block ranks")->required();

  auto* mj_cyclic = majorize->add_subcommand("cyclic", "mean oplus ... from blockdiag(A_i)");
  std::vector<std::string> mj_cyclic_inputs;
  mj_cyclic->add_option("inputs", mj_cyclic_inputs, "equal-size Hermitian matrix files")
      ->required()
      ->expected(-1);

  auto* mj_corner = majorize->add_subcommand("corner", "(sum A_i) oplus 0 from blockdiag(A_i)");
  std::vector<std::string> mj_corner_inputs;
  mj_corner->add_option("inputs", mj_corner_inputs, "equal-size psd matrix files")
      ->required()
      ->expected(-1);

  auto* mj_scalar = majorize->add_subcommand("scalar", "tau(A) I from A");
  std::string mj_scalar_input;
  mj_scalar->add_option("input", mj_scalar_input, "Hermitian matrix file")->required();

  auto* mj_compose = majorize->add_subcommand("compose", "chain two certificates");
  std::string mj_compose_first, mj_compose_second;
  mj_compose->add_option("first", mj_compose_first, "certificate for A from B")->required();
  mj_compose->add_option("second", mj_compose_second, "certificate for B from C")->required();

  auto* mj_reduce = majorize->add_subcommand(
      "reduce", "corner reduction: drop a zero-padded block from a corner certificate");
  std::string mj_reduce_cert, mj_reduce_a;
  mj_reduce->add_option("certificate", mj_reduce_cert, "corner-sum certificate file")
      ->required();
  mj_reduce->add_option("a", mj_reduce_a, "the positive definite corner A")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "re-check certificate files from scratch");
  std::vector<std::string> verify_paths;
  bool batch = false;
  verify->add_option("certificates", verify_paths, "certificate files")
      ->required()
      ->expected(-1);
  verify->add_flag("--batch", batch, "check files concurrently");

  // bound
  auto* bound = app.add_subcommand("bound", "closed-form projection-count bounds");
  double bound_norm = -1.0, bound_invnorm = -1.0, bound_mu = -1.0;
  bound->add_option("--norm", bound_norm, "||A||");
  bound->add_option("--invnorm", bound_invnorm, "||A^{-1}||");
  bound->add_option("--mu", bound_mu, "mu with tau(A) = 1 + mu");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  Tolerance tol;
  if (tol_abs > 0.0) tol.abs_tol = tol_abs;

  try {
    if (app.got_subcommand(pinch)) {
      return cmd_pinch(pinch_input, pinch_blocks, pinch_sweeps, seed,
                       out.empty() ? "pinch.cert" : out, tol);
    }
    if (app.got_subcommand(average)) {
      return cmd_average(average_inputs, max_k, out.empty() ? "average.cert" : out, tol);
    }
    if (app.got_subcommand(decompose)) {
      return cmd_decompose(decompose_input, out.empty() ? "decompose.cert" : out, tol);
    }
    if (app.got_subcommand(combine)) {
      return cmd_combine(combine_input, out.empty() ? "combine.cert" : out, tol);
    }
    if (app.got_subcommand(nilpotent)) {
      return cmd_nilpotent(nilpotent_input, shift_trace, out.empty() ? "nilpotent.cert" : out,
                           tol);
    }
    if (app.got_subcommand(qpm)) {
      return cmd_qpm(qpm_b, qpm_v, out.empty() ? "qpm.cert" : out, tol);
    }
    if (app.got_subcommand(twoproj)) {
      return cmd_twoproj(twoproj_e, twoproj_f, halve, out.empty() ? "twoproj.cert" : out, tol);
    }
    if (app.got_subcommand(majorize)) {
      const std::string mout = out.empty() ? "majorize.cert" : out;
      if (majorize->got_subcommand(mj_pinch)) {
        const HermitianMatrix b = load_hermitian(mj_pinch_input, tol);
        const BlockPartition part(parse_blocks(mj_pinch_blocks));
        return finish_majorization(sign_pinch_certificate(b, part, tol),
                                   "sign-unitary pinching", mout, tol);
      }
      if (majorize->got_subcommand(mj_cyclic)) {
        std::vector<HermitianMatrix> blocks;
        for (const std::string& path : mj_cyclic_inputs)
          blocks.push_back(load_hermitian(path, tol));
        return finish_majorization(cyclic_mean_certificate(blocks, tol), "cyclic mean", mout,
                                   tol);
      }
      if (majorize->got_subcommand(mj_corner)) {
        std::vector<HermitianMatrix> blocks;
        for (const std::string& path : mj_corner_inputs)
          blocks.push_back(load_hermitian(path, tol));
        return finish_majorization(corner_sum_certificate(blocks, tol), "corner sum", mout,
                                   tol);
      }
      if (majorize->got_subcommand(mj_scalar)) {
        const HermitianMatrix a = load_hermitian(mj_scalar_input, tol);
        return finish_majorization(tau_scalar_certificate(a, tol), "scalar average", mout,
                                   tol);
      }
      if (majorize->got_subcommand(mj_compose)) {
        const MajorizationCertificate first =
            typed_majorization(load_certificate(mj_compose_first).file, tol);
        const MajorizationCertificate second =
            typed_majorization(load_certificate(mj_compose_second).file, tol);
        return finish_majorization(compose_certificates(first, second, tol), "composition",
                                   mout, tol);
      }
      if (majorize->got_subcommand(mj_reduce)) {
        const MajorizationCertificate cert =
            typed_majorization(load_certificate(mj_reduce_cert).file, tol);
        const HermitianMatrix a = load_hermitian(mj_reduce_a, tol);
        return finish_majorization(corner_reduction(cert, a, tol), "corner reduction", mout,
                                   tol);
      }
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(verify_paths, batch, tol);
    }
    if (app.got_subcommand(bound)) {
      bool did = false;
      if (bound_norm > 0.0 || bound_invnorm > 0.0) {
        if (bound_norm <= 0.0 || bound_invnorm <= 0.0)
          throw ValueError("bound: --norm and --invnorm must be given together");
        std::cout << "gp_bound(" << fmt(bound_norm) << ", " << fmt(bound_invnorm)
                  << ") = " << gp_bound(bound_norm, bound_invnorm) << " projections\n";
        did = true;
      }
      if (bound_mu > 0.0) {
        std::cout << "mu_bound(" << fmt(bound_mu) << ") = " << mu_bound(bound_mu)
                  << " projections\n";
        did = true;
      }
      if (!did) throw ValueError("bound: give --norm with --invnorm, and/or --mu");
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    // Infeasible inputs and violated preconditions.
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 3;  // unreachable: require_subcommand guarantees a dispatch above
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
