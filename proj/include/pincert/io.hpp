#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pincert/types.hpp"

namespace pincert {

inline constexpr const char* kToolVersion = "pincert 1.0.0";

// ---------------------------------------------------------------------------
// Matrix files
// ---------------------------------------------------------------------------

struct LoadedMatrix {
  MatrixC matrix;
  bool hermitian = false;  // auto-detected on load
  std::string name;        // optional metadata
  long seed = -1;          // optional metadata, -1 when absent
};

// Reads a `pincert-matrix v1` file. Malformed files raise ParseError with the
// offending line; non-finite entries raise ValueError.
LoadedMatrix parse_matrix(const std::string& path);

// Writes a matrix file (17 significant digits, byte-deterministic).
void write_matrix(const std::string& path, const MatrixC& m, const std::string& name = "");

// ---------------------------------------------------------------------------
// Certificate files: one struct per kind, raw matrices only. Structural
// validation (unitarity, idempotency, ...) belongs to verify_certificate so
// that a corrupted certificate loads fine and *fails verification* rather
// than failing to parse.
// ---------------------------------------------------------------------------

struct PinchingFilePayload {
  MatrixC x;
  MatrixC basis;
  std::vector<Index> ranks;
  double target = 0.0;
  double residual = 0.0;
  bool certified = true;
  bool complete = true;
};

struct DixmierFilePayload {
  std::vector<MatrixC> inputs;
  std::vector<MatrixC> unitaries;
  std::vector<double> targets;
  std::vector<double> residuals;
};

struct ProjectionSumFilePayload {
  MatrixC a;
  std::vector<MatrixC> projections;
  double sum_residual = 0.0;
};

struct PositiveCombinationFilePayload {
  MatrixC a;
  std::vector<double> coefficients;
  std::vector<MatrixC> projections;
  double residual = 0.0;
};

struct NilpotentFilePayload {
  MatrixC x;
  MatrixC z;
  MatrixC basis;
  MatrixC triangular;
  double reconstruction_residual = 0.0;
};

struct MajorizationFilePayload {
  MatrixC source;
  MatrixC target;
  std::vector<MatrixC> unitaries;
  double residual = 0.0;
};

struct TwoProjectionFilePayload {
  MatrixC e;
  MatrixC f;
  MatrixC basis;
  std::vector<Index> dims;  // dim(E^F), dim(E^F-perp), dim(E-perp^F), dim neither, generic pairs
  VectorR angles;
  VectorR h;
  VectorR k;
  double reconstruction_residual = 0.0;
  bool halved = false;
  std::vector<MatrixC> halves;  // E1, E2, F1, F2 when halved
};

struct QpmFilePayload {
  MatrixC b;
  MatrixC v;
  MatrixC q_minus;
  MatrixC q_plus;
  double identity_residual = 0.0;
};

using CertificatePayload =
    std::variant<PinchingFilePayload, DixmierFilePayload, ProjectionSumFilePayload,
                 PositiveCombinationFilePayload, NilpotentFilePayload, MajorizationFilePayload,
                 TwoProjectionFilePayload, QpmFilePayload>;

struct CertificateFile {
  std::string tool_version = kToolVersion;
  Tolerance tolerance;
  CertificatePayload payload;
};

// "pinching", "dixmier", "projection_sum", "positive_combination",
// "nilpotent", "majorization", "two_projection", "q_pm".
std::string kind_name(const CertificateFile& file);

// Serializes with 17 significant digits; identical values give identical
// bytes. SchemaError when the payload is internally inconsistent.
void emit_certificate(const CertificateFile& file, const std::string& path);

struct LoadResult {
  CertificateFile file;
  std::vector<std::string> warnings;  // e.g. stored residual overridden
};

// Parses a certificate file; recomputes every residual and overrides stored
// values that disagree (warning recorded). Unknown kinds raise SchemaError,
// malformed or truncated content ParseError, non-finite numbers ValueError.
LoadResult load_certificate(const std::string& path);

struct CertificateVerification {
  bool ok = false;
  std::string kind;
  std::vector<std::string> notes;  // human-readable check lines
};

// Re-checks the mathematical content of a certificate from scratch:
// structural invariants of every matrix plus the kind-specific identities
// and residual bounds. Never throws on corrupted content; reports ok=false.
CertificateVerification verify_certificate(const CertificateFile& file,
                                           const Tolerance& tol = Tolerance{});

}  // namespace pincert
