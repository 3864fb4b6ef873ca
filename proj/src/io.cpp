#include "pincert/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pincert/averaging.hpp"
#include "pincert/majorization.hpp"
#include "pincert/pinching.hpp"
#include "pincert/projection_sums.hpp"
#include "pincert/spectral.hpp"

namespace pincert {

namespace {

constexpr Index kMaxDim = 4096;
constexpr std::size_t kMaxCount = 1000000;

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Emitter {
 public:
  void raw(const std::string& s) { out_ += s + "\n"; }

  void scalar(const std::string& name, double v) { raw("scalar " + name + " " + fmt(v)); }
  void integer(const std::string& name, long v) { raw("int " + name + " " + std::to_string(v)); }
  void boolean(const std::string& name, bool v) {
    raw("bool " + name + std::string(v ? " 1" : " 0"));
  }

  void ints(const std::string& name, const std::vector<Index>& v) {
    std::string line = "ints " + name + " " + std::to_string(v.size());
    for (Index x : v) line += " " + std::to_string(x);
    raw(line);
  }

  void vector(const std::string& name, const VectorR& v) {
    std::string line = "vector " + name + " " + std::to_string(v.size());
    for (Index k = 0; k < v.size(); ++k) line += " " + fmt(v(k));
    raw(line);
  }

  void vector(const std::string& name, const std::vector<double>& v) {
    std::string line = "vector " + name + " " + std::to_string(v.size());
    for (double x : v) line += " " + fmt(x);
    raw(line);
  }

  void matrix(const std::string& name, const MatrixC& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw SchemaError("emit: matrix '" + name + "' is not square and nonempty");
    const Index n = m.rows();
    raw("matrix " + name + " " + std::to_string(n));
    for (Index r = 0; r < n; ++r) {
      std::string line;
      for (Index c = 0; c < n; ++c) {
        if (c) line += " ";
        line += fmt(m(r, c).real());
      }
      raw(line);
    }
    for (Index r = 0; r < n; ++r) {
      std::string line;
      for (Index c = 0; c < n; ++c) {
        if (c) line += " ";
        line += fmt(m(r, c).imag());
      }
      raw(line);
    }
  }

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValueError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw ValueError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  bool eof() const { return pos_ >= lines_.size(); }
  int line_number() const { return static_cast<int>(pos_); }  // 0 before first next()

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path_ + ": " + msg, static_cast<int>(pos_));
  }

  std::vector<std::string> next() {
    while (pos_ < lines_.size()) {
      const std::string& line = lines_[pos_++];
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string t;
      while (ss >> t) tokens.push_back(t);
      if (!tokens.empty()) return tokens;
    }
    throw ParseError(path_ + ": unexpected end of file", static_cast<int>(pos_));
  }

  double number(const std::string& tok) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) fail("trailing characters in number '" + tok + "'");
    if (!std::isfinite(v))
      throw ValueError(path_ + ": non-finite value '" + tok + "' (line " +
                       std::to_string(pos_) + ")");
    return v;
  }

  long integer(const std::string& tok) const {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) fail("trailing characters in integer '" + tok + "'");
    return v;
  }

 private:
  std::string path_;
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

struct Entry {
  std::string key;   // "scalar", "int", "ints", "vector", "bool", "matrix", ...
  std::string name;  // second token
  std::vector<std::string> rest;
};

Entry read_entry(Reader& r) {
  const std::vector<std::string> tokens = r.next();
  Entry e;
  e.key = tokens[0];
  if (tokens.size() > 1) e.name = tokens[1];
  e.rest.assign(tokens.begin() + (tokens.size() > 1 ? 2 : 1), tokens.end());
  return e;
}

void expect(const Entry& e, const std::string& key, const std::string& name, Reader& r) {
  if (e.key != key || e.name != name)
    r.fail("expected '" + key + " " + name + "', got '" + e.key + " " + e.name + "'");
}

double read_scalar(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "scalar", name, r);
  if (e.rest.size() != 1) r.fail("scalar '" + name + "' needs exactly one value");
  return r.number(e.rest[0]);
}

long read_int(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "int", name, r);
  if (e.rest.size() != 1) r.fail("int '" + name + "' needs exactly one value");
  return r.integer(e.rest[0]);
}

bool read_bool(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "bool", name, r);
  if (e.rest.size() != 1 || (e.rest[0] != "0" && e.rest[0] != "1"))
    r.fail("bool '" + name + "' needs a single 0/1 value");
  return e.rest[0] == "1";
}

std::vector<Index> read_ints(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "ints", name, r);
  if (e.rest.empty()) r.fail("ints '" + name + "' needs a count");
  const long k = r.integer(e.rest[0]);
  if (k < 0 || static_cast<std::size_t>(k) > kMaxCount || e.rest.size() != 1 + static_cast<std::size_t>(k))
    r.fail("ints '" + name + "' count does not match the values present");
  std::vector<Index> out;
  for (long i = 0; i < k; ++i) out.push_back(r.integer(e.rest[1 + static_cast<std::size_t>(i)]));
  return out;
}

VectorR read_vector(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "vector", name, r);
  if (e.rest.empty()) r.fail("vector '" + name + "' needs a count");
  const long k = r.integer(e.rest[0]);
  if (k < 0 || static_cast<std::size_t>(k) > kMaxCount || e.rest.size() != 1 + static_cast<std::size_t>(k))
    r.fail("vector '" + name + "' count does not match the values present");
  VectorR out(k);
  for (long i = 0; i < k; ++i) out(i) = r.number(e.rest[1 + static_cast<std::size_t>(i)]);
  return out;
}

MatrixC read_matrix_block(Reader& r, const std::string& name) {
  const Entry e = read_entry(r);
  expect(e, "matrix", name, r);
  if (e.rest.size() != 1) r.fail("matrix '" + name + "' needs a dimension");
  const long n = r.integer(e.rest[0]);
  if (n < 1 || n > kMaxDim) r.fail("matrix '" + name + "' has unreasonable dimension");
  MatrixC m(n, n);
  for (int part = 0; part < 2; ++part) {
    for (long row = 0; row < n; ++row) {
      const std::vector<std::string> tokens = r.next();
      if (tokens.size() != static_cast<std::size_t>(n))
        r.fail("matrix '" + name + "' row has " + std::to_string(tokens.size()) +
               " values, expected " + std::to_string(n));
      for (long col = 0; col < n; ++col) {
        const double v = r.number(tokens[static_cast<std::size_t>(col)]);
        if (part == 0)
          m(row, col) = Complex(v, 0.0);
        else
          m(row, col).imag(v);  // setter keeps a signed-zero real part intact
      }
    }
  }
  return m;
}

std::vector<MatrixC> read_matrix_list(Reader& r, const std::string& count_name,
                                      const std::string& prefix) {
  const long k = read_int(r, count_name);
  if (k < 0 || static_cast<std::size_t>(k) > kMaxCount)
    r.fail("'" + count_name + "' has unreasonable count");
  std::vector<MatrixC> out;
  out.reserve(static_cast<std::size_t>(k));
  for (long i = 0; i < k; ++i) out.push_back(read_matrix_block(r, prefix + std::to_string(i)));
  return out;
}

void emit_matrix_list(Emitter& em, const std::string& count_name, const std::string& prefix,
                      const std::vector<MatrixC>& ms) {
  em.integer(count_name, static_cast<long>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) em.matrix(prefix + std::to_string(i), ms[i]);
}

// ---------------------------------------------------------------------------
// Residual recomputation (raw arithmetic; shared by load and verify)
// ---------------------------------------------------------------------------

double conjugate_average_residual(const MatrixC& target, const MatrixC& source,
                                  const std::vector<MatrixC>& unitaries) {
  MatrixC sum = MatrixC::Zero(source.rows(), source.cols());
  for (const MatrixC& u : unitaries) sum += u.adjoint() * source * u;
  sum /= static_cast<double>(unitaries.size());
  return (sum - target).norm();
}

double pinching_residual(const PinchingFilePayload& p) {
  const MatrixC y = p.basis.adjoint() * p.x * p.basis;
  double worst = 0.0;
  Index off = 0;
  for (Index w : p.ranks) {
    const MatrixC block =
        y.block(off, off, w, w) - p.target * MatrixC::Identity(w, w);
    worst = std::max(worst, block.norm());
    off += w;
  }
  return worst;
}

void two_projection_blocks(const TwoProjectionFilePayload& p, MatrixC& eb, MatrixC& fb) {
  const Index n = p.basis.rows();
  const Index a = p.dims[0];
  const Index b = p.dims[1];
  const Index c = p.dims[2];
  const Index d = p.dims[3];
  const Index m = p.dims[4];
  const Index ou = a + b + c + d;
  const Index ow = ou + m;
  eb = MatrixC::Zero(n, n);
  fb = MatrixC::Zero(n, n);
  for (Index k = 0; k < a; ++k) {
    eb(k, k) = 1.0;
    fb(k, k) = 1.0;
  }
  for (Index k = 0; k < b; ++k) eb(a + k, a + k) = 1.0;
  for (Index k = 0; k < c; ++k) fb(a + b + k, a + b + k) = 1.0;
  for (Index i = 0; i < m; ++i) {
    const double h = p.h(i);
    const double s = p.k(i);
    eb(ou + i, ou + i) = 1.0;
    fb(ou + i, ou + i) = h * h;
    fb(ou + i, ow + i) = h * s;
    fb(ow + i, ou + i) = h * s;
    fb(ow + i, ow + i) = s * s;
  }
}

double two_projection_residual(const TwoProjectionFilePayload& p) {
  MatrixC eb, fb;
  two_projection_blocks(p, eb, fb);
  const MatrixC erec = p.basis * eb * p.basis.adjoint();
  const MatrixC frec = p.basis * fb * p.basis.adjoint();
  return std::max((erec - p.e).norm(), (frec - p.f).norm());
}

double qpm_residual(const QpmFilePayload& p, const Tolerance& tol) {
  const EigResult eig = hermitian_eig(HermitianMatrix(p.b, tol), tol);
  const double bnorm = std::max(eig.values(p.b.rows() - 1), 1e-300);
  const MatrixC eprime = p.v * p.v.adjoint();
  const MatrixC rhs =
      (2.0 / bnorm) * p.b + 2.0 * eprime - (2.0 / bnorm) * (p.v * p.b * p.v.adjoint());
  return (p.q_minus + p.q_plus - rhs).norm();
}

void recompute_residuals(CertificatePayload& payload, const Tolerance& tol,
                         std::vector<std::pair<std::string, std::pair<double*, double>>>& out) {
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PinchingFilePayload>) {
          out.push_back({"residual", {&p.residual, pinching_residual(p)}});
        } else if constexpr (std::is_same_v<T, DixmierFilePayload>) {
          for (std::size_t j = 0; j < p.inputs.size(); ++j) {
            const MatrixC target =
                p.targets[j] * MatrixC::Identity(p.inputs[j].rows(), p.inputs[j].cols());
            out.push_back({"residuals[" + std::to_string(j) + "]",
                           {&p.residuals[j],
                            conjugate_average_residual(target, p.inputs[j], p.unitaries)}});
          }
        } else if constexpr (std::is_same_v<T, ProjectionSumFilePayload>) {
          MatrixC sum = MatrixC::Zero(p.a.rows(), p.a.cols());
          for (const MatrixC& q : p.projections) sum += q;
          out.push_back({"sum_residual", {&p.sum_residual, (sum - p.a).norm()}});
        } else if constexpr (std::is_same_v<T, PositiveCombinationFilePayload>) {
          MatrixC sum = MatrixC::Zero(p.a.rows(), p.a.cols());
          for (std::size_t i = 0; i < p.projections.size(); ++i)
            sum += p.coefficients[i] * p.projections[i];
          out.push_back({"residual", {&p.residual, (sum - p.a).norm()}});
        } else if constexpr (std::is_same_v<T, NilpotentFilePayload>) {
          out.push_back({"reconstruction_residual",
                         {&p.reconstruction_residual,
                          (p.z + p.z.adjoint().eval() - p.x).norm()}});
        } else if constexpr (std::is_same_v<T, MajorizationFilePayload>) {
          out.push_back(
              {"residual", {&p.residual, conjugate_average_residual(p.target, p.source,
                                                                    p.unitaries)}});
        } else if constexpr (std::is_same_v<T, TwoProjectionFilePayload>) {
          out.push_back({"reconstruction_residual",
                         {&p.reconstruction_residual, two_projection_residual(p)}});
        } else if constexpr (std::is_same_v<T, QpmFilePayload>) {
          out.push_back({"identity_residual", {&p.identity_residual, qpm_residual(p, tol)}});
        }
      },
      payload);
}

// ---------------------------------------------------------------------------
// Schema validation shared by emit and load
// ---------------------------------------------------------------------------

void check_square(const MatrixC& m, Index n, const std::string& what) {
  if (m.rows() != n || m.cols() != n)
    throw SchemaError("certificate payload: " + what + " must be " + std::to_string(n) + "x" +
                      std::to_string(n));
}

void validate_payload(const CertificatePayload& payload) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PinchingFilePayload>) {
          const Index n = p.x.rows();
          check_square(p.x, n, "x");
          check_square(p.basis, n, "basis");
          Index total = 0;
          for (Index w : p.ranks) {
            if (w <= 0) throw SchemaError("certificate payload: ranks must be positive");
            total += w;
          }
          if (p.ranks.empty() || total > n)
            throw SchemaError("certificate payload: ranks must be nonempty and sum to <= n");
          if (p.complete && total != n)
            throw SchemaError("certificate payload: complete pinching ranks must sum to n");
        } else if constexpr (std::is_same_v<T, DixmierFilePayload>) {
          if (p.inputs.empty() || p.unitaries.empty())
            throw SchemaError("certificate payload: dixmier needs inputs and unitaries");
          const Index n = p.inputs.front().rows();
          for (const MatrixC& x : p.inputs) check_square(x, n, "input");
          for (const MatrixC& u : p.unitaries) check_square(u, n, "unitary");
          if (p.targets.size() != p.inputs.size() || p.residuals.size() != p.inputs.size())
            throw SchemaError("certificate payload: dixmier targets/residuals must match inputs");
        } else if constexpr (std::is_same_v<T, ProjectionSumFilePayload>) {
          const Index n = p.a.rows();
          check_square(p.a, n, "a");
          if (p.projections.empty())
            throw SchemaError("certificate payload: projection_sum needs projections");
          for (const MatrixC& q : p.projections) check_square(q, n, "projection");
        } else if constexpr (std::is_same_v<T, PositiveCombinationFilePayload>) {
          const Index n = p.a.rows();
          check_square(p.a, n, "a");
          if (p.coefficients.size() != p.projections.size())
            throw SchemaError(
                "certificate payload: positive_combination coefficients must match projections");
          for (const MatrixC& q : p.projections) check_square(q, n, "projection");
        } else if constexpr (std::is_same_v<T, NilpotentFilePayload>) {
          const Index n = p.x.rows();
          check_square(p.x, n, "x");
          check_square(p.z, n, "z");
          check_square(p.basis, n, "basis");
          check_square(p.triangular, n, "triangular");
        } else if constexpr (std::is_same_v<T, MajorizationFilePayload>) {
          const Index n = p.source.rows();
          check_square(p.source, n, "source");
          check_square(p.target, n, "target");
          if (p.unitaries.empty())
            throw SchemaError("certificate payload: majorization needs unitaries");
          for (const MatrixC& u : p.unitaries) check_square(u, n, "unitary");
        } else if constexpr (std::is_same_v<T, TwoProjectionFilePayload>) {
          const Index n = p.e.rows();
          check_square(p.e, n, "e");
          check_square(p.f, n, "f");
          check_square(p.basis, n, "basis");
          if (p.dims.size() != 5)
            throw SchemaError("certificate payload: two_projection needs 5 dims");
          Index total = 0;
          for (std::size_t i = 0; i < 5; ++i) {
            if (p.dims[i] < 0) throw SchemaError("certificate payload: negative dimension");
            total += p.dims[i];
          }
          total += p.dims[4];  // generic pairs occupy 2m columns
          if (total != n)
            throw SchemaError("certificate payload: two_projection dims do not sum to n");
          const Index m = p.dims[4];
          if (p.angles.size() != m || p.h.size() != m || p.k.size() != m)
            throw SchemaError("certificate payload: angle arrays must have one entry per pair");
          if (p.halved && p.halves.size() != 4)
            throw SchemaError("certificate payload: halved two_projection needs 4 halves");
          if (!p.halved && !p.halves.empty())
            throw SchemaError("certificate payload: halves present but halved flag unset");
          for (const MatrixC& q : p.halves) check_square(q, n, "half");
        } else if constexpr (std::is_same_v<T, QpmFilePayload>) {
          const Index n = p.b.rows();
          check_square(p.b, n, "b");
          check_square(p.v, n, "v");
          check_square(p.q_minus, n, "q_minus");
          check_square(p.q_plus, n, "q_plus");
        }
      },
      payload);
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix files
// ---------------------------------------------------------------------------

LoadedMatrix parse_matrix(const std::string& path) {
  Reader r(path);
  const std::vector<std::string> header = r.next();
  if (header.size() != 2 || header[0] != "pincert-matrix" || header[1] != "v1")
    r.fail("expected header 'pincert-matrix v1'");

  LoadedMatrix out;
  bool have_matrix = false;
  while (!r.eof()) {
    const Entry e = read_entry(r);
    if (e.key == "name") {
      out.name = e.name;
    } else if (e.key == "seed") {
      out.seed = r.integer(e.name);
    } else if (e.key == "matrix") {
      if (e.rest.size() != 1) r.fail("matrix entry needs a dimension");
      const long n = r.integer(e.rest[0]);
      if (n < 1 || n > kMaxDim) r.fail("matrix has unreasonable dimension");
      if (out.name.empty()) out.name = e.name;
      MatrixC m(n, n);
      for (int part = 0; part < 2; ++part) {
        for (long row = 0; row < n; ++row) {
          const std::vector<std::string> tokens = r.next();
          if (tokens.size() != static_cast<std::size_t>(n))
            r.fail("matrix row has " + std::to_string(tokens.size()) + " values, expected " +
                   std::to_string(n));
          for (long col = 0; col < n; ++col) {
            const double v = r.number(tokens[static_cast<std::size_t>(col)]);
            if (part == 0)
              m(row, col) = Complex(v, 0.0);
            else
              m(row, col).imag(v);  // setter keeps a signed-zero real part intact
          }
        }
      }
      out.matrix = m;
      have_matrix = true;
    } else {
      r.fail("unknown entry '" + e.key + "' in matrix file");
    }
  }
  if (!have_matrix) throw ParseError(path + ": no matrix block found");
  const double dev = (out.matrix - out.matrix.adjoint().eval()).norm();
  out.hermitian = dev <= 1e-12 * (1.0 + out.matrix.norm());
  return out;
}

void write_matrix(const std::string& path, const MatrixC& m, const std::string& name) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValueError("write_matrix: matrix must be square and nonempty");
  if (!m.allFinite()) throw ValueError("write_matrix: non-finite entries");
  Emitter em;
  em.raw("pincert-matrix v1");
  if (!name.empty()) em.raw("name " + name);
  em.matrix(name.empty() ? "m" : name, m);
  write_file(path, em.str());
}

// ---------------------------------------------------------------------------
// Certificate files
// ---------------------------------------------------------------------------

std::string kind_name(const CertificateFile& file) {
  static const char* names[] = {"pinching",  "dixmier",      "projection_sum",
                                "positive_combination", "nilpotent", "majorization",
                                "two_projection", "q_pm"};
  return names[file.payload.index()];
}

void emit_certificate(const CertificateFile& file, const std::string& path) {
  validate_payload(file.payload);
  Emitter em;
  em.raw("pincert-certificate v1");
  em.raw("tool " + file.tool_version);
  em.raw("tolerance " + fmt(file.tolerance.abs_tol) + " " + fmt(file.tolerance.rel_scale) + " " +
         fmt(file.tolerance.rank_cutoff));
  em.raw("kind " + kind_name(file));

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PinchingFilePayload>) {
          em.matrix("x", p.x);
          em.matrix("basis", p.basis);
          em.ints("ranks", p.ranks);
          em.scalar("target", p.target);
          em.scalar("residual", p.residual);
          em.boolean("certified", p.certified);
          em.boolean("complete", p.complete);
        } else if constexpr (std::is_same_v<T, DixmierFilePayload>) {
          emit_matrix_list(em, "inputs", "x", p.inputs);
          emit_matrix_list(em, "unitaries", "u", p.unitaries);
          em.vector("targets", p.targets);
          em.vector("residuals", p.residuals);
        } else if constexpr (std::is_same_v<T, ProjectionSumFilePayload>) {
          em.matrix("a", p.a);
          emit_matrix_list(em, "projections", "p", p.projections);
          em.scalar("sum_residual", p.sum_residual);
        } else if constexpr (std::is_same_v<T, PositiveCombinationFilePayload>) {
          em.matrix("a", p.a);
          em.vector("coefficients", p.coefficients);
          emit_matrix_list(em, "projections", "q", p.projections);
          em.scalar("residual", p.residual);
        } else if constexpr (std::is_same_v<T, NilpotentFilePayload>) {
          em.matrix("x", p.x);
          em.matrix("z", p.z);
          em.matrix("basis", p.basis);
          em.matrix("triangular", p.triangular);
          em.scalar("reconstruction_residual", p.reconstruction_residual);
        } else if constexpr (std::is_same_v<T, MajorizationFilePayload>) {
          em.matrix("source", p.source);
          em.matrix("target", p.target);
          emit_matrix_list(em, "unitaries", "u", p.unitaries);
          em.scalar("residual", p.residual);
        } else if constexpr (std::is_same_v<T, TwoProjectionFilePayload>) {
          em.matrix("e", p.e);
          em.matrix("f", p.f);
          em.matrix("basis", p.basis);
          em.ints("dims", p.dims);
          em.vector("angles", p.angles);
          em.vector("h", p.h);
          em.vector("k", p.k);
          em.scalar("reconstruction_residual", p.reconstruction_residual);
          em.boolean("halved", p.halved);
          if (p.halved) {
            em.matrix("e1", p.halves[0]);
            em.matrix("e2", p.halves[1]);
            em.matrix("f1", p.halves[2]);
            em.matrix("f2", p.halves[3]);
          }
        } else if constexpr (std::is_same_v<T, QpmFilePayload>) {
          em.matrix("b", p.b);
          em.matrix("v", p.v);
          em.matrix("q_minus", p.q_minus);
          em.matrix("q_plus", p.q_plus);
          em.scalar("identity_residual", p.identity_residual);
        }
      },
      file.payload);
  write_file(path, em.str());
}

LoadResult load_certificate(const std::string& path) {
  Reader r(path);
  const std::vector<std::string> header = r.next();
  if (header.size() != 2 || header[0] != "pincert-certificate" || header[1] != "v1")
    r.fail("expected header 'pincert-certificate v1'");

  LoadResult out;

  {
    const std::vector<std::string> tool = r.next();
    if (tool.empty() || tool[0] != "tool") r.fail("expected 'tool' line");
    std::string version;
    for (std::size_t i = 1; i < tool.size(); ++i) {
      if (i > 1) version += " ";
      version += tool[i];
    }
    out.file.tool_version = version;
  }
  {
    const std::vector<std::string> tolline = r.next();
    if (tolline.size() != 4 || tolline[0] != "tolerance")
      r.fail("expected 'tolerance <abs> <rel> <cutoff>'");
    out.file.tolerance.abs_tol = r.number(tolline[1]);
    out.file.tolerance.rel_scale = r.number(tolline[2]);
    out.file.tolerance.rank_cutoff = r.number(tolline[3]);
  }
  std::string kind;
  {
    const std::vector<std::string> kindline = r.next();
    if (kindline.size() != 2 || kindline[0] != "kind") r.fail("expected 'kind <name>'");
    kind = kindline[1];
  }

  if (kind == "pinching") {
    PinchingFilePayload p;
    p.x = read_matrix_block(r, "x");
    p.basis = read_matrix_block(r, "basis");
    p.ranks = read_ints(r, "ranks");
    p.target = read_scalar(r, "target");
    p.residual = read_scalar(r, "residual");
    p.certified = read_bool(r, "certified");
    p.complete = read_bool(r, "complete");
    out.file.payload = std::move(p);
  } else if (kind == "dixmier") {
    DixmierFilePayload p;
    p.inputs = read_matrix_list(r, "inputs", "x");
    p.unitaries = read_matrix_list(r, "unitaries", "u");
    const VectorR t = read_vector(r, "targets");
    const VectorR res = read_vector(r, "residuals");
    p.targets.assign(t.data(), t.data() + t.size());
    p.residuals.assign(res.data(), res.data() + res.size());
    out.file.payload = std::move(p);
  } else if (kind == "projection_sum") {
    ProjectionSumFilePayload p;
    p.a = read_matrix_block(r, "a");
    p.projections = read_matrix_list(r, "projections", "p");
    p.sum_residual = read_scalar(r, "sum_residual");
    out.file.payload = std::move(p);
  } else if (kind == "positive_combination") {
    PositiveCombinationFilePayload p;
    p.a = read_matrix_block(r, "a");
    const VectorR c = read_vector(r, "coefficients");
    p.coefficients.assign(c.data(), c.data() + c.size());
    p.projections = read_matrix_list(r, "projections", "q");
    p.residual = read_scalar(r, "residual");
    out.file.payload = std::move(p);
  } else if (kind == "nilpotent") {
    NilpotentFilePayload p;
    p.x = read_matrix_block(r, "x");
    p.z = read_matrix_block(r, "z");
    p.basis = read_matrix_block(r, "basis");
    p.triangular = read_matrix_block(r, "triangular");
    p.reconstruction_residual = read_scalar(r, "reconstruction_residual");
    out.file.payload = std::move(p);
  } else if (kind == "majorization") {
    MajorizationFilePayload p;
    p.source = read_matrix_block(r, "source");
    p.target = read_matrix_block(r, "target");
    p.unitaries = read_matrix_list(r, "unitaries", "u");
    p.residual = read_scalar(r, "residual");
    out.file.payload = std::move(p);
  } else if (kind == "two_projection") {
    TwoProjectionFilePayload p;
    p.e = read_matrix_block(r, "e");
    p.f = read_matrix_block(r, "f");
    p.basis = read_matrix_block(r, "basis");
    p.dims = read_ints(r, "dims");
    p.angles = read_vector(r, "angles");
    p.h = read_vector(r, "h");
    p.k = read_vector(r, "k");
    p.reconstruction_residual = read_scalar(r, "reconstruction_residual");
    p.halved = read_bool(r, "halved");
    if (p.halved) {
      p.halves.push_back(read_matrix_block(r, "e1"));
      p.halves.push_back(read_matrix_block(r, "e2"));
      p.halves.push_back(read_matrix_block(r, "f1"));
      p.halves.push_back(read_matrix_block(r, "f2"));
    }
    out.file.payload = std::move(p);
  } else if (kind == "q_pm") {
    QpmFilePayload p;
    p.b = read_matrix_block(r, "b");
    p.v = read_matrix_block(r, "v");
    p.q_minus = read_matrix_block(r, "q_minus");
    p.q_plus = read_matrix_block(r, "q_plus");
    p.identity_residual = read_scalar(r, "identity_residual");
    out.file.payload = std::move(p);
  } else {
    throw SchemaError(path + ": unknown certificate kind '" + kind + "'");
  }
  if (!r.eof()) {
    try {
      r.next();
      r.fail("trailing content after certificate payload");
    } catch (const ParseError& e) {
      if (std::string(e.what()).find("unexpected end of file") == std::string::npos) throw;
    }
  }

  validate_payload(out.file.payload);

  // Recompute residuals; stored values that disagree are overridden with a
  // warning (honest values survive the round trip bit-exactly).
  std::vector<std::pair<std::string, std::pair<double*, double>>> recomputed;
  recompute_residuals(out.file.payload, out.file.tolerance, recomputed);
  for (auto& [name, slot] : recomputed) {
    double* stored = slot.first;
    const double fresh = slot.second;
    if (std::abs(*stored - fresh) > 1e-10 * (1.0 + std::abs(fresh))) {
      out.warnings.push_back("stored " + name + " " + fmt(*stored) +
                             " disagrees with recomputed " + fmt(fresh) + "; overridden");
      *stored = fresh;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

class Checker {
 public:
  explicit Checker(std::vector<std::string>& notes) : notes_(notes) {}

  void check(bool ok, const std::string& what) {
    notes_.push_back(std::string(ok ? "ok: " : "FAIL: ") + what);
    ok_ = ok_ && ok;
  }

  void bound(const std::string& what, double value, double limit) {
    check(value <= limit, what + " = " + fmt(value) + " (bound " + fmt(limit) + ")");
  }

  bool ok() const { return ok_; }

 private:
  std::vector<std::string>& notes_;
  bool ok_ = true;
};

Tolerance loose_projection_tolerance(const Tolerance& tol, Index n) {
  Tolerance loose = tol;
  loose.abs_tol = std::max(tol.abs_tol, 1e-8 * static_cast<double>(n));
  return loose;
}

void verify_pinching_payload(const PinchingFilePayload& p, const Tolerance& tol, Checker& ck) {
  const Index n = p.x.rows();
  const HermitianMatrix x(p.x, tol);
  const UnitaryMatrix basis(p.basis, tol);

  PinchingCertificate cert;
  cert.target = p.target;
  cert.residual = p.residual;
  cert.certified = p.certified;
  cert.complete = p.complete;
  cert.basis = basis;
  const Tolerance loose = loose_projection_tolerance(tol, n);
  Index off = 0;
  for (Index w : p.ranks) {
    cert.projections.push_back(
        ProjectionMatrix::from_orthonormal_columns(MatrixC(p.basis.middleCols(off, w)), loose));
    off += w;
  }
  const PinchingVerification pv = verify_pinching(x, cert, tol);
  ck.check(pv.ok, "pinching family verifies against the stored residual");
  ck.bound("sum deviation", pv.sum_deviation, tol.identity_scale(n) * 10.0);
  ck.bound("recomputed residual", pv.recomputed_residual,
           cert.residual + tol.structural(1.0 + p.x.norm(), n) * 10.0);
}

void verify_dixmier_payload(const DixmierFilePayload& p, const Tolerance& tol, Checker& ck) {
  std::vector<HermitianMatrix> xs;
  for (const MatrixC& x : p.inputs) {
    const double dev = (x - x.adjoint().eval()).norm();
    ck.check(dev <= 1e-10 * (1.0 + x.norm()), "input is Hermitian");
    xs.emplace_back(x, tol);
  }
  DixmierCertificate cert;
  for (const MatrixC& u : p.unitaries) cert.unitaries.emplace_back(u, tol);
  cert.targets = p.targets;
  cert.residuals = p.residuals;
  const AverageVerification av = verify_average(xs, cert, tol);
  for (std::size_t j = 0; j < av.residuals.size(); ++j)
    ck.bound("average residual for input " + std::to_string(j), av.residuals[j], av.bounds[j]);
  ck.check(av.ok, "simultaneous averaging certificate verifies");
}

void verify_projection_sum_payload(const ProjectionSumFilePayload& p, const Tolerance& tol,
                                   Checker& ck) {
  const Index n = p.a.rows();
  const Tolerance loose = loose_projection_tolerance(tol, n);
  double worst_idem = 0.0;
  Index total_rank = 0;
  MatrixC sum = MatrixC::Zero(n, n);
  for (const MatrixC& q : p.projections) {
    const ProjectionMatrix proj(q, loose);  // throws if not close to a projection
    worst_idem = std::max(worst_idem, (q * q - q).norm());
    total_rank += proj.rank();
    sum += q;
  }
  ck.bound("worst idempotency residual", worst_idem, 1e-9 * static_cast<double>(n));
  ck.bound("sum residual", (sum - p.a).norm(),
           std::max(1e-8 * static_cast<double>(n) * p.a.norm(), 10.0 * tol.abs_tol));

  const HermitianMatrix a(p.a, tol);
  const ProjectionMatrix range = range_projection(a, tol);
  ck.check(range.rank() <= total_rank,
           "necessity: rank of the range projection <= total projection rank");
}

void verify_positive_combination_payload(const PositiveCombinationFilePayload& p,
                                         const Tolerance& tol, Checker& ck) {
  const Index n = p.a.rows();
  const Tolerance loose = loose_projection_tolerance(tol, n);
  bool coeffs_ok = true;
  for (double c : p.coefficients)
    if (!(c >= -1e-12)) coeffs_ok = false;
  ck.check(coeffs_ok, "coefficients are nonnegative");

  MatrixC sum = MatrixC::Zero(n, n);
  double worst_nest = 0.0;
  for (std::size_t i = 0; i < p.projections.size(); ++i) {
    const ProjectionMatrix proj(p.projections[i], loose);
    sum += p.coefficients[i] * p.projections[i];
    if (i + 1 < p.projections.size())
      worst_nest = std::max(
          worst_nest, (p.projections[i] * p.projections[i + 1] - p.projections[i]).norm());
  }
  ck.bound("nestedness residual", worst_nest, 1e-8 * static_cast<double>(n));
  ck.bound("combination residual", (sum - p.a).norm(),
           std::max(1e-8 * static_cast<double>(n) * (1.0 + p.a.norm()), 10.0 * tol.abs_tol));
}

void verify_nilpotent_payload(const NilpotentFilePayload& p, const Tolerance& tol, Checker& ck) {
  const Index n = p.x.rows();
  const HermitianMatrix x(p.x, tol);  // validates Hermitian structure
  (void)x;
  const UnitaryMatrix basis(p.basis, tol);
  (void)basis;

  bool strict = true;
  for (Index c = 0; c < n && strict; ++c)
    for (Index r = c; r < n; ++r)
      if (p.triangular(r, c) != Complex(0.0, 0.0)) {
        strict = false;
        break;
      }
  ck.check(strict, "triangular factor has exact zeros on and below the diagonal");

  const MatrixC rebuilt = p.basis * p.triangular * p.basis.adjoint();
  ck.bound("basis consistency ||V T V* - Z||", (rebuilt - p.z).norm(),
           1e-10 * static_cast<double>(n) * (1.0 + p.z.norm()));

  const double scale = 1.0 + p.x.norm();
  ck.bound("reconstruction residual", (p.z + p.z.adjoint().eval() - p.x).norm(), 1e-10 * scale);

  const double xnorm = p.x.norm();
  if (xnorm > tol.abs_tol) {
    MatrixC power = p.z / xnorm;
    const MatrixC base = power;
    for (Index k = 1; k < n; ++k) power = power * base;
    ck.bound("scaled nilpotency ||(Z/||X||)^n||", power.norm(), 1e-8);
  }
}

void verify_majorization_payload(const MajorizationFilePayload& p, const Tolerance& tol,
                                 Checker& ck) {
  const HermitianMatrix source(p.source, tol);
  const HermitianMatrix target(p.target, tol);
  MajorizationCertificate cert;
  cert.source = source;
  cert.target = target;
  cert.residual = p.residual;
  for (const MatrixC& u : p.unitaries) cert.unitaries.emplace_back(u, tol);

  const MajorizationVerification mv = verify_majorization(target, source, cert, tol);
  ck.bound("recomputed residual", mv.recomputed_residual, mv.bound);
  ck.bound("worst member unitarity deviation", mv.unitarity_deviation,
           1e-11 * static_cast<double>(p.source.rows()));
  ck.bound("trace gap", mv.trace_gap, 1e-10 * (1.0 + p.source.norm()));
  ck.check(eigen_majorization_check(target, source, tol),
           "eigenvalue majorization necessary condition");
}

void verify_two_projection_payload(const TwoProjectionFilePayload& p, const Tolerance& tol,
                                   Checker& ck) {
  const Index n = p.e.rows();
  const Tolerance loose = loose_projection_tolerance(tol, n);
  const ProjectionMatrix e(p.e, loose);  // structural checks; failures throw
  const ProjectionMatrix f(p.f, loose);
  const UnitaryMatrix basis(p.basis, tol);
  (void)e;
  (void)f;
  (void)basis;

  bool hk_ok = true;
  for (Index i = 0; i < p.dims[4]; ++i) {
    const double h = p.h(i);
    const double k = p.k(i);
    if (std::abs(h * h + k * k - 1.0) > 1e-12 || h < -1e-12 || k < -1e-12) hk_ok = false;
    if (std::abs(std::acos(std::clamp(h, 0.0, 1.0)) - p.angles(i)) > 1e-10) hk_ok = false;
  }
  ck.check(hk_ok, "generic pairs satisfy h^2 + k^2 = 1 with matching angles");

  ck.bound("reconstruction residual", two_projection_residual(p),
           1e-9 * static_cast<double>(n));

  if (p.halved) {
    const MatrixC& e1 = p.halves[0];
    const MatrixC& e2 = p.halves[1];
    const MatrixC& f1 = p.halves[2];
    const MatrixC& f2 = p.halves[3];
    for (const MatrixC* q : {&e1, &e2, &f1, &f2})
      (void)ProjectionMatrix(*q, loose);  // structural check only
    const double bound = 1e-9 * static_cast<double>(n);
    ck.bound("||E1 + E2 - E||", (e1 + e2 - p.e).norm(), bound);
    ck.bound("||F1 + F2 - F||", (f1 + f2 - p.f).norm(), bound);
    ck.bound("||E1 F1||", (e1 * f1).norm(), bound);
    ck.bound("||E2 F2||", (e2 * f2).norm(), bound);
    ck.check(std::abs(e1.trace().real() - e2.trace().real()) < 1e-6 &&
                 std::abs(f1.trace().real() - f2.trace().real()) < 1e-6,
             "halves split the ranks evenly");
  }
}

void verify_qpm_payload(const QpmFilePayload& p, const Tolerance& tol, Checker& ck) {
  const Index n = p.b.rows();
  const HermitianMatrix b(p.b, tol);
  const EigResult eig = hermitian_eig(b, tol);
  ck.check(eig.values(0) >= -tol.structural(1.0 + p.b.norm(), n) * 10.0, "b is psd");
  const double bnorm = std::max(eig.values(n - 1), 0.0);
  ck.check(bnorm > 0.0 && bnorm <= 1.0 + tol.structural(1.0 + p.b.norm(), n) * 10.0,
           "0 < ||b|| <= 1");

  const PartialIsometry v(p.v, loose_projection_tolerance(tol, n));
  const ProjectionMatrix support = range_projection(b, tol);
  const double structural = tol.structural(1.0 + p.b.norm(), n) * 100.0;
  ck.bound("||V*V - support||", (v.initial().matrix() - support.matrix()).norm(), structural);
  ck.bound("||support VV*||", (support.matrix() * v.final().matrix()).norm(), structural);

  const double bound = 1e-10 * static_cast<double>(n);
  ck.bound("q_minus idempotency", (p.q_minus * p.q_minus - p.q_minus).norm(), bound);
  ck.bound("q_plus idempotency", (p.q_plus * p.q_plus - p.q_plus).norm(), bound);
  ck.bound("sum identity residual", qpm_residual(p, tol), bound);
}

}  // namespace

CertificateVerification verify_certificate(const CertificateFile& file, const Tolerance& tol) {
  CertificateVerification out;
  out.kind = kind_name(file);
  Checker ck(out.notes);
  try {
    validate_payload(file.payload);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PinchingFilePayload>)
            verify_pinching_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, DixmierFilePayload>)
            verify_dixmier_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, ProjectionSumFilePayload>)
            verify_projection_sum_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, PositiveCombinationFilePayload>)
            verify_positive_combination_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, NilpotentFilePayload>)
            verify_nilpotent_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, MajorizationFilePayload>)
            verify_majorization_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, TwoProjectionFilePayload>)
            verify_two_projection_payload(p, tol, ck);
          else if constexpr (std::is_same_v<T, QpmFilePayload>)
            verify_qpm_payload(p, tol, ck);
        },
        file.payload);
    out.ok = ck.ok();
  } catch (const Error& e) {
    out.notes.push_back(std::string("FAIL: ") + e.what());
    out.ok = false;
  }
  return out;
}

}  // namespace pincert
