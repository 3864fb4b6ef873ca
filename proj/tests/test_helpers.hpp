// Deterministic random generators shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pincert/spectral.hpp"
#include "pincert/types.hpp"

namespace pincert::testing {

inline MatrixC random_matrix(Index n, std::mt19937_64& g) {
  std::normal_distribution<double> d(0.0, 1.0);
  MatrixC m(n, n);
  const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = Complex(d(g), d(g)) * scale;
  return m;
}

inline HermitianMatrix random_hermitian(Index n, std::mt19937_64& g) {
  const MatrixC m = random_matrix(n, g);
  return HermitianMatrix(0.5 * (m + m.adjoint().eval()));
}

inline UnitaryMatrix random_unitary(Index n, std::mt19937_64& g) {
  return polar(random_matrix(n, g)).unitary;
}

// Q diag(values, 0, ...) Q* with `values` assigned to the first columns.
inline HermitianMatrix hermitian_with_spectrum(const std::vector<double>& values, Index n,
                                               std::mt19937_64& g) {
  const UnitaryMatrix q = random_unitary(n, g);
  VectorR d = VectorR::Zero(n);
  for (std::size_t i = 0; i < values.size(); ++i) d(static_cast<Index>(i)) = values[i];
  const MatrixC a = q.matrix() * d.cast<Complex>().asDiagonal() * q.matrix().adjoint();
  return HermitianMatrix(a);
}

// psd with the given rank and trace (eigenvalues strictly positive).
inline HermitianMatrix random_psd(Index n, Index rank, double trace, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> values(static_cast<std::size_t>(rank));
  double sum = 0.0;
  for (double& v : values) {
    v = u(g);
    sum += v;
  }
  for (double& v : values) v *= trace / sum;
  return hermitian_with_spectrum(values, n, g);
}

inline ProjectionMatrix random_projection(Index n, Index rank, std::mt19937_64& g) {
  const UnitaryMatrix q = random_unitary(n, g);
  return ProjectionMatrix::from_orthonormal_columns(MatrixC(q.matrix().leftCols(rank)));
}

inline double frob(const MatrixC& m) { return m.norm(); }

}  // namespace pincert::testing
