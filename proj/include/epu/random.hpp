#pragma once

// Seeded samplers for dense test instances: Ginibre density matrices, Haar
// unitaries, and unitaries that act independently inside each energy shell.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "epu/dense.hpp"

namespace epu {

using Rng = std::mt19937_64;

inline ComplexMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

/// Haar-random unitary: QR of a complex Gaussian with the phases of R removed.
inline ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(complex_gaussian(dim, dim, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

/// Full-rank random state G G^dagger / tr(G G^dagger).
inline DenseState random_density_matrix(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const ComplexMatrix g = complex_gaussian(n, n, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DenseState::unchecked(0.5 * (rho + rho.adjoint()));
}

/// Random state supported on the given basis indices only.
inline DenseState random_density_matrix_on(std::size_t dim, const std::vector<std::size_t>& support, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(support.size());
  const ComplexMatrix g = complex_gaussian(m, m, rng);
  ComplexMatrix small = g * g.adjoint();
  small /= small.trace().real();
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      rho(static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]),
          static_cast<Eigen::Index>(support[static_cast<std::size_t>(b)])) = small(a, b);
  return DenseState::unchecked(0.5 * (rho + rho.adjoint()));
}

/// Unitary commuting with a Hamiltonian whose eigenspaces are given by
/// `shell_of_index`: an independent Haar unitary inside every block.
inline ComplexMatrix random_block_unitary(const std::vector<int>& shell_of_index, int shell_count, Rng& rng) {
  const auto dim = static_cast<Eigen::Index>(shell_of_index.size());
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (int s = 0; s < shell_count; ++s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < dim; ++i)
      if (shell_of_index[static_cast<std::size_t>(i)] == s) idx.push_back(i);
    const auto g = static_cast<Eigen::Index>(idx.size());
    if (g == 0) continue;
    const ComplexMatrix block = random_unitary(g, rng);
    for (Eigen::Index a = 0; a < g; ++a)
      for (Eigen::Index b = 0; b < g; ++b)
        u(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) = block(a, b);
  }
  return u;
}

}  // namespace epu
