#pragma once

// Dense density matrices for small Hilbert spaces, computational-basis
// indexing of qudit strings, and an exact sparse rational matrix used by the
// oracle layer.

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "epu/combinatorics.hpp"

namespace epu {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Default ceiling on the Hilbert dimension of any dense construction.
inline constexpr std::size_t kDefaultDenseCap = 4096;

/// d^n, or DimensionCap if it exceeds `cap`.
inline std::size_t checked_dimension(int d, int n, std::size_t cap, const char* what) {
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= static_cast<std::size_t>(d);
    if (dim > cap) {
      throw DimensionCap(std::string(what) + ": " + std::to_string(d) + "^" + std::to_string(n) +
                         " exceeds cap " + std::to_string(cap));
    }
  }
  return dim;
}

// Basis string x_1 ... x_n maps to index sum_i x_i d^{n-i}; x_1 is the most
// significant digit, so "the last n-k qudits" are the low-order digits.

inline std::vector<int> basis_digits(std::size_t index, int d, int n) {
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return digits;
}

inline std::size_t basis_index(const std::vector<int>& digits, int d) {
  std::size_t idx = 0;
  for (int x : digits) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(x);
  return idx;
}

inline TypeVector type_of_index(std::size_t index, int d, int n) {
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  for (int x : basis_digits(index, d, n)) ++counts[static_cast<std::size_t>(x)];
  return TypeVector(std::move(counts));
}

/// Energy of every basis string of n qudits, indexed as above.
inline std::vector<Energy> basis_energies(int n, const EnergySpectrum& spec, std::size_t cap = kDefaultDenseCap) {
  const std::size_t dim = checked_dimension(spec.dim(), n, cap, "basis_energies");
  std::vector<Energy> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    Energy e = 0;
    for (int x : basis_digits(i, spec.dim(), n)) e += spec.level(x);
    out[i] = e;
  }
  return out;
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
class DenseState {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kPositivityTol = 1e-10;
  static constexpr double kTraceTol = 1e-12;

  /// Validating constructor; throws InvalidArgument if an invariant fails.
  explicit DenseState(ComplexMatrix m) : m_(std::move(m)) {
    std::string why;
    if (!satisfies_invariants(m_, &why)) throw InvalidArgument("DenseState: " + why);
  }

  /// Wraps a matrix already known to be a state (channel outputs etc).
  static DenseState unchecked(ComplexMatrix m) {
    DenseState s;
    s.m_ = std::move(m);
    return s;
  }

  static DenseState maximally_mixed(std::size_t dim) {
    return unchecked(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) /
                     static_cast<double>(dim));
  }

  static DenseState pure(const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi / psi.norm();
    return unchecked(v * v.adjoint());
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

  static bool satisfies_invariants(const ComplexMatrix& m, std::string* why = nullptr) {
    auto fail = [why](const char* msg) {
      if (why) *why = msg;
      return false;
    };
    if (m.rows() != m.cols() || m.rows() == 0) return fail("matrix must be square and nonempty");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) return fail("not Hermitian");
    if (std::abs(m.trace() - Complex(1.0)) > kTraceTol) return fail("trace differs from 1");
    ComplexMatrix shifted = m;
    shifted.diagonal().array() += kPositivityTol;
    Eigen::LLT<ComplexMatrix> llt(shifted);
    if (llt.info() != Eigen::Success) return fail("negative eigenvalue below tolerance");
    return true;
  }

 private:
  DenseState() = default;
  ComplexMatrix m_;
};

/// Trace out the last (n-k) qudits of an operator on n qudits.
inline ComplexMatrix partial_trace_last(const ComplexMatrix& m, int d, int n, int k) {
  if (k < 0 || k > n) throw InvalidArgument("partial_trace_last: need 0 <= k <= n");
  std::size_t keep = 1, drop = 1;
  for (int i = 0; i < k; ++i) keep *= static_cast<std::size_t>(d);
  for (int i = k; i < n; ++i) drop *= static_cast<std::size_t>(d);
  if (static_cast<std::size_t>(m.rows()) != keep * drop) throw ShapeMismatch("partial_trace_last: dimension mismatch");
  const auto K = static_cast<Eigen::Index>(keep), Dr = static_cast<Eigen::Index>(drop);
  ComplexMatrix out = ComplexMatrix::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b) {
      Complex s = 0;
      for (Eigen::Index z = 0; z < Dr; ++z) s += m(a * Dr + z, b * Dr + z);
      out(a, b) = s;
    }
  return out;
}

/// Exact square matrix stored as its nonzero entries.
class RationalMatrix {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  explicit RationalMatrix(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::map<Key, Rational>& entries() const { return entries_; }

  Rational at(std::size_t i, std::size_t j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? Rational(0) : it->second;
  }

  void add(std::size_t i, std::size_t j, const Rational& v) {
    if (i >= dim_ || j >= dim_) throw InvalidArgument("RationalMatrix::add: index out of range");
    if (v == 0) return;
    auto [it, inserted] = entries_.try_emplace({i, j}, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) entries_.erase(it);
    }
  }

  Rational trace() const {
    Rational t = 0;
    for (const auto& [key, v] : entries_)
      if (key.first == key.second) t += v;
    return t;
  }

  ComplexMatrix to_complex() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (const auto& [key, v] : entries_)
      m(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = to_double(v);
    return m;
  }

  DenseState to_dense() const { return DenseState::unchecked(to_complex()); }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t dim_;
  std::map<Key, Rational> entries_;
};

}  // namespace epu
