#pragma once

// Trace norms and relative entropies, for type-diagonal and dense states.
//
// Conventions: ||X||_1 is the sum of absolute eigenvalues (no 1/2 factor);
// relative entropies use the natural logarithm. A support violation in a
// relative entropy is reported as +infinity rather than thrown.

#include <cmath>
#include <limits>
#include <type_traits>

#include <Eigen/Eigenvalues>

#include "epu/dense.hpp"
#include "epu/states.hpp"

namespace epu {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

template <class A, class B>
void require_same_shape(const BasicTypeDiagonalState<A>& a, const BasicTypeDiagonalState<B>& b, const char* what) {
  if (a.size() != b.size() || !(a.spectrum() == b.spectrum()))
    throw ShapeMismatch(std::string(what) + ": states differ in k or spectrum");
}

// Union of the supports of two weight maps, in canonical type order.
template <class A, class B, class Visit>
void for_each_union(const BasicTypeDiagonalState<A>& a, const BasicTypeDiagonalState<B>& b, Visit&& visit) {
  auto ia = a.weights().begin(), ea = a.weights().end();
  auto ib = b.weights().begin(), eb = b.weights().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      visit(ia->second, B(0));
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      visit(A(0), ib->second);
      ++ib;
    } else {
      visit(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
}

}  // namespace detail

/// ||a - b||_1 = sum_Q |c_Q - c'_Q|; exact when both operands are exact.
///
/// Valid because the normalized type projectors are mutually orthogonal and
/// flat within each class.
template <class A, class B>
double trace_norm_diff_type(const BasicTypeDiagonalState<A>& a, const BasicTypeDiagonalState<B>& b) {
  detail::require_same_shape(a, b, "trace_norm_diff_type");
  if constexpr (std::is_same_v<A, Rational> && std::is_same_v<B, Rational>) {
    Rational acc = 0;
    detail::for_each_union(a, b, [&acc](const Rational& x, const Rational& y) { acc += abs(x - y); });
    return to_double(acc);
  } else {
    double acc = 0.0;
    detail::for_each_union(a, b, [&acc](const A& x, const B& y) { acc += std::abs(to_double(x) - to_double(y)); });
    return acc;
  }
}

/// Half the trace norm; convenience only, never used in bound comparisons.
template <class A, class B>
double trace_distance_type(const BasicTypeDiagonalState<A>& a, const BasicTypeDiagonalState<B>& b) {
  return 0.5 * trace_norm_diff_type(a, b);
}

/// D(a || b) = sum_Q c_Q ln(c_Q / c'_Q); the |T_Q| factors cancel.
template <class A, class B>
double relative_entropy_type(const BasicTypeDiagonalState<A>& a, const BasicTypeDiagonalState<B>& b) {
  detail::require_same_shape(a, b, "relative_entropy_type");
  double acc = 0.0;
  bool infinite = false;
  detail::for_each_union(a, b, [&](const A& x, const B& y) {
    if (x == 0) return;
    if (y == 0) {
      infinite = true;
      return;
    }
    // c ln(c/c') = c log1p((c - c')/c'); the relative difference is formed
    // before rounding so that near-equal weights keep their precision.
    if constexpr (std::is_same_v<A, Rational> && std::is_same_v<B, Rational>) {
      acc += to_double(x) * std::log1p(to_double((x - y) / y));
    } else {
      const double xd = to_double(x), yd = to_double(y);
      acc += xd * std::log1p((xd - yd) / yd);
    }
  });
  return infinite ? kInfinity : acc;
}

inline double trace_norm(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double trace_norm_diff_dense(const DenseState& a, const DenseState& b) {
  if (a.dim() != b.dim()) throw ShapeMismatch("trace_norm_diff_dense: dimensions differ");
  return trace_norm(a.matrix() - b.matrix());
}

inline double trace_distance_dense(const DenseState& a, const DenseState& b) {
  return 0.5 * trace_norm_diff_dense(a, b);
}

/// Eigenvalues below this are treated as the kernel in dense entropies.
inline constexpr double kKernelTol = 1e-10;

/// D(a || b) = tr(a ln a) - tr(a ln b), with 0 ln 0 = 0.
inline double relative_entropy_dense(const DenseState& a, const DenseState& b) {
  if (a.dim() != b.dim()) throw ShapeMismatch("relative_entropy_dense: dimensions differ");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(a.matrix(), Eigen::EigenvaluesOnly);
  double self = 0.0;
  for (double p : ea.eigenvalues())
    if (p > 0.0) self += p * std::log(p);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eb(b.matrix());
  const ComplexMatrix& v = eb.eigenvectors();
  double cross = 0.0;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double weight = (v.col(j).adjoint() * a.matrix() * v.col(j))(0, 0).real();
    const double mu = eb.eigenvalues()(j);
    if (mu <= kKernelTol) {
      if (weight > kKernelTol) return kInfinity;
      continue;
    }
    cross += weight * std::log(mu);
  }
  const double d = self - cross;
  return (d < 0.0 && d > -1e-12) ? 0.0 : d;  // rounding noise around a == b
}

}  // namespace epu
