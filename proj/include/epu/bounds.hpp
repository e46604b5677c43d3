#pragma once

// Measured left-hand sides against the closed-form right-hand sides of the
// de Finetti-type inequalities for EPU-invariant states.
//
// Right-hand sides carry the leading term only: the subleading corrections
// have no computable constant, so reports are annotated as leading-order.
// The thermal mixture is always the discrete measure sum_E c_E delta(beta -
// beta(E/N)), i.e. one Gibbs product per occupied shell.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/LU>

#include "epu/lindblad.hpp"
#include "epu/metrics.hpp"
#include "epu/states.hpp"
#include "epu/thermal.hpp"

namespace epu {

namespace formulas {

/// k(5d + k - 1) / (2N): trace-norm distance to a thermal mixture.
inline double trace_leading(int n, int k, int d) {
  return static_cast<double>(k * (5 * d + k - 1)) / (2.0 * n);
}

/// 2kd / N: total variation between sampling with and without replacement.
inline double sampling_tv(int n, int k, int d) { return static_cast<double>(2 * k * d) / n; }

/// k(d + k - 1) / (2N): product-mixture to thermal-product distance.
inline double norm2_leading(int n, int k, int d) {
  return static_cast<double>(k * (d + k - 1)) / (2.0 * n);
}

/// k(d - 2) / (2N): relative entropy to a thermal mixture.
inline double relent_leading(int n, int k, int d) {
  return static_cast<double>(k * (d - 2)) / (2.0 * n);
}

/// (d - 1) k (k - 1) / (2 (N - 1)(N - k + 1)): relative entropy between a
/// shell marginal and its product-mixture counterpart. Zero at k = 1.
inline double lemma_d(int n, int k, int d) {
  if (k <= 1) return 0.0;
  return static_cast<double>((d - 1) * k * (k - 1)) / (2.0 * (n - 1) * (n - k + 1));
}

}  // namespace formulas

/// A right-hand side this large says nothing: trace norms never exceed 2.
inline constexpr double kVacuousThreshold = 2.0;

struct TraceBounds {
  double lhs = 0.0;
  double rhs_leading = 0.0;
  double norm1_measured = 0.0;  // c_E-averaged ||rho_E^(k) - sum_P mu_E(P) eta_P^k||_1
  double norm1_bound = 0.0;
  double norm2_measured = 0.0;  // c_E-averaged ||sum_P mu_E(P) eta_P^k - tau(E/N)^k||_1
  double norm2_bound = 0.0;
  bool vacuous = false;
};

struct RelEntBounds {
  double lhs = 0.0;  // +inf on support violation
  double rhs_leading = 0.0;
  double lemma_d_measured = 0.0;
  double lemma_d_bound = 0.0;
  double p_min = 0.0;
  bool degenerate = false;  // d = 2: the leading term vanishes identically
  bool support_violation = false;
};

struct BoundReport {
  int n = 0, k = 0, d = 0;
  std::vector<ShellMixture::Component> shells;
  std::optional<TraceBounds> trace;
  std::optional<RelEntBounds> relent;
  static constexpr bool kLeadingOrderOnly = true;
};

namespace detail {

inline void require_thermal_shells(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix, const char* what) {
  if (k < 1 || k > n) throw InvalidArgument(std::string(what) + ": need 1 <= k <= N");
  for (const auto& [e, c] : mix.components()) {
    if (c != 0 && is_extremal_shell(n, spec, e))
      throw OutOfRange(std::string(what) + ": shell E=" + std::to_string(e) + " has no finite temperature");
  }
}

inline FloatTypeDiagonalState thermal_mixture(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix) {
  std::vector<std::pair<double, FloatTypeDiagonalState>> parts;
  for (const auto& [e, c] : mix.components()) {
    if (c == 0) continue;
    parts.emplace_back(to_double(c), thermal_power(spec, energy_per_qudit(n, e), k));
  }
  return convex_combination(parts);
}

}  // namespace detail

/// Trace-norm report for the k-qudit marginal of sum_E c_E rho_E^{(N)}.
inline BoundReport theorem1_report(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix) {
  detail::require_thermal_shells(n, k, spec, mix, "theorem1_report");
  const int d = spec.dim();
  BoundReport r{n, k, d, mix.components(), std::nullopt, std::nullopt};
  TraceBounds t;
  const TypeDiagonalState marginal = mixture_marginal(n, k, spec, mix);
  t.lhs = trace_norm_diff_type(marginal, detail::thermal_mixture(n, k, spec, mix));
  for (const auto& [e, c] : mix.components()) {
    if (c == 0) continue;
    const TypeDiagonalState shell = extremal_marginal(n, k, spec, e);
    const TypeDiagonalState products = shell_eta_mixture(n, k, spec, e);
    const FloatTypeDiagonalState thermal = thermal_power(spec, energy_per_qudit(n, e), k);
    t.norm1_measured += to_double(c) * trace_norm_diff_type(shell, products);
    t.norm2_measured += to_double(c) * trace_norm_diff_type(products, thermal);
  }
  t.rhs_leading = formulas::trace_leading(n, k, d);
  t.norm1_bound = formulas::sampling_tv(n, k, d);
  t.norm2_bound = formulas::norm2_leading(n, k, d);
  t.vacuous = t.rhs_leading >= kVacuousThreshold;
  r.trace = t;
  return r;
}

/// Relative-entropy report: the full distance to the thermal mixture and the
/// shell-averaged distance to the product mixtures.
inline BoundReport relent_report(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix) {
  detail::require_thermal_shells(n, k, spec, mix, "relent_report");
  const int d = spec.dim();
  BoundReport r{n, k, d, mix.components(), std::nullopt, std::nullopt};
  RelEntBounds b;
  b.p_min = 1.0;
  for (const auto& [e, c] : mix.components()) {
    if (c == 0) continue;
    const GibbsSpec g = gibbs_at_energy(spec, energy_per_qudit(n, e));
    b.p_min = std::min(b.p_min, *std::min_element(g.probs.begin(), g.probs.end()));
  }
  if (!(b.p_min > 0.0)) throw OutOfRange("relent_report: thermal distribution has an empty level (p_min = 0)");
  const TypeDiagonalState marginal = mixture_marginal(n, k, spec, mix);
  b.lhs = relative_entropy_type(marginal, detail::thermal_mixture(n, k, spec, mix));
  b.support_violation = std::isinf(b.lhs);
  for (const auto& [e, c] : mix.components()) {
    if (c == 0) continue;
    b.lemma_d_measured +=
        to_double(c) * relative_entropy_type(extremal_marginal(n, k, spec, e), shell_eta_mixture(n, k, spec, e));
  }
  b.rhs_leading = formulas::relent_leading(n, k, d);
  b.lemma_d_bound = formulas::lemma_d(n, k, d);
  b.degenerate = d == 2;
  r.relent = b;
  return r;
}

inline BoundReport full_report(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix) {
  BoundReport r = theorem1_report(n, k, spec, mix);
  r.relent = relent_report(n, k, spec, mix).relent;
  return r;
}

struct SamplingCheck {
  double measured = 0.0;
  double bound = 0.0;
};

/// sum_{Q in P_k} |Hyp_P^{(N,k)}(Q) - Mult_P^{(k)}(Q)| against 2kd/N.
inline SamplingCheck sampling_tv_check(const TypeVector& p, int n, int k) {
  if (p.length() != n) throw InvalidArgument("sampling_tv_check: P must have length N");
  if (k < 1 || k > n) throw InvalidArgument("sampling_tv_check: need 1 <= k <= N");
  const Distribution probs = p.distribution();
  Rational acc = 0;
  for (const auto& q : enumerate_types(k, p.dim())) acc += abs(hypergeometric_weight(p, k, q) - multinomial_weight(probs, k, q));
  return {to_double(acc), formulas::sampling_tv(n, k, p.dim())};
}

/// Exact form of the sampling sum, for callers comparing against rationals.
inline Rational sampling_tv_exact(const TypeVector& p, int k) {
  const Distribution probs = p.distribution();
  Rational acc = 0;
  for (const auto& q : enumerate_types(k, p.dim())) acc += abs(hypergeometric_weight(p, k, q) - multinomial_weight(probs, k, q));
  return acc;
}

struct Lemma2Result {
  double s1 = 0.0;  // 1^T Mat v, v = 1/P_beta
  double s2 = 0.0;  // 1^T Mat 1
  bool pass = false;
};

inline constexpr double kLemma2Tol = 1e-9;

/// Mat = A (A^T K A)^{-1} A^T for K = diag(1/P_beta) and any basis A of the
/// kernel of C = [1 ... 1; E_0 ... E_{d-1}]. Mat does not depend on A.
inline Lemma2Result lemma2_check(const EnergySpectrum& spec, double beta, const Eigen::MatrixXd& kernel_basis) {
  const int d = spec.dim();
  if (d < 3) throw DegenerateSpectrum("lemma2_check: the constraint kernel is trivial for d = 2");
  if (kernel_basis.rows() != d || kernel_basis.cols() != d - 2)
    throw ShapeMismatch("lemma2_check: kernel basis must be d x (d-2)");
  const GibbsSpec g = gibbs(spec, beta);
  Eigen::VectorXd inv_p(d);
  for (int x = 0; x < d; ++x) inv_p(x) = 1.0 / g.probs[static_cast<std::size_t>(x)];
  const Eigen::MatrixXd& a = kernel_basis;
  const Eigen::MatrixXd reduced = a.transpose() * inv_p.asDiagonal() * a;
  const Eigen::MatrixXd mat = a * reduced.fullPivLu().solve(a.transpose());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
  Lemma2Result r;
  r.s1 = ones.dot(mat * inv_p);
  r.s2 = ones.dot(mat * ones);
  r.pass = r.s1 <= d + kLemma2Tol && r.s2 <= 1.0 + kLemma2Tol;
  return r;
}

inline Eigen::MatrixXd constraint_matrix(const EnergySpectrum& spec) {
  Eigen::MatrixXd c(2, spec.dim());
  for (int x = 0; x < spec.dim(); ++x) {
    c(0, x) = 1.0;
    c(1, x) = static_cast<double>(spec.level(x));
  }
  return c;
}

inline Eigen::MatrixXd constraint_kernel(const EnergySpectrum& spec) {
  return constraint_matrix(spec).fullPivLu().kernel();
}

inline Lemma2Result lemma2_check(const EnergySpectrum& spec, double beta) {
  if (spec.dim() < 3) throw DegenerateSpectrum("lemma2_check: the constraint kernel is trivial for d = 2");
  return lemma2_check(spec, beta, constraint_kernel(spec));
}

struct RobustBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double asymmetry = 0.0;
  double leading = 0.0;  // k(5d + k - 1)/(2N)
};

/// Trace-norm distance of the k-qudit marginal of an arbitrary dense state to
/// the thermal mixture weighted by its shell populations, against
/// sqrt(2 Delta_asym) + k(5d + k - 1)/(2N).
inline RobustBound robust_bound(const DenseState& rho, int n, int k, const EnergySpectrum& spec,
                                std::size_t cap = kDefaultDenseCap) {
  if (k < 1 || k > n) throw InvalidArgument("robust_bound: need 1 <= k <= N");
  const ShellProjectors proj = build_projectors(n, spec, cap);
  if (rho.dim() != proj.dim()) throw ShapeMismatch("robust_bound: state does not live on N qudits");
  const DenseState twirled = epu_twirl(rho, proj);

  const int d = spec.dim();
  const std::size_t kept = checked_dimension(d, k, cap, "robust_bound");
  ComplexMatrix thermal = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(kept));
  for (std::size_t s = 0; s < proj.shell_count(); ++s) {
    double pop = 0.0;
    for (std::size_t i : proj.indices(s)) pop += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    const Energy e = proj.energies()[s];
    if (is_extremal_shell(n, spec, e)) {
      if (pop > 1e-12) throw OutOfRange("robust_bound: state populates the extremal shell E=" + std::to_string(e));
      continue;
    }
    if (pop <= 0.0) continue;
    thermal += pop * to_dense(thermal_power(spec, energy_per_qudit(n, e), k)).matrix();
  }
  RobustBound r;
  r.lhs = trace_norm(partial_trace_last(rho.matrix(), d, n, k) - thermal);
  r.asymmetry = relative_entropy_dense(rho, twirled);
  r.leading = formulas::trace_leading(n, k, d);
  r.rhs = std::sqrt(2.0 * r.asymmetry) + r.leading;
  return r;
}

}  // namespace epu
