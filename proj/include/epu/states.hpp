#pragma once

// Type-diagonal states: diagonal in the product energy basis and flat inside
// every type class, so that a k-qudit state is one weight per type Q in P_k.
// Extremal shell marginals, products eta_P^{(x)k} and their mixtures all live
// here; none of them is ever densified unless to_dense is called.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epu/combinatorics.hpp"
#include "epu/dense.hpp"

namespace epu {

/// Weights c_Q >= 0 on the normalized type projectors of k qudits.
///
/// `Scalar` is Rational on the exact path and double after the single
/// exact-to-float boundary (thermal states). Zero weights are never stored.
template <class Scalar>
class BasicTypeDiagonalState {
 public:
  using Weights = std::map<TypeVector, Scalar>;

  BasicTypeDiagonalState(int k, EnergySpectrum spec, Weights weights)
      : k_(k), spec_(std::move(spec)) {
    if (k_ < 1) throw InvalidArgument("TypeDiagonalState: k must be >= 1");
    Scalar total(0);
    for (auto& [q, w] : weights) {
      if (q.length() != k_ || q.dim() != spec_.dim())
        throw InvalidArgument("TypeDiagonalState: key " + q.str() + " has wrong length or dimension");
      if (w < 0) throw InvalidArgument("TypeDiagonalState: negative weight on " + q.str());
      total += w;
      if (w != 0) weights_.emplace(q, std::move(w));
    }
    if constexpr (std::is_same_v<Scalar, Rational>) {
      if (total != 1) throw InvalidArgument("TypeDiagonalState: weights do not sum to 1");
    } else {
      if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("TypeDiagonalState: weights do not sum to 1");
    }
  }

  int size() const { return k_; }
  int dim() const { return spec_.dim(); }
  const EnergySpectrum& spectrum() const { return spec_; }
  const Weights& weights() const { return weights_; }

  Scalar weight(const TypeVector& q) const {
    auto it = weights_.find(q);
    return it == weights_.end() ? Scalar(0) : it->second;
  }

  Scalar total() const {
    Scalar t(0);
    for (const auto& [q, w] : weights_) t += w;
    return t;
  }

  BasicTypeDiagonalState<double> to_float() const {
    typename BasicTypeDiagonalState<double>::Weights w;
    for (const auto& [q, c] : weights_) w.emplace(q, to_double(c));
    return BasicTypeDiagonalState<double>::from_normalized(k_, spec_, std::move(w));
  }

  /// Skips the normalization check; for results of weight-preserving maps.
  static BasicTypeDiagonalState from_normalized(int k, EnergySpectrum spec, Weights weights) {
    BasicTypeDiagonalState s;
    s.k_ = k;
    s.spec_ = std::move(spec);
    for (auto& [q, w] : weights)
      if (w != 0) s.weights_.emplace(q, std::move(w));
    return s;
  }

  friend bool operator==(const BasicTypeDiagonalState& a, const BasicTypeDiagonalState& b) {
    return a.k_ == b.k_ && a.spec_ == b.spec_ && a.weights_ == b.weights_;
  }

 private:
  BasicTypeDiagonalState() : spec_({0, 1}) {}

  int k_ = 0;
  EnergySpectrum spec_;
  Weights weights_;
};

using TypeDiagonalState = BasicTypeDiagonalState<Rational>;
using FloatTypeDiagonalState = BasicTypeDiagonalState<double>;

/// Convex weights over total energies of an N-qudit EPU-invariant state.
class ShellMixture {
 public:
  using Component = std::pair<Energy, Rational>;

  explicit ShellMixture(std::vector<Component> components) : components_(std::move(components)) {
    Rational total = 0;
    std::map<Energy, int> seen;
    for (const auto& [e, c] : components_) {
      if (c < 0) throw InvalidArgument("ShellMixture: negative weight");
      if (++seen[e] > 1) throw InvalidArgument("ShellMixture: repeated energy " + std::to_string(e));
      total += c;
    }
    if (total != 1) throw InvalidArgument("ShellMixture: weights do not sum to 1");
  }

  static ShellMixture single(Energy e) { return ShellMixture({{e, Rational(1)}}); }

  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
};

/// True for the two pure shells E = N E_0 and E = N E_{d-1}.
inline bool is_extremal_shell(int n, const EnergySpectrum& spec, Energy e) {
  return e == static_cast<Energy>(n) * spec.lowest() || e == static_cast<Energy>(n) * spec.highest();
}

/// k-qudit marginal of the normalized projector onto the energy-E shell:
/// weight on Q is sum_{P in S(E)} mu_E(P) Hyp_P^{(N,k)}(Q).
inline TypeDiagonalState extremal_marginal(int n, int k, const EnergySpectrum& spec, Energy e) {
  if (k < 1 || k > n) throw InvalidArgument("extremal_marginal: need 1 <= k <= N");
  const EnergyShell shell = build_shell(n, spec, e);
  const auto sub_types = enumerate_types(k, spec.dim());
  TypeDiagonalState::Weights w;
  for (const auto& m : shell.members) {
    for (const auto& q : sub_types) {
      Rational h = hypergeometric_weight(m.type, k, q);
      if (h != 0) w[q] += m.weight * h;
    }
  }
  return TypeDiagonalState(k, spec, std::move(w));
}

/// eta_P^{(x)k}: weight on Q is Mult_P^{(k)}(Q).
template <class Scalar>
BasicTypeDiagonalState<Scalar> eta_power(const EnergySpectrum& spec, std::span<const Scalar> probs, int k) {
  if (static_cast<int>(probs.size()) != spec.dim()) throw DimensionMismatch("eta_power: P has wrong dimension");
  typename BasicTypeDiagonalState<Scalar>::Weights w;
  for (const auto& q : enumerate_types(k, spec.dim())) {
    Scalar m = multinomial_weight<Scalar>(probs, k, q);
    if (m != 0) w.emplace(q, std::move(m));
  }
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return BasicTypeDiagonalState<Scalar>(k, spec, std::move(w));
  } else {
    return BasicTypeDiagonalState<Scalar>::from_normalized(k, spec, std::move(w));
  }
}

inline TypeDiagonalState eta_power(const EnergySpectrum& spec, const Distribution& probs, int k) {
  return eta_power<Rational>(spec, std::span<const Rational>(probs), k);
}

inline TypeDiagonalState eta_power(const EnergySpectrum& spec, const TypeVector& p, int k) {
  return eta_power(spec, p.distribution(), k);
}

/// sum_{P in S(E)} mu_E(P) eta_P^{(x)k}.
inline TypeDiagonalState shell_eta_mixture(int n, int k, const EnergySpectrum& spec, Energy e) {
  if (k < 1) throw InvalidArgument("shell_eta_mixture: need k >= 1");
  const EnergyShell shell = build_shell(n, spec, e);
  const auto sub_types = enumerate_types(k, spec.dim());
  TypeDiagonalState::Weights w;
  for (const auto& m : shell.members) {
    const Distribution p = m.type.distribution();
    for (const auto& q : sub_types) {
      Rational mult = multinomial_weight(p, k, q);
      if (mult != 0) w[q] += m.weight * mult;
    }
  }
  return TypeDiagonalState(k, spec, std::move(w));
}

/// k-qudit marginal of sum_E c_E rho_E^{(N)}.
inline TypeDiagonalState mixture_marginal(int n, int k, const EnergySpectrum& spec, const ShellMixture& mix) {
  TypeDiagonalState::Weights w;
  for (const auto& [e, c] : mix.components()) {
    if (c == 0) {
      if (!is_attainable(n, spec, e)) throw UnattainableEnergy("mixture_marginal: energy " + std::to_string(e));
      continue;
    }
    const TypeDiagonalState part = extremal_marginal(n, k, spec, e);
    for (const auto& [q, x] : part.weights()) w[q] += c * x;
  }
  return TypeDiagonalState(k, spec, std::move(w));
}

/// Trace a k-qudit type-diagonal state down to its first k' qudits; the
/// type of a uniformly random k'-substring of a type-Q string is
/// hypergeometric.
inline TypeDiagonalState partial_trace_type(const TypeDiagonalState& state, int k_prime) {
  if (k_prime < 1 || k_prime >= state.size())
    throw InvalidArgument("partial_trace_type: need 1 <= k' < k");
  const auto sub_types = enumerate_types(k_prime, state.dim());
  TypeDiagonalState::Weights w;
  for (const auto& [q, c] : state.weights()) {
    for (const auto& qp : sub_types) {
      Rational h = hypergeometric_weight(q, k_prime, qp);
      if (h != 0) w[qp] += c * h;
    }
  }
  return TypeDiagonalState(k_prime, state.spectrum(), std::move(w));
}

/// Mean energy per qudit, sum_Q c_Q E(Q) / k.
template <class Scalar>
Scalar mean_energy_per_qudit(const BasicTypeDiagonalState<Scalar>& s) {
  Scalar acc(0);
  for (const auto& [q, c] : s.weights()) acc += c * Scalar(q.energy(s.spectrum()));
  return acc / Scalar(s.size());
}

/// Densify exactly: entry c_Q / |T_Q| on every basis string of type Q.
inline RationalMatrix to_exact_matrix(const TypeDiagonalState& s, std::size_t cap = kDefaultDenseCap) {
  const std::size_t dim = checked_dimension(s.dim(), s.size(), cap, "to_exact_matrix");
  std::map<TypeVector, Rational> per_string;
  for (const auto& [q, c] : s.weights()) per_string.emplace(q, c / Rational(type_class_size(q)));
  RationalMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    auto it = per_string.find(type_of_index(i, s.dim(), s.size()));
    if (it != per_string.end()) m.add(i, i, it->second);
  }
  return m;
}

template <class Scalar>
DenseState to_dense(const BasicTypeDiagonalState<Scalar>& s, std::size_t cap = kDefaultDenseCap) {
  const std::size_t dim = checked_dimension(s.dim(), s.size(), cap, "to_dense");
  std::map<TypeVector, double> per_string;
  for (const auto& [q, c] : s.weights())
    per_string.emplace(q, to_double(c) / type_class_size(q).template convert_to<double>());
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < dim; ++i) {
    auto it = per_string.find(type_of_index(i, s.dim(), s.size()));
    if (it != per_string.end()) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = it->second;
  }
  return DenseState::unchecked(std::move(m));
}

/// sum_i w_i s_i for states on the same (k, spectrum).
template <class Scalar>
BasicTypeDiagonalState<Scalar> convex_combination(
    const std::vector<std::pair<Scalar, BasicTypeDiagonalState<Scalar>>>& parts) {
  if (parts.empty()) throw InvalidArgument("convex_combination: no components");
  const auto& first = parts.front().second;
  typename BasicTypeDiagonalState<Scalar>::Weights w;
  for (const auto& [c, s] : parts) {
    if (s.size() != first.size() || !(s.spectrum() == first.spectrum()))
      throw ShapeMismatch("convex_combination: components differ in k or spectrum");
    for (const auto& [q, x] : s.weights()) w[q] += c * x;
  }
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return BasicTypeDiagonalState<Scalar>(first.size(), first.spectrum(), std::move(w));
  } else {
    return BasicTypeDiagonalState<Scalar>::from_normalized(first.size(), first.spectrum(), std::move(w));
  }
}

}  // namespace epu
