#pragma once

// Independent oracles for the type engine. Nothing in here touches types or
// sampling weights. The qutrit marginals are the literal closed forms for
// E = 1 and E = 2 with levels (0, 1, 2). The brute-force path enumerates
// strings into a shell state and traces out qudits by index summation.

#include <cstddef>
#include <string>
#include <vector>

#include "epu/dense.hpp"

namespace epu::reference {

/// Default cap on d^N for brute-force shell construction.
inline constexpr std::size_t kBruteForceCap = 6561;  // 3^8

namespace detail {

inline std::size_t ipow(std::size_t base, int exp, std::size_t cap, const char* what) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > cap) throw DimensionCap(std::string(what) + ": dimension exceeds cap");
  }
  return r;
}

// Index of the length-k qutrit string with symbol `sym` at positions `at`
// (1-based, position 1 most significant) and 0 elsewhere.
inline std::size_t qutrit_index(int k, std::initializer_list<std::pair<int, int>> at) {
  std::size_t idx = 0;
  for (auto [pos, sym] : at) {
    std::size_t place = 1;
    for (int r = pos; r < k; ++r) place *= 3;
    idx += static_cast<std::size_t>(sym) * place;
  }
  return idx;
}

}  // namespace detail

/// (1/N) [ (N-k) |0><0|^{(x)k} + sum_{i<=k} |e_i><e_i| ], e_i = one |1> at site i.
inline RationalMatrix qutrit_E1_marginal(int n, int k, std::size_t cap = kDefaultDenseCap) {
  if (k < 1 || k > n) throw InvalidArgument("qutrit_E1_marginal: need 1 <= k <= N");
  RationalMatrix m(detail::ipow(3, k, cap, "qutrit_E1_marginal"));
  const Rational inv_n(1, n);
  m.add(0, 0, Rational(n - k) * inv_n);
  for (int i = 1; i <= k; ++i) {
    const std::size_t e = detail::qutrit_index(k, {{i, 1}});
    m.add(e, e, inv_n);
  }
  return m;
}

/// (1/M) [ sum_{i<j<=k} |e_ij><e_ij| + (N-k) sum_i |e_i><e_i| + sum_i |f_i><f_i|
///         + C(N-k+1, 2) |0><0| ],  M = N(N+1)/2,
/// with e_ij two |1>s, e_i one |1>, f_i one |2> inside the first k sites.
inline RationalMatrix qutrit_E2_marginal(int n, int k, std::size_t cap = kDefaultDenseCap) {
  if (k < 1 || k > n) throw InvalidArgument("qutrit_E2_marginal: need 1 <= k <= N");
  RationalMatrix m(detail::ipow(3, k, cap, "qutrit_E2_marginal"));
  const Rational inv_m(2, n * (n + 1));
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) {
      const std::size_t e = detail::qutrit_index(k, {{i, 1}, {j, 1}});
      m.add(e, e, inv_m);
    }
  for (int i = 1; i <= k; ++i) {
    const std::size_t e1 = detail::qutrit_index(k, {{i, 1}});
    m.add(e1, e1, Rational(n - k) * inv_m);
    const std::size_t e2 = detail::qutrit_index(k, {{i, 2}});
    m.add(e2, e2, inv_m);
  }
  const int rest = n - k;
  m.add(0, 0, Rational((rest + 1) * rest, 2) * inv_m);
  return m;
}

/// Uniform state on the energy-E eigenspace of N qudits, built by listing
/// every basis string, then traced down to the first k qudits.
inline RationalMatrix brute_force_marginal(int n, int k, const EnergySpectrum& spec, Energy e,
                                           std::size_t cap = kBruteForceCap) {
  if (k < 1 || k > n) throw InvalidArgument("brute_force_marginal: need 1 <= k <= N");
  const auto d = static_cast<std::size_t>(spec.dim());
  const std::size_t full = detail::ipow(d, n, cap, "brute_force_marginal");
  const std::size_t traced = detail::ipow(d, n - k, cap, "brute_force_marginal");
  const std::size_t kept = full / traced;

  std::vector<std::size_t> members;
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  for (std::size_t idx = 0; idx < full; ++idx) {
    Energy total = 0;
    for (int x : digits) total += spec.level(x);
    if (total == e) members.push_back(idx);
    // odometer increment, last site fastest
    for (int pos = n - 1; pos >= 0; --pos) {
      if (++digits[static_cast<std::size_t>(pos)] < spec.dim()) break;
      digits[static_cast<std::size_t>(pos)] = 0;
    }
  }
  if (members.empty()) throw UnattainableEnergy("brute_force_marginal: no string has energy " + std::to_string(e));

  RationalMatrix global(full);
  const Rational w(1, static_cast<long long>(members.size()));
  for (std::size_t idx : members) global.add(idx, idx, w);

  RationalMatrix reduced(kept);
  for (const auto& [key, v] : global.entries()) {
    const std::size_t a = key.first / traced, z = key.first % traced;
    const std::size_t b = key.second / traced, z2 = key.second % traced;
    if (z == z2) reduced.add(a, b, v);
  }
  return reduced;
}

}  // namespace epu::reference
