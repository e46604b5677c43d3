#pragma once

// Gibbs distributions of a single qudit and the inverse-temperature solve
// u -> beta(u) that matches a target mean energy per qudit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "epu/combinatorics.hpp"
#include "epu/states.hpp"

namespace epu {

struct GibbsSpec {
  double beta = 0.0;
  std::vector<double> probs;      // P_beta(x)
  double log_partition = 0.0;     // ln Z_beta, exact (not shifted)
};

/// P_beta(x) = exp(-beta E_x) / Z, evaluated with a max-shift on the exponent.
inline GibbsSpec gibbs(const EnergySpectrum& spec, double beta) {
  if (!std::isfinite(beta)) throw InvalidArgument("gibbs: beta must be finite");
  const int d = spec.dim();
  std::vector<double> expo(static_cast<std::size_t>(d));
  for (int x = 0; x < d; ++x) expo[static_cast<std::size_t>(x)] = -beta * static_cast<double>(spec.level(x));
  const double shift = *std::max_element(expo.begin(), expo.end());
  double z = 0.0;
  GibbsSpec g;
  g.beta = beta;
  g.probs.resize(static_cast<std::size_t>(d));
  for (int x = 0; x < d; ++x) {
    const double w = std::exp(expo[static_cast<std::size_t>(x)] - shift);
    g.probs[static_cast<std::size_t>(x)] = w;
    z += w;
  }
  for (double& p : g.probs) p /= z;
  g.log_partition = shift + std::log(z);
  return g;
}

inline double mean_energy(const EnergySpectrum& spec, double beta) {
  const GibbsSpec g = gibbs(spec, beta);
  double u = 0.0;
  for (int x = 0; x < spec.dim(); ++x) u += g.probs[static_cast<std::size_t>(x)] * static_cast<double>(spec.level(x));
  return u;
}

/// Inverse temperature with mean_energy(beta) = u, for E_0 < u < E_{d-1}.
///
/// mean_energy is strictly decreasing in beta, so the root is unique. The
/// bracket starts at [-1, 1] and doubles outward. Bisection then continues
/// until the bracket collapses to adjacent doubles.
inline double solve_beta(const EnergySpectrum& spec, double u) {
  const auto lo_e = static_cast<double>(spec.lowest());
  const auto hi_e = static_cast<double>(spec.highest());
  if (!(u > lo_e && u < hi_e)) throw OutOfRange("solve_beta: target mean energy must lie strictly inside (E_0, E_{d-1})");
  double lo = -1.0, hi = 1.0;  // mean_energy(lo) >= u >= mean_energy(hi)
  while (mean_energy(spec, lo) < u) {
    hi = lo;
    lo *= 2.0;
    if (!std::isfinite(lo)) throw OutOfRange("solve_beta: bracket diverged");
  }
  while (mean_energy(spec, hi) > u) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw OutOfRange("solve_beta: bracket diverged");
  }
  double best = lo, best_err = std::abs(mean_energy(spec, lo) - u);
  // Bisect until the bracket collapses to adjacent doubles.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double m = mean_energy(spec, mid);
    const double err = std::abs(m - u);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err == 0.0 || mid == lo || mid == hi) break;
    if (m > u)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

/// Gibbs state matching mean energy u per qudit.
inline GibbsSpec gibbs_at_energy(const EnergySpectrum& spec, double u) { return gibbs(spec, solve_beta(spec, u)); }

/// tau(u)^{(x)k} as a (floating) type-diagonal state.
inline FloatTypeDiagonalState thermal_power(const EnergySpectrum& spec, double u, int k) {
  const GibbsSpec g = gibbs_at_energy(spec, u);
  return eta_power<double>(spec, std::span<const double>(g.probs), k);
}

/// Exact mean energy per qudit of shell E for N qudits, E / N.
inline double energy_per_qudit(int n, Energy e) { return static_cast<double>(e) / static_cast<double>(n); }

}  // namespace epu
