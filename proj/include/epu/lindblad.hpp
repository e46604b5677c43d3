#pragma once

// Dense engine for the energy-conserving Lindbladian L = L_block + L_deph built
// from the shell projectors P_E of the N-qudit Hamiltonian:
//
//   L_block(rho) = sum_E gamma_E [ tr(P_E rho P_E)/g(E) P_E - P_E rho P_E ]
//   L_deph(rho)  = sum_E lambda_E [ P_E rho P_E - {P_E, rho}/2 ]
//
// Its fixed point is the EPU twirl sum_E tr(P_E rho) P_E / g(E).

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "epu/dense.hpp"
#include "epu/metrics.hpp"

namespace epu {

/// Largest Hilbert dimension squared accepted by superoperator assembly.
inline constexpr std::size_t kDefaultSuperoperatorCap = 256;

/// Resolution of the identity into energy shells. The projectors are 0/1
/// diagonal in the computational basis, so each is stored as a mask.
class ShellProjectors {
 public:
  ShellProjectors(int n, EnergySpectrum spec, std::size_t cap = kDefaultDenseCap)
      : n_(n), spec_(std::move(spec)) {
    if (n_ < 1) throw InvalidArgument("ShellProjectors: N must be >= 1");
    const std::vector<Energy> basis = basis_energies(n_, spec_, cap);
    std::map<Energy, int> ids;
    for (Energy e : basis) ids.emplace(e, 0);
    int next = 0;
    for (auto& [e, id] : ids) {
      id = next++;
      energies_.push_back(e);
    }
    shell_of_.reserve(basis.size());
    degeneracy_.assign(energies_.size(), 0);
    for (Energy e : basis) {
      const int s = ids.at(e);
      shell_of_.push_back(s);
      ++degeneracy_[static_cast<std::size_t>(s)];
    }
  }

  int qudits() const { return n_; }
  const EnergySpectrum& spectrum() const { return spec_; }
  std::size_t dim() const { return shell_of_.size(); }
  std::size_t shell_count() const { return energies_.size(); }

  /// Attainable energies, ascending; shell ids index into this.
  const std::vector<Energy>& energies() const { return energies_; }
  const std::vector<int>& shell_of_index() const { return shell_of_; }
  std::size_t degeneracy(std::size_t shell) const { return degeneracy_[shell]; }

  std::size_t shell_id(Energy e) const {
    auto it = std::lower_bound(energies_.begin(), energies_.end(), e);
    if (it == energies_.end() || *it != e) throw UnattainableEnergy("ShellProjectors: energy " + std::to_string(e));
    return static_cast<std::size_t>(it - energies_.begin());
  }

  Eigen::VectorXd mask(std::size_t shell) const {
    Eigen::VectorXd m(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) m(static_cast<Eigen::Index>(i)) = shell_of_[i] == static_cast<int>(shell);
    return m;
  }

  ComplexMatrix projector(std::size_t shell) const { return mask(shell).cast<Complex>().asDiagonal(); }

  std::vector<std::size_t> indices(std::size_t shell) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim(); ++i)
      if (shell_of_[i] == static_cast<int>(shell)) out.push_back(i);
    return out;
  }

 private:
  int n_;
  EnergySpectrum spec_;
  std::vector<Energy> energies_;
  std::vector<int> shell_of_;
  std::vector<std::size_t> degeneracy_;
};

inline ShellProjectors build_projectors(int n, const EnergySpectrum& spec, std::size_t cap = kDefaultDenseCap) {
  return ShellProjectors(n, spec, cap);
}

/// Per-shell rates gamma_E (block mixing) and lambda_E (dephasing).
struct LindbladParams {
  std::map<Energy, double> gammas;
  std::map<Energy, double> lambdas;

  static LindbladParams uniform(const ShellProjectors& proj, double gamma, double lambda) {
    LindbladParams p;
    for (Energy e : proj.energies()) {
      p.gammas[e] = gamma;
      p.lambdas[e] = lambda;
    }
    return p;
  }

  void validate(const ShellProjectors& proj) const {
    for (Energy e : proj.energies()) {
      auto g = gammas.find(e), l = lambdas.find(e);
      if (g == gammas.end() || l == lambdas.end())
        throw InvalidArgument("LindbladParams: no rate for shell E=" + std::to_string(e));
      if (g->second < 0.0 || l->second < 0.0) throw InvalidArgument("LindbladParams: negative rate");
    }
  }

  double gamma(Energy e) const { return gammas.at(e); }
  double lambda(Energy e) const { return lambdas.at(e); }

  /// Gamma = min over shells of min(gamma_E, lambda_E).
  double slowest_rate(const ShellProjectors& proj) const {
    validate(proj);
    double r = std::numeric_limits<double>::infinity();
    for (Energy e : proj.energies()) r = std::min({r, gamma(e), lambda(e)});
    return r;
  }
};

namespace detail {

inline void require_dim(const ComplexMatrix& m, const ShellProjectors& proj, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != proj.dim() || m.rows() != m.cols())
    throw ShapeMismatch(std::string(what) + ": operator does not match the projector dimension");
}

}  // namespace detail

/// sum_E tr(P_E rho) P_E / g(E).
inline DenseState epu_twirl(const DenseState& rho, const ShellProjectors& proj) {
  detail::require_dim(rho.matrix(), proj, "epu_twirl");
  std::vector<double> pop(proj.shell_count(), 0.0);
  const auto& shell = proj.shell_of_index();
  for (std::size_t i = 0; i < proj.dim(); ++i)
    pop[static_cast<std::size_t>(shell[i])] += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  const auto n = static_cast<Eigen::Index>(proj.dim());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < proj.dim(); ++i) {
    const auto s = static_cast<std::size_t>(shell[i]);
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = pop[s] / static_cast<double>(proj.degeneracy(s));
  }
  return DenseState::unchecked(std::move(out));
}

/// Delta_asym(rho) = D(rho || T_EPU(rho)).
inline double asymmetry(const DenseState& rho, const ShellProjectors& proj) {
  return relative_entropy_dense(rho, epu_twirl(rho, proj));
}

enum class GeneratorPart { kFull, kBlock, kDephasing };

struct GeneratorOptions {
  GeneratorPart part = GeneratorPart::kFull;
  /// Adds -i[H, rho]; off by default since it does not change the fixed point.
  bool include_hamiltonian = false;
};

/// L(rho), evaluated literally from the projectors.
inline ComplexMatrix apply_generator(const ComplexMatrix& rho, const LindbladParams& params, const ShellProjectors& proj,
                                     GeneratorOptions opts = {}) {
  detail::require_dim(rho, proj, "apply_generator");
  params.validate(proj);
  const auto n = static_cast<Eigen::Index>(proj.dim());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  const bool block = opts.part != GeneratorPart::kDephasing;
  const bool deph = opts.part != GeneratorPart::kBlock;
  for (std::size_t s = 0; s < proj.shell_count(); ++s) {
    const Energy e = proj.energies()[s];
    const Eigen::VectorXcd m = proj.mask(s).cast<Complex>();
    const ComplexMatrix p_rho_p = m.asDiagonal() * rho * m.asDiagonal();
    if (block) {
      const Complex tr = p_rho_p.trace() / static_cast<double>(proj.degeneracy(s));
      ComplexMatrix term = -p_rho_p;
      term.diagonal() += tr * m;
      out += params.gamma(e) * term;
    }
    if (deph) {
      const ComplexMatrix anti = m.asDiagonal() * rho + rho * m.asDiagonal();
      out += params.lambda(e) * (p_rho_p - 0.5 * anti);
    }
  }
  if (opts.include_hamiltonian) {
    const std::vector<Energy> h = basis_energies(proj.qudits(), proj.spectrum(), proj.dim());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        out(i, j) += Complex(0.0, -1.0) *
                     static_cast<double>(h[static_cast<std::size_t>(i)] - h[static_cast<std::size_t>(j)]) * rho(i, j);
  }
  return out;
}

/// rho(t) = e^{tL}(rho0): diagonal blocks relax toward tr(P_E rho0) P_E/g(E)
/// at rate gamma_E, coherences between shells E != E' decay at
/// (lambda_E + lambda_E')/2.
inline DenseState evolve_closed_form(const DenseState& rho0, double t, const LindbladParams& params,
                                     const ShellProjectors& proj) {
  detail::require_dim(rho0.matrix(), proj, "evolve_closed_form");
  if (t < 0.0) throw InvalidArgument("evolve_closed_form: t must be >= 0");
  params.validate(proj);
  const std::size_t shells = proj.shell_count();
  std::vector<double> gam(shells), lam(shells), pop(shells, 0.0);
  for (std::size_t s = 0; s < shells; ++s) {
    gam[s] = params.gamma(proj.energies()[s]);
    lam[s] = params.lambda(proj.energies()[s]);
  }
  const auto& shell = proj.shell_of_index();
  const ComplexMatrix& r0 = rho0.matrix();
  for (std::size_t i = 0; i < proj.dim(); ++i)
    pop[static_cast<std::size_t>(shell[i])] += r0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();

  const auto n = static_cast<Eigen::Index>(proj.dim());
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = static_cast<std::size_t>(shell[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto b = static_cast<std::size_t>(shell[static_cast<std::size_t>(j)]);
      if (a != b) {
        out(i, j) = std::exp(-0.5 * (lam[a] + lam[b]) * t) * r0(i, j);
      } else {
        const double keep = std::exp(-gam[a] * t);
        out(i, j) = keep * r0(i, j);
        if (i == j) out(i, j) += (1.0 - keep) * pop[a] / static_cast<double>(proj.degeneracy(a));
      }
    }
  }
  return DenseState::unchecked(std::move(out));
}

/// The generator as a D^2 x D^2 matrix acting on column-stacked operators,
/// vec(X)[i + D j] = X(i, j).
inline Eigen::MatrixXd superoperator_matrix(const LindbladParams& params, const ShellProjectors& proj,
                                            GeneratorPart part = GeneratorPart::kFull,
                                            std::size_t cap = kDefaultSuperoperatorCap) {
  const std::size_t d = proj.dim();
  if (d * d > cap)
    throw DimensionCap("superoperator_matrix: (" + std::to_string(d) + ")^2 exceeds cap " + std::to_string(cap));
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd sup = Eigen::MatrixXd::Zero(n * n, n * n);
  ComplexMatrix unit = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      unit(i, j) = 1.0;
      const ComplexMatrix img = apply_generator(unit, params, proj, {part, false});
      unit(i, j) = 0.0;
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index a = 0; a < n; ++a) sup(a + n * b, i + n * j) = img(a, b).real();
    }
  return sup;
}

/// Sorted (ascending) eigenvalues of the assembled generator.
inline std::vector<double> superoperator_spectrum(const LindbladParams& params, const ShellProjectors& proj,
                                                  std::size_t cap = kDefaultSuperoperatorCap) {
  const Eigen::MatrixXd sup = superoperator_matrix(params, proj, GeneratorPart::kFull, cap);
  std::vector<double> out;
  if ((sup - sup.transpose()).cwiseAbs().maxCoeff() <= 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sup, Eigen::EigenvaluesOnly);
    out.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(sup, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// The eigenvalue multiset implied by the block structure: 0 once per shell,
/// -gamma_E with multiplicity g(E)^2 - 1, and -(lambda_E + lambda_E')/2 with
/// multiplicity g(E) g(E') for every ordered pair E != E'. Sorted ascending.
inline std::vector<double> predicted_superoperator_spectrum(const LindbladParams& params, const ShellProjectors& proj) {
  params.validate(proj);
  std::vector<double> out;
  const std::size_t shells = proj.shell_count();
  for (std::size_t a = 0; a < shells; ++a) {
    const std::size_t ga = proj.degeneracy(a);
    const Energy ea = proj.energies()[a];
    out.push_back(0.0);
    out.insert(out.end(), ga * ga - 1, -params.gamma(ea));
    for (std::size_t b = 0; b < shells; ++b) {
      if (a == b) continue;
      const double rate = -0.5 * (params.lambda(ea) + params.lambda(proj.energies()[b]));
      out.insert(out.end(), ga * proj.degeneracy(b), rate);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ConvergencePoint {
  double t = 0.0;
  double gap = 0.0;       // ||rho(t) - T_EPU(rho0)||_1
  double envelope = 0.0;  // 2 exp(-Gamma t)
};

inline std::vector<ConvergencePoint> convergence_check(const DenseState& rho0, const LindbladParams& params,
                                                       const ShellProjectors& proj, const std::vector<double>& times) {
  const DenseState target = epu_twirl(rho0, proj);
  const double rate = params.slowest_rate(proj);
  std::vector<ConvergencePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw InvalidArgument("convergence_check: negative time");
    const DenseState rt = evolve_closed_form(rho0, t, params, proj);
    out.push_back({t, trace_norm_diff_dense(rt, target), 2.0 * std::exp(-rate * t)});
  }
  return out;
}

/// Time after which the envelope 2 exp(-Gamma t) drops to epsilon.
inline double envelope_time(double slowest_rate, double epsilon) { return std::log(2.0 / epsilon) / slowest_rate; }

}  // namespace epu
