#include <gtest/gtest.h>

#include <random>

#include "epu/states.hpp"
#include "oracles.hpp"

using epu::EnergySpectrum;
using epu::Rational;
using epu::ShellMixture;
using epu::TypeDiagonalState;
using epu::TypeVector;

namespace {

TypeVector tv(std::vector<int> c) { return TypeVector(std::move(c)); }

const EnergySpectrum& qutrit() {
  static const EnergySpectrum s({0, 1, 2});
  return s;
}

}  // namespace

TEST(TypeDiagonalState, ValidatesWeights) {
  const EnergySpectrum q = qutrit();
  EXPECT_THROW(TypeDiagonalState(1, q, {{tv({1, 0, 0}), Rational(1, 2)}}), epu::InvalidArgument);
  EXPECT_THROW(TypeDiagonalState(1, q, {{tv({1, 0, 0}), Rational(3, 2)}, {tv({0, 1, 0}), Rational(-1, 2)}}),
               epu::InvalidArgument);
  EXPECT_THROW(TypeDiagonalState(1, q, {{tv({2, 0, 0}), Rational(1)}}), epu::InvalidArgument);
  EXPECT_THROW(TypeDiagonalState(1, q, {{tv({1, 0}), Rational(1)}}), epu::InvalidArgument);
  EXPECT_THROW(TypeDiagonalState(0, q, {}), epu::InvalidArgument);
  const TypeDiagonalState s(1, q, {{tv({1, 0, 0}), Rational(1)}, {tv({0, 1, 0}), Rational(0)}});
  EXPECT_EQ(s.weights().size(), 1u);  // zero weights are dropped
}

TEST(ExtremalMarginal, QutritClosedFormValues) {
  const auto m = epu::extremal_marginal(8, 1, qutrit(), 1);
  EXPECT_EQ(m.weight(tv({1, 0, 0})), Rational(7, 8));
  EXPECT_EQ(m.weight(tv({0, 1, 0})), Rational(1, 8));
  EXPECT_EQ(m.weight(tv({0, 0, 1})), 0);

  const auto m2 = epu::extremal_marginal(4, 1, qutrit(), 2);
  EXPECT_EQ(m2.weight(tv({1, 0, 0})), Rational(3, 5));
  EXPECT_EQ(m2.weight(tv({0, 1, 0})), Rational(3, 10));
  EXPECT_EQ(m2.weight(tv({0, 0, 1})), Rational(1, 10));
}

TEST(ExtremalMarginal, FullLengthReturnsShellWeights) {
  for (int n = 1; n <= 7; ++n)
    for (auto e : epu::attainable_energies(n, qutrit())) {
      const auto shell = epu::build_shell(n, qutrit(), e);
      const auto m = epu::extremal_marginal(n, n, qutrit(), e);
      EXPECT_EQ(m.weights().size(), shell.members.size());
      for (const auto& mem : shell.members) EXPECT_EQ(m.weight(mem.type), mem.weight);
    }
}

TEST(ExtremalMarginal, Errors) {
  EXPECT_THROW(epu::extremal_marginal(4, 1, qutrit(), 9), epu::UnattainableEnergy);
  EXPECT_THROW(epu::extremal_marginal(4, 5, qutrit(), 1), epu::InvalidArgument);
  EXPECT_THROW(epu::extremal_marginal(4, 0, qutrit(), 1), epu::InvalidArgument);
}

TEST(ExtremalMarginal, SingleQuditMeanEnergyIsEPerN) {
  const std::vector<EnergySpectrum> specs{EnergySpectrum({0, 1}), qutrit(), EnergySpectrum({0, 2, 5})};
  for (const auto& spec : specs)
    for (int n = 1; n <= 12; ++n)
      for (auto e : epu::attainable_energies(n, spec)) {
        const auto m = epu::extremal_marginal(n, 1, spec, e);
        EXPECT_EQ(epu::mean_energy_per_qudit(m), Rational(e, n));
        EXPECT_EQ(m.total(), 1);
      }
}

TEST(EtaPower, Examples) {
  const auto ground = epu::eta_power(qutrit(), epu::Distribution{1, 0, 0}, 4);
  EXPECT_EQ(ground.weights().size(), 1u);
  EXPECT_EQ(ground.weight(tv({4, 0, 0})), 1);

  const EnergySpectrum qubit({0, 1});
  const auto half = epu::eta_power(qubit, epu::Distribution{Rational(1, 2), Rational(1, 2)}, 2);
  EXPECT_EQ(half.weight(tv({2, 0})), Rational(1, 4));
  EXPECT_EQ(half.weight(tv({1, 1})), Rational(1, 2));
  EXPECT_EQ(half.weight(tv({0, 2})), Rational(1, 4));

  const epu::Distribution p{Rational(1, 6), Rational(1, 3), Rational(1, 2)};
  const auto one = epu::eta_power(qutrit(), p, 1);
  EXPECT_EQ(one.weight(tv({1, 0, 0})), p[0]);
  EXPECT_EQ(one.weight(tv({0, 1, 0})), p[1]);
  EXPECT_EQ(one.weight(tv({0, 0, 1})), p[2]);
  EXPECT_THROW(epu::eta_power(qutrit(), epu::Distribution{1, 0}, 2), epu::DimensionMismatch);
}

TEST(ShellEtaMixture, SingleTypeShellEqualsEtaPower) {
  const EnergySpectrum qubit({0, 1});
  for (int n = 1; n <= 9; ++n)
    for (int e = 0; e <= n; ++e)
      for (int k = 1; k <= 4; ++k)
        EXPECT_EQ(epu::shell_eta_mixture(n, k, qubit, e), epu::eta_power(qubit, tv({n - e, e}), k));
}

TEST(ShellEtaMixture, QutritEnergyTwoWeights) {
  for (int n = 3; n <= 12; ++n) {
    const auto shell = epu::build_shell(n, qutrit(), 2);
    for (const auto& m : shell.members) {
      if (m.type == tv({n - 2, 2, 0})) EXPECT_EQ(m.weight, Rational(n - 1, n + 1));
      if (m.type == tv({n - 1, 0, 1})) EXPECT_EQ(m.weight, Rational(2, n + 1));
    }
    for (int k = 1; k <= 3; ++k) {
      const auto a = epu::eta_power(qutrit(), tv({n - 2, 2, 0}), k);
      const auto b = epu::eta_power(qutrit(), tv({n - 1, 0, 1}), k);
      const auto want = epu::convex_combination<Rational>(
          {{Rational(n - 1, n + 1), a}, {Rational(2, n + 1), b}});
      EXPECT_EQ(epu::shell_eta_mixture(n, k, qutrit(), 2), want);
    }
  }
}

TEST(ShellEtaMixture, SingleQuditEqualsMarginal) {
  for (int n = 1; n <= 10; ++n)
    for (auto e : epu::attainable_energies(n, qutrit())) {
      const auto eta = epu::shell_eta_mixture(n, 1, qutrit(), e);
      EXPECT_EQ(eta, epu::extremal_marginal(n, 1, qutrit(), e));
      EXPECT_EQ(epu::mean_energy_per_qudit(eta), Rational(e, n));
    }
}

TEST(MixtureMarginal, Examples) {
  EXPECT_EQ(epu::mixture_marginal(8, 2, qutrit(), ShellMixture::single(3)), epu::extremal_marginal(8, 2, qutrit(), 3));

  const auto mix = epu::mixture_marginal(8, 1, qutrit(), ShellMixture({{1, Rational(1, 2)}, {2, Rational(1, 2)}}));
  const auto a = epu::extremal_marginal(8, 1, qutrit(), 1);
  const auto b = epu::extremal_marginal(8, 1, qutrit(), 2);
  for (const auto& q : epu::enumerate_types(1, 3))
    EXPECT_EQ(mix.weight(q), (a.weight(q) + b.weight(q)) / 2);
}

TEST(MixtureMarginal, DegeneracyWeightedMixtureIsMaximallyMixed) {
  const std::vector<EnergySpectrum> specs{EnergySpectrum({0, 1}), qutrit(), EnergySpectrum({0, 1, 4})};
  for (const auto& spec : specs)
    for (int n = 1; n <= 8; ++n) {
      const epu::BigInt total = boost::multiprecision::pow(epu::BigInt(spec.dim()), n);
      std::vector<ShellMixture::Component> comps;
      for (auto e : epu::attainable_energies(n, spec))
        comps.emplace_back(e, Rational(epu::build_shell(n, spec, e).degeneracy, total));
      const auto m = epu::mixture_marginal(n, 1, spec, ShellMixture(comps));
      for (const auto& q : epu::enumerate_types(1, spec.dim())) EXPECT_EQ(m.weight(q), Rational(1, spec.dim()));
      if (n >= 2) {
        const auto m2 = epu::mixture_marginal(n, 2, spec, ShellMixture(comps));
        const auto uniform = epu::eta_power(spec, epu::Distribution(spec.dim(), Rational(1, spec.dim())), 2);
        EXPECT_EQ(m2, uniform);
      }
    }
}

TEST(MixtureMarginal, ConvexityClosure) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto energies = epu::attainable_energies(n, qutrit());
    std::vector<ShellMixture::Component> comps;
    std::vector<long long> raw;
    long long sum = 0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
      raw.push_back(static_cast<long long>(rng() % 5));
      sum += raw.back();
    }
    if (sum == 0) continue;
    for (std::size_t i = 0; i < energies.size(); ++i) comps.emplace_back(energies[i], Rational(raw[i], sum));
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const auto m = epu::mixture_marginal(n, k, qutrit(), ShellMixture(comps));
    EXPECT_EQ(m.total(), 1);
    for (const auto& [q, w] : m.weights()) EXPECT_GT(w, 0);
    // Mixtures of mixtures stay inside the set: the marginal is linear in c_E.
    std::vector<std::pair<Rational, TypeDiagonalState>> parts;
    for (const auto& [e, c] : comps)
      if (c != 0) parts.emplace_back(c, epu::extremal_marginal(n, k, qutrit(), e));
    EXPECT_EQ(epu::convex_combination(parts), m);
  }
}

TEST(ShellMixtureType, Validation) {
  EXPECT_THROW(ShellMixture({{1, Rational(1, 2)}}), epu::InvalidArgument);
  EXPECT_THROW(ShellMixture({{1, Rational(1, 2)}, {1, Rational(1, 2)}}), epu::InvalidArgument);
  EXPECT_THROW(ShellMixture({{1, Rational(3, 2)}, {2, Rational(-1, 2)}}), epu::InvalidArgument);
  EXPECT_THROW(epu::mixture_marginal(3, 1, qutrit(), ShellMixture({{1, Rational(1)}, {99, Rational(0)}})),
               epu::UnattainableEnergy);
}

TEST(PartialTraceType, MarginalChainConsistency) {
  for (int d = 2; d <= 3; ++d) {
    std::vector<epu::Energy> levels;
    for (int x = 0; x < d; ++x) levels.push_back(x);
    const EnergySpectrum spec(levels);
    for (int n = 2; n <= 10; ++n)
      for (auto e : epu::attainable_energies(n, spec))
        for (int k = 2; k <= n; ++k) {
          const auto big = epu::extremal_marginal(n, k, spec, e);
          for (int kp = 1; kp < k; ++kp)
            ASSERT_EQ(epu::partial_trace_type(big, kp), epu::extremal_marginal(n, kp, spec, e))
                << "d=" << d << " N=" << n << " E=" << e << " k=" << k << " k'=" << kp;
        }
  }
}

TEST(PartialTraceType, GroundStateAndContract) {
  const auto ground = epu::eta_power(qutrit(), epu::Distribution{1, 0, 0}, 5);
  const auto traced = epu::partial_trace_type(ground, 2);
  EXPECT_EQ(traced.weights().size(), 1u);
  EXPECT_EQ(traced.weight(tv({2, 0, 0})), 1);
  EXPECT_THROW(epu::partial_trace_type(ground, 5), epu::InvalidArgument);
  EXPECT_THROW(epu::partial_trace_type(ground, 0), epu::InvalidArgument);
}

TEST(PartialTraceType, ProductStatesStayProducts) {
  const epu::Distribution p{Rational(1, 5), Rational(1, 2), Rational(3, 10)};
  const auto s = epu::eta_power(qutrit(), p, 5);
  for (int kp = 1; kp < 5; ++kp) EXPECT_EQ(epu::partial_trace_type(s, kp), epu::eta_power(qutrit(), p, kp));
}

TEST(ToDense, Examples) {
  const auto m = epu::to_dense(epu::extremal_marginal(8, 1, qutrit(), 1));
  EXPECT_NEAR(m.matrix()(0, 0).real(), 7.0 / 8, 1e-15);
  EXPECT_NEAR(m.matrix()(1, 1).real(), 1.0 / 8, 1e-15);
  EXPECT_EQ(m.matrix()(2, 2).real(), 0.0);

  const EnergySpectrum qubit({0, 1});
  const auto half = epu::eta_power(qubit, epu::Distribution{Rational(1, 2), Rational(1, 2)}, 2);
  const auto exact = epu::to_exact_matrix(half);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(exact.at(i, j), i == j ? Rational(1, 4) : Rational(0));
  EXPECT_TRUE(epu::to_dense(half).matrix().isApprox(epu::ComplexMatrix::Identity(4, 4) / 4.0, 1e-15));

  EXPECT_THROW(epu::to_dense(epu::extremal_marginal(12, 8, qutrit(), 3)), epu::DimensionCap);
}

TEST(ToDense, UnitTraceAndFlatInsideTypeClasses) {
  for (int n = 2; n <= 8; ++n)
    for (auto e : epu::attainable_energies(n, qutrit())) {
      const int k = std::min(n, 4);
      const auto s = epu::extremal_marginal(n, k, qutrit(), e);
      const auto exact = epu::to_exact_matrix(s);
      EXPECT_EQ(exact.trace(), 1);
      std::map<TypeVector, Rational> seen;
      for (std::size_t i = 0; i < exact.dim(); ++i) {
        const auto t = epu::type_of_index(i, 3, k);
        auto [it, fresh] = seen.emplace(t, exact.at(i, i));
        if (!fresh) EXPECT_EQ(it->second, exact.at(i, i));
      }
      EXPECT_TRUE(epu::DenseState::satisfies_invariants(epu::to_dense(s).matrix()));
    }
}
