// Acceptance run: one PASS/FAIL line per criterion, with wall time. Exit
// status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "epu/app.hpp"
#include "epu/bounds.hpp"
#include "epu/lindblad.hpp"
#include "epu/random.hpp"
#include "epu/reference.hpp"

using namespace epu;

namespace {

/// Collects the first few failure descriptions of a criterion.
struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (notes.size() < 5) notes.push_back(what);
  }
};

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(EPU_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  if (!in) throw Error("cannot read " + name);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sweep(const std::string& cfg, unsigned threads, std::uint64_t seed) {
  app::RunOptions opts;
  opts.threads = threads;
  opts.seed = seed;
  std::ostringstream out;
  const int rc = app::cmd_sweep(Config::parse(cfg), cfg, opts, out);
  if (rc != app::kOk) throw Error("sweep exit " + std::to_string(rc));
  return out.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    out.push_back(f);
  }
  return out;
}

std::string key(int n, int k, Energy e) {
  return "N=" + std::to_string(n) + " k=" + std::to_string(k) + " E=" + std::to_string(e);
}

// ---------------------------------------------------------------- criteria

Verdict oracle_equivalence() {
  Verdict v;
  for (const auto& spec : {EnergySpectrum({0, 1}), EnergySpectrum({0, 1, 2}), EnergySpectrum({0, 1, 3})})
    for (int n = 1; n <= 6; ++n)
      for (Energy e : attainable_energies(n, spec))
        for (int k = 1; k <= n; ++k)
          v.require(to_exact_matrix(extremal_marginal(n, k, spec, e)) ==
                        reference::brute_force_marginal(n, k, spec, e),
                    "d=" + std::to_string(spec.dim()) + " " + key(n, k, e));
  return v;
}

Verdict closed_forms() {
  Verdict v;
  const EnergySpectrum q({0, 1, 2});
  for (int n = 1; n <= 20; ++n)
    for (int k = 1; k <= std::min(n, 4); ++k) {
      v.require(reference::qutrit_E1_marginal(n, k) == to_exact_matrix(extremal_marginal(n, k, q, 1)), key(n, k, 1));
      if (n >= 2)
        v.require(reference::qutrit_E2_marginal(n, k) == to_exact_matrix(extremal_marginal(n, k, q, 2)),
                  key(n, k, 2));
    }
  const auto a = reference::qutrit_E1_marginal(8, 1);
  v.require(a.at(0, 0) == Rational(7, 8) && a.at(1, 1) == Rational(1, 8) && a.at(2, 2) == 0, "diag(7/8,1/8,0)");
  const auto b = reference::qutrit_E2_marginal(4, 1);
  v.require(b.at(0, 0) == Rational(3, 5) && b.at(1, 1) == Rational(3, 10) && b.at(2, 2) == Rational(1, 10),
            "diag(3/5,3/10,1/10)");
  return v;
}

Verdict theorem1() {
  Verdict v;
  const EnergySpectrum q({0, 1, 2});
  for (Energy e : {1, 2})
    for (int k = 1; k <= 3; ++k) {
      std::vector<double> lhs(201, -1.0);
      for (int n = 10; n <= 200; ++n) {
        if (formulas::trace_leading(n, k, 3) >= 2.0) continue;
        const TraceBounds t = *theorem1_report(n, k, q, ShellMixture::single(e)).trace;
        lhs[static_cast<std::size_t>(n)] = t.lhs;
        v.require(t.lhs <= t.rhs_leading, "lhs > rhs at " + key(n, k, e));
      }
      for (int n = 10; 2 * n <= 200; ++n) {
        const double a = lhs[static_cast<std::size_t>(n)], b = lhs[static_cast<std::size_t>(2 * n)];
        if (a < 0.0 || b < 0.0) continue;
        v.require(b <= 0.75 * a, "lhs(2N)/lhs(N) > 0.75 at " + key(n, k, e));
      }
    }
  return v;
}

Verdict figure_panels() {
  Verdict v;
  for (const char* name : {"panel_a.cfg", "panel_b.cfg"}) {
    const auto rows = csv_rows(sweep(read_data(name), 2, 0));
    v.require(!rows.empty(), std::string(name) + " empty");
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& f : rows) {
      v.require(f[8].empty(), std::string(name) + " error row N=" + f[0]);
      if (!f[8].empty()) continue;
      const double lhs = std::stod(f[5]);
      v.require(lhs < prev, std::string(name) + " not decreasing at N=" + f[0]);
      if (f[7] == "0") v.require(lhs <= std::stod(f[6]), std::string(name) + " above bound at N=" + f[0]);
      prev = lhs;
    }
  }
  for (const char* name : {"panel_c.cfg", "panel_d.cfg"}) {
    const auto rows = csv_rows(sweep(read_data(name), 2, 0));
    v.require(rows.size() == 10, std::string(name) + " row count");
    double prev = -1.0;
    for (const auto& f : rows) {
      v.require(f[8].empty(), std::string(name) + " error row k=" + f[1]);
      if (!f[8].empty()) continue;
      const double lhs = std::stod(f[5]);
      v.require(lhs > prev, std::string(name) + " not increasing at k=" + f[1]);
      if (f[7] == "0") v.require(lhs <= std::stod(f[6]), std::string(name) + " above bound at k=" + f[1]);
      prev = lhs;
    }
  }
  return v;
}

Verdict sampling_exhaustive() {
  Verdict v;
  for (int d = 2; d <= 3; ++d)
    for (int n = 1; n <= 12; ++n)
      for (const auto& p : enumerate_types(n, d))
        for (int k = 1; k <= n; ++k)
          v.require(sampling_tv_exact(p, k) <= Rational(2 * k * d, n), "P=" + p.str() + " k=" + std::to_string(k));
  return v;
}

Verdict relative_entropy() {
  Verdict v;
  const EnergySpectrum q({0, 1, 2});
  for (Energy e : {1, 2})
    for (int k = 1; k <= 3; ++k)
      for (int n = 10; n <= 200; ++n) {
        if (formulas::trace_leading(n, k, 3) >= 2.0) continue;
        const RelEntBounds b = *relent_report(n, k, q, ShellMixture::single(e)).relent;
        v.require(b.lemma_d_measured <= b.lemma_d_bound, "lemma D at " + key(n, k, e));
        if (k == 1) v.require(b.lemma_d_measured == 0.0, "lemma D nonzero at k=1, " + key(n, k, e));
        if (n >= 50)
          v.require(b.lhs <= static_cast<double>(k) / (2.0 * n) + 0.05, "relent lhs at " + key(n, k, e));
      }
  return v;
}

Verdict lemma2() {
  Verdict v;
  const std::vector<int> dims{3, 4, 5};
  for (int i = 0; i < 100; ++i) {
    Rng rng(1000 + static_cast<std::uint64_t>(i));
    const int d = dims[static_cast<std::size_t>(i) % dims.size()];
    const EnergySpectrum spec = app::random_spectrum(d, rng);
    const double beta = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    const Eigen::MatrixXd a = constraint_kernel(spec);
    const Lemma2Result r = lemma2_check(spec, beta, a);
    v.require(r.s1 <= d + 1e-9 && r.s2 <= 1.0 + 1e-9, "instance " + std::to_string(i));
    Eigen::MatrixXd change = Eigen::MatrixXd::Identity(a.cols(), a.cols());
    std::normal_distribution<double> g(0.0, 0.3);
    for (Eigen::Index x = 0; x < change.rows(); ++x)
      for (Eigen::Index y = 0; y < change.cols(); ++y) change(x, y) += g(rng);
    const Lemma2Result r2 = lemma2_check(spec, beta, a * change);
    v.require(std::abs(r.s1 - r2.s1) <= 1e-9 && std::abs(r.s2 - r2.s2) <= 1e-9,
              "basis dependence at instance " + std::to_string(i));
  }
  return v;
}

ComplexMatrix rk4(const ComplexMatrix& rho0, double t, double h, const LindbladParams& p,
                  const ShellProjectors& proj) {
  ComplexMatrix rho = rho0;
  const int steps = static_cast<int>(std::ceil(t / h - 1e-9));
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    const ComplexMatrix k1 = apply_generator(rho, p, proj);
    const ComplexMatrix k2 = apply_generator(rho + 0.5 * dt * k1, p, proj);
    const ComplexMatrix k3 = apply_generator(rho + 0.5 * dt * k2, p, proj);
    const ComplexMatrix k4 = apply_generator(rho + dt * k3, p, proj);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

LindbladParams random_rates(const ShellProjectors& proj, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  LindbladParams p;
  for (Energy e : proj.energies()) {
    p.gammas[e] = u(rng);
    p.lambdas[e] = u(rng);
  }
  return p;
}

Verdict lindblad() {
  Verdict v;
  Rng rng(77);
  const auto proj = build_projectors(2, EnergySpectrum({0, 1, 2}));
  for (int i = 0; i < 20; ++i) {
    const auto p = random_rates(proj, rng);
    const DenseState rho = random_density_matrix(proj.dim(), rng);
    for (double t : {0.1, 1.0, 10.0}) {
      const double diff = (rk4(rho.matrix(), t, 1e-3, p, proj) - evolve_closed_form(rho, t, p, proj).matrix())
                              .cwiseAbs()
                              .maxCoeff();
      v.require(diff <= 1e-8, "(i) state " + std::to_string(i) + " t=" + app::fmt(t));
    }
  }
  for (int d = 2; d <= 3; ++d) {
    std::vector<Energy> lv;
    for (int x = 0; x < d; ++x) lv.push_back(x);
    const auto pr = build_projectors(2, EnergySpectrum(lv));
    const auto p = random_rates(pr, rng);
    const auto got = superoperator_spectrum(p, pr);
    const auto want = predicted_superoperator_spectrum(p, pr);
    bool same = got.size() == want.size();
    for (std::size_t j = 0; same && j < got.size(); ++j) same = std::abs(got[j] - want[j]) <= 1e-9;
    v.require(same, "(ii) spectrum d=" + std::to_string(d));
  }
  std::vector<double> times;
  for (int j = 0; j <= 40; ++j) times.push_back(std::pow(10.0, -2.0 + 0.1 * j));
  for (int i = 0; i < 20; ++i) {
    const auto p = random_rates(proj, rng);
    const DenseState rho = random_density_matrix(proj.dim(), rng);
    for (const auto& pt : convergence_check(rho, p, proj, times))
      v.require(pt.gap <= pt.envelope + 1e-10, "(iii) envelope at t=" + app::fmt(pt.t));
    const double t_star = envelope_time(p.slowest_rate(proj), 1e-6);
    v.require(convergence_check(rho, p, proj, {t_star}).front().gap <= 1e-6, "(iv) gap at t*");
  }
  return v;
}

Verdict twirl_asymmetry() {
  Verdict v;
  Rng rng(99);
  const EnergySpectrum q({0, 1, 2});
  const auto proj = build_projectors(3, q);
  for (int i = 0; i < 100; ++i) {
    const DenseState rho = random_density_matrix(proj.dim(), rng);
    const DenseState tw = epu_twirl(rho, proj);
    v.require(std::abs(asymmetry(tw, proj)) <= 1e-12, "twirl not invariant");
    const double gap = trace_norm_diff_dense(rho, tw);
    v.require(gap <= std::sqrt(2.0 * asymmetry(rho, proj)) + 1e-12, "Pinsker chain");
  }
  for (std::size_t s = 0; s < proj.shell_count(); ++s) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(proj.dim()));
    psi(static_cast<Eigen::Index>(proj.indices(s).front())) = 1.0;
    v.require(std::abs(asymmetry(DenseState::pure(psi), proj) - std::log(static_cast<double>(proj.degeneracy(s)))) <=
                  1e-10,
              "pure shell state E=" + std::to_string(proj.energies()[s]));
  }
  const EnergySpectrum qubit({0, 1});
  const auto p4 = build_projectors(4, qubit);
  std::vector<std::size_t> support;
  for (Energy e : {1, 2, 3})
    for (auto i : p4.indices(p4.shell_id(e))) support.push_back(i);
  std::sort(support.begin(), support.end());
  for (int i = 0; i < 50; ++i) {
    const auto r = robust_bound(random_density_matrix_on(p4.dim(), support, rng), 4, 1, qubit);
    v.require(r.lhs <= r.rhs, "robust bound instance " + std::to_string(i));
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const char* name : {"panel_a.cfg", "panel_c.cfg"}) {
    const std::string cfg = read_data(name);
    v.require(sweep(cfg, 1, 7) == sweep(cfg, 4, 7), name);
  }
  const std::string mixed = "levels = 0, 1, 3\nE = 1..6\nk = 1..3\nN = 3..30\nmetric = relent\n";
  v.require(sweep(mixed, 1, 0) == sweep(mixed, 4, 0), "relent grid");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> all{
      {1, "oracle equivalence (exact, N<=6, d in {2,3})", 30, oracle_equivalence},
      {2, "closed-form marginals (N<=20, k<=4)", 5, closed_forms},
      {3, "trace bound and 1/N rate (N=10..200)", 120, theorem1},
      {4, "figure panels a-d shape and bound", 120, figure_panels},
      {5, "sampling bound (exhaustive, exact)", 60, sampling_exhaustive},
      {6, "relative-entropy bounds", 120, relative_entropy},
      {7, "constraint-projection inequalities", 60, lemma2},
      {8, "Lindblad engine", 60, lindblad},
      {9, "twirl, asymmetry and robust bound", 60, twirl_asymmetry},
      {10, "sweep determinism across thread counts", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      v.ok = false;
      v.notes.push_back("over time budget of " + app::fmt(c.budget_s) + " s");
    }
    std::printf("%s criterion %d: %s (%.2f s)\n", v.ok ? "PASS" : "FAIL", c.id, c.name, secs);
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += v.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
