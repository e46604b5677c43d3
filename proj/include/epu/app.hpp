#pragma once

// Command layer behind the `epu` executable. Each command reads a parsed
// Config and writes its CSV or report to a stream. The return value is the
// process exit code. Errors are thrown and mapped to exit codes by
// run_command.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epu/bounds.hpp"
#include "epu/config.hpp"
#include "epu/lindblad.hpp"
#include "epu/parallel.hpp"
#include "epu/random.hpp"
#include "epu/reference.hpp"

namespace epu::app {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kViolation = 1, kConfigError = 2, kCapExceeded = 3 };

struct RunOptions {
  unsigned threads = default_thread_count();
  std::uint64_t seed = 0;
};

/// Shortest round-trip decimal for a double; infinities print as inf.
inline std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_header(std::ostream& out, const char* command, const std::string& config_text,
                         const RunOptions& opts) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(config_text));
  out << "# epu " << command << " " << kToolVersion << "\n";
  out << "# config_hash=fnv1a64:" << hash << "\n";
  out << "# seed=" << opts.seed << "\n";
}

inline EnergySpectrum spectrum_from(const Config& c, std::vector<std::int64_t> fallback) {
  auto levels = c.get_int_list("levels");
  std::vector<Energy> lv;
  for (auto x : levels ? *levels : fallback) lv.push_back(static_cast<Energy>(x));
  try {
    return EnergySpectrum(lv);
  } catch (const Error& e) {
    const auto entry = c.single("levels");
    throw ConfigError("line " + std::to_string(entry ? entry->line : 0) + ": " + e.what());
  }
}

inline std::string clean(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

template <class T>
std::vector<int> as_ints(const std::vector<T>& v) {
  return std::vector<int>(v.begin(), v.end());
}

}  // namespace detail

// ---------------------------------------------------------------- sweep

struct SweepRow {
  int n = 0, k = 0, d = 0;
  Energy e = 0;
  std::string metric;
  double lhs = 0.0;
  double bound = 0.0;
  bool vacuous = false;
  std::string error;
};

inline std::string format_row(const SweepRow& r) {
  std::ostringstream o;
  o << r.n << ',' << r.k << ',' << r.d << ',' << r.e << ',' << r.metric << ',';
  if (r.error.empty()) o << fmt(r.lhs);
  o << ',' << fmt(r.bound) << ',' << (r.vacuous ? 1 : 0) << ',' << r.error;
  return o.str();
}

inline SweepRow sweep_point(int n, int k, Energy e, const EnergySpectrum& spec, const std::string& metric) {
  SweepRow r;
  r.n = n;
  r.k = k;
  r.d = spec.dim();
  r.e = e;
  r.metric = metric;
  if (metric == "trace") {
    r.bound = formulas::trace_leading(n, k, r.d);
    r.vacuous = r.bound >= kVacuousThreshold;
  } else {
    r.bound = formulas::relent_leading(n, k, r.d);
    r.vacuous = r.d == 2;  // the leading term vanishes identically
  }
  try {
    const ShellMixture mix = ShellMixture::single(e);
    if (metric == "trace")
      r.lhs = theorem1_report(n, k, spec, mix).trace->lhs;
    else
      r.lhs = relent_report(n, k, spec, mix).relent->lhs;
  } catch (const Error& ex) {
    r.error = detail::clean(ex.what());
  }
  return r;
}

/// One row per (N, k, E) in that lexicographic order of the config's lists.
inline int cmd_sweep(const Config& c, const std::string& config_text, const RunOptions& opts, std::ostream& out) {
  c.require_known({"levels", "N", "k", "E", "metric"});
  const EnergySpectrum spec = detail::spectrum_from(c, {});
  const auto ns = c.get_range("N");
  const auto es = c.get_range("E");
  if (!ns) throw ConfigError("line 0: missing key `N`");
  if (!es) throw ConfigError("line 0: missing key `E`");
  const auto ks = c.get_range("k").value_or(std::vector<std::int64_t>{1});
  const std::string metric = c.get_string("metric", "trace");
  if (metric != "trace" && metric != "relent")
    throw ConfigError("line " + std::to_string(c.single("metric")->line) + ": metric must be trace or relent");
  for (auto n : *ns)
    if (n < 1) throw ConfigError("line " + std::to_string(c.all("N").front().line) + ": N must be >= 1");
  for (auto k : ks)
    if (k < 1) throw ConfigError("line " + std::to_string(c.all("k").front().line) + ": k must be >= 1");

  struct Point {
    int n, k;
    Energy e;
  };
  std::vector<Point> points;
  for (auto n : *ns)
    for (auto k : ks)
      for (auto e : *es) points.push_back({static_cast<int>(n), static_cast<int>(k), static_cast<Energy>(e)});

  const auto rows = parallel_map<std::string>(points.size(), opts.threads, [&](std::size_t i) {
    return format_row(sweep_point(points[i].n, points[i].k, points[i].e, spec, metric));
  });
  detail::write_header(out, "sweep", config_text, opts);
  out << "N,k,d,E,metric,lhs,bound,vacuous,error\n";
  for (const auto& r : rows) out << r << '\n';
  return kOk;
}

// ---------------------------------------------------------------- bounds

struct CheckRow {
  std::string check;
  std::string params;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct BoundsSuite {
  EnergySpectrum spec{std::vector<Energy>{0, 1, 2}};
  std::vector<int> ns;
  // Shell energies to test; empty means every non-extremal attainable shell.
  std::vector<Energy> energies;
  int k_max = 3;
  std::vector<int> sampling_dims;
  bool sampling = true, theorem1 = true, lemma_d = true, relent = true;
  int relent_min_n = 50;
  double relent_slack = 0.05;
  int lemma2_spectra = 100;
  std::vector<int> lemma2_dims{3, 4, 5};
  double lemma2_beta_max = 3.0;
  // Multiplies every bound before comparison; values below 1 exercise the failure path.
  double bound_scale = 1.0;
};

inline BoundsSuite bounds_suite_from(const Config& c) {
  c.require_known({"levels", "N", "E", "k_max", "sampling", "sampling_dims", "theorem1", "lemmaD", "relent",
                   "relent_min_n", "relent_slack", "lemma2_spectra", "lemma2_dims", "lemma2_beta_max",
                   "bound_scale"});
  BoundsSuite s;
  s.spec = detail::spectrum_from(c, {0, 1, 2});
  s.ns = detail::as_ints(c.get_range("N").value_or(std::vector<std::int64_t>{}));
  if (!c.has("N"))
    for (int n = 1; n <= 12; ++n) s.ns.push_back(n);
  for (int n : s.ns)
    if (n < 1) throw ConfigError("line " + std::to_string(c.all("N").front().line) + ": N must be >= 1");
  for (auto e : c.get_range("E").value_or(std::vector<std::int64_t>{})) s.energies.push_back(e);
  s.k_max = static_cast<int>(c.get_int("k_max", 3));
  if (auto dims = c.get_int_list("sampling_dims"))
    s.sampling_dims = detail::as_ints(*dims);
  else
    for (int d = 2; d <= s.spec.dim(); ++d) s.sampling_dims.push_back(d);
  s.sampling = c.get_int("sampling", 1) != 0;
  s.theorem1 = c.get_int("theorem1", 1) != 0;
  s.lemma_d = c.get_int("lemmaD", 1) != 0;
  s.relent = c.get_int("relent", 1) != 0;
  s.relent_min_n = static_cast<int>(c.get_int("relent_min_n", 50));
  s.relent_slack = c.get_double("relent_slack", 0.05);
  s.lemma2_spectra = static_cast<int>(c.get_int("lemma2_spectra", 100));
  if (auto dims = c.get_int_list("lemma2_dims")) s.lemma2_dims = detail::as_ints(*dims);
  for (int d : s.lemma2_dims)
    if (d < 3) throw ConfigError("line " + std::to_string(c.single("lemma2_dims")->line) + ": lemma2 needs d >= 3");
  for (int d : s.sampling_dims)
    if (d < 2) throw ConfigError("line " + std::to_string(c.single("sampling_dims")->line) + ": d must be >= 2");
  s.lemma2_beta_max = c.get_double("lemma2_beta_max", 3.0);
  s.bound_scale = c.get_double("bound_scale", 1.0);
  return s;
}

/// A random spectrum of `d` distinct integer levels drawn from [0, 4d].
inline EnergySpectrum random_spectrum(int d, Rng& rng) {
  std::vector<Energy> pool;
  for (Energy x = 0; x <= 4 * d; ++x) pool.push_back(x);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(d));
  std::sort(pool.begin(), pool.end());
  return EnergySpectrum(pool);
}

inline std::vector<CheckRow> run_bounds_suite(const BoundsSuite& s, const RunOptions& opts) {
  using Job = std::function<std::vector<CheckRow>()>;
  std::vector<Job> jobs;
  const double scale = s.bound_scale;
  const auto& spec = s.spec;
  const int d = spec.dim();

  if (s.sampling) {
    for (int dim : s.sampling_dims)
      for (int n : s.ns)
        jobs.push_back([=] {
          std::vector<CheckRow> rows;
          const auto types = enumerate_types(n, dim);
          for (int k = 1; k <= n; ++k) {
            double worst = 0.0;
            for (const auto& p : types) worst = std::max(worst, sampling_tv_check(p, n, k).measured);
            const double bound = scale * formulas::sampling_tv(n, k, dim);
            rows.push_back({"sampling", "d=" + std::to_string(dim) + ";N=" + std::to_string(n) + ";k=" +
                                            std::to_string(k),
                            worst, bound, worst <= bound});
          }
          return rows;
        });
  }

  if (s.theorem1 || s.lemma_d || s.relent) {
    for (int n : s.ns)
      jobs.push_back([=] {
        std::vector<CheckRow> rows;
        for (Energy e : s.energies.empty() ? attainable_energies(n, spec) : s.energies) {
          if (!is_attainable(n, spec, e) || is_extremal_shell(n, spec, e)) continue;
          for (int k = 1; k <= std::min(n, s.k_max); ++k) {
            const std::string p = "d=" + std::to_string(d) + ";N=" + std::to_string(n) + ";k=" + std::to_string(k) +
                                  ";E=" + std::to_string(e);
            const ShellMixture mix = ShellMixture::single(e);
            if (s.theorem1) {
              const TraceBounds t = *theorem1_report(n, k, spec, mix).trace;
              rows.push_back({"theorem1", p, t.lhs, scale * t.rhs_leading, t.lhs <= scale * t.rhs_leading});
              rows.push_back({"norm1", p, t.norm1_measured, scale * t.norm1_bound,
                              t.norm1_measured <= scale * t.norm1_bound});
              rows.push_back({"norm2", p, t.norm2_measured, scale * t.norm2_bound,
                              t.norm2_measured <= scale * t.norm2_bound});
            }
            if (s.lemma_d || (s.relent && n >= s.relent_min_n)) {
              const RelEntBounds b = *relent_report(n, k, spec, mix).relent;
              if (s.lemma_d)
                rows.push_back({"lemmaD", p, b.lemma_d_measured, scale * b.lemma_d_bound,
                                b.lemma_d_measured <= scale * b.lemma_d_bound});
              if (s.relent && n >= s.relent_min_n && !b.degenerate) {
                const double bound = scale * b.rhs_leading + s.relent_slack;
                rows.push_back({"relent", p, b.lhs, bound, b.lhs <= bound});
              }
            }
          }
        }
        return rows;
      });
  }

  for (int i = 0; i < s.lemma2_spectra; ++i)
    jobs.push_back([=] {
      // Every instance has its own stream so results do not depend on scheduling.
      Rng rng(opts.seed * 1000003ull + static_cast<std::uint64_t>(i));
      const int dim = s.lemma2_dims[static_cast<std::size_t>(i) % s.lemma2_dims.size()];
      const EnergySpectrum sp = random_spectrum(dim, rng);
      const double beta = std::uniform_real_distribution<double>(-s.lemma2_beta_max, s.lemma2_beta_max)(rng);
      const Eigen::MatrixXd a = constraint_kernel(sp);
      const Lemma2Result r = lemma2_check(sp, beta, a);
      // Any invertible change of kernel basis must leave both sums unchanged.
      const auto m = static_cast<Eigen::Index>(a.cols());
      Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(m, m);
      std::normal_distribution<double> g(0.0, 0.3);
      for (Eigen::Index x = 0; x < m; ++x)
        for (Eigen::Index y = 0; y < m; ++y) mix(x, y) += g(rng);
      const Lemma2Result r2 = lemma2_check(sp, beta, a * mix);
      std::ostringstream lv;
      for (int x = 0; x < dim; ++x) lv << (x ? " " : "") << sp.level(x);
      const std::string p = "levels=" + lv.str() + ";beta=" + fmt(beta);
      const double drift = std::max(std::abs(r.s1 - r2.s1), std::abs(r.s2 - r2.s2));
      return std::vector<CheckRow>{
          {"lemma2_s1", p, r.s1, scale * dim + kLemma2Tol, r.s1 <= scale * dim + kLemma2Tol},
          {"lemma2_s2", p, r.s2, scale * 1.0 + kLemma2Tol, r.s2 <= scale * 1.0 + kLemma2Tol},
          {"lemma2_basis", p, drift, 1e-9, drift <= 1e-9},
      };
    });

  const auto chunks = parallel_map<std::vector<CheckRow>>(jobs.size(), opts.threads, [&](std::size_t i) { return jobs[i](); });
  std::vector<CheckRow> rows;
  for (const auto& c : chunks) rows.insert(rows.end(), c.begin(), c.end());
  return rows;
}

inline int cmd_bounds(const Config& c, const std::string& config_text, const RunOptions& opts, std::ostream& out) {
  const BoundsSuite suite = bounds_suite_from(c);
  const auto rows = run_bounds_suite(suite, opts);
  detail::write_header(out, "bounds", config_text, opts);
  out << "# bounds are leading-order terms; correction terms are not included\n";
  out << "check,params,measured,bound,status\n";
  std::map<std::string, std::pair<int, int>> tally;
  int failures = 0;
  for (const auto& r : rows) {
    out << r.check << ',' << r.params << ',' << fmt(r.measured) << ',' << fmt(r.bound) << ','
        << (r.pass ? "pass" : "FAIL") << '\n';
    auto& t = tally[r.check];
    ++t.first;
    if (!r.pass) {
      ++t.second;
      ++failures;
    }
  }
  for (const auto& [name, t] : tally)
    out << "# section " << name << ": " << t.first - t.second << "/" << t.first << " pass"
        << (t.second == 0 ? " (all-pass)" : "") << '\n';
  out << "# summary: checks=" << rows.size() << " failures=" << failures << '\n';
  return failures == 0 ? kOk : kViolation;
}

// ---------------------------------------------------------------- lindblad

struct LindbladRun {
  int n = 2;
  EnergySpectrum spec{std::vector<Energy>{0, 1, 2}};
  double gamma = 1.0, lambda = 1.0;
  std::map<Energy, double> gamma_at, lambda_at;
  double t_min = 0.01, t_max = 100.0;
  int t_points = 41;
  bool log_grid = true;
  double epsilon = 1e-6;
  std::size_t cap = kDefaultDenseCap;
};

inline LindbladRun lindblad_run_from(const Config& c) {
  LindbladRun r;
  for (const auto& key : c.keys()) {
    const bool per_shell = key.rfind("gamma.", 0) == 0 || key.rfind("lambda.", 0) == 0;
    if (per_shell) {
      const auto dot = key.find('.');
      const auto entry = *c.single(key);
      const Energy e = Config::parse_int(key.substr(dot + 1), entry.line);
      const double v = Config::parse_double(entry.value, entry.line);
      (key[0] == 'g' ? r.gamma_at : r.lambda_at)[e] = v;
      continue;
    }
    static const std::vector<std::string> allowed{"N", "levels", "gamma", "lambda", "t_min", "t_max",
                                                  "t_points", "t_scale", "epsilon", "cap"};
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("line " + std::to_string(c.all(key).front().line) + ": unknown key `" + key + "`");
  }
  r.n = static_cast<int>(c.get_int("N", 2));
  if (r.n < 1) throw ConfigError("line " + std::to_string(c.single("N")->line) + ": N must be >= 1");
  r.spec = detail::spectrum_from(c, {0, 1, 2});
  r.gamma = c.get_double("gamma", 1.0);
  r.lambda = c.get_double("lambda", 1.0);
  r.t_min = c.get_double("t_min", 0.01);
  r.t_max = c.get_double("t_max", 100.0);
  r.t_points = static_cast<int>(c.get_int("t_points", 41));
  const std::string scale = c.get_string("t_scale", "log");
  if (scale != "log" && scale != "linear")
    throw ConfigError("line " + std::to_string(c.single("t_scale")->line) + ": t_scale must be log or linear");
  r.log_grid = scale == "log";
  if (r.t_points < 0 || r.t_min < 0.0 || r.t_max < r.t_min || (r.log_grid && r.t_points > 0 && r.t_min <= 0.0))
    throw ConfigError("line 0: invalid time grid");
  r.epsilon = c.get_double("epsilon", 1e-6);
  if (!(r.epsilon > 0.0 && r.epsilon < 2.0)) throw ConfigError("line 0: epsilon must lie in (0, 2)");
  r.cap = static_cast<std::size_t>(c.get_int("cap", static_cast<std::int64_t>(kDefaultDenseCap)));
  return r;
}

inline std::vector<double> time_grid(const LindbladRun& r) {
  std::vector<double> t;
  for (int i = 0; i < r.t_points; ++i) {
    const double f = r.t_points == 1 ? 0.0 : static_cast<double>(i) / (r.t_points - 1);
    t.push_back(r.log_grid ? std::pow(10.0, std::log10(r.t_min) + f * (std::log10(r.t_max) - std::log10(r.t_min)))
                           : r.t_min + f * (r.t_max - r.t_min));
  }
  return t;
}

inline int cmd_lindblad(const Config& c, const std::string& config_text, const RunOptions& opts, std::ostream& out) {
  const LindbladRun run = lindblad_run_from(c);
  const ShellProjectors proj = build_projectors(run.n, run.spec, run.cap);
  LindbladParams params = LindbladParams::uniform(proj, run.gamma, run.lambda);
  for (const auto& [e, v] : run.gamma_at) {
    proj.shell_id(e);
    params.gammas[e] = v;
  }
  for (const auto& [e, v] : run.lambda_at) {
    proj.shell_id(e);
    params.lambdas[e] = v;
  }
  params.validate(proj);
  const double rate = params.slowest_rate(proj);

  Rng rng(opts.seed);
  const DenseState rho0 = random_density_matrix(proj.dim(), rng);
  const auto times = time_grid(run);
  const auto points = convergence_check(rho0, params, proj, times);
  const auto asym = parallel_map<double>(times.size(), opts.threads, [&](std::size_t i) {
    return asymmetry(evolve_closed_form(rho0, times[i], params, proj), proj);
  });

  detail::write_header(out, "lindblad", config_text, opts);
  out << "t,gap,envelope,asymmetry\n";
  bool ok = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    ok = ok && p.gap <= p.envelope + 1e-10;
    out << fmt(p.t) << ',' << fmt(p.gap) << ',' << fmt(p.envelope) << ',' << fmt(asym[i]) << '\n';
  }
  if (rate > 0.0) {
    const double t_star = envelope_time(rate, run.epsilon);
    const double gap = convergence_check(rho0, params, proj, {t_star}).front().gap;
    ok = ok && gap <= run.epsilon;
    out << "# summary: Gamma=" << fmt(rate) << " epsilon=" << fmt(run.epsilon) << " t_star=" << fmt(t_star)
        << " gap_at_t_star=" << fmt(gap) << '\n';
  } else {
    out << "# summary: Gamma=0 epsilon=" << fmt(run.epsilon) << " t_star=inf\n";
  }
  return ok ? kOk : kViolation;
}

// ---------------------------------------------------------------- selftest

/// A quick end-to-end smoke run covering every module.
inline int cmd_selftest(const RunOptions& opts, std::ostream& out) {
  struct Item {
    std::string name;
    std::function<bool()> run;
  };
  const EnergySpectrum qutrit({0, 1, 2});
  std::vector<Item> items{
      {"oracle_equivalence_small",
       [&] {
         for (int n = 1; n <= 4; ++n)
           for (Energy e : attainable_energies(n, qutrit))
             for (int k = 1; k <= n; ++k)
               if (!(to_exact_matrix(extremal_marginal(n, k, qutrit, e)) ==
                     reference::brute_force_marginal(n, k, qutrit, e)))
                 return false;
         return true;
       }},
      {"closed_forms",
       [&] {
         return to_exact_matrix(extremal_marginal(8, 1, qutrit, 1)) == reference::qutrit_E1_marginal(8, 1) &&
                to_exact_matrix(extremal_marginal(4, 1, qutrit, 2)) == reference::qutrit_E2_marginal(4, 1);
       }},
      {"theorem1_n20",
       [&] {
         const auto r = theorem1_report(20, 3, qutrit, ShellMixture::single(2));
         return r.trace->lhs <= r.trace->rhs_leading;
       }},
      {"lemma2",
       [&] {
         const auto r = lemma2_check(qutrit, 0.0);
         return r.pass;
       }},
      {"lindblad_spectrum",
       [&] {
         const ShellProjectors proj = build_projectors(2, EnergySpectrum({0, 1}));
         const LindbladParams p = LindbladParams::uniform(proj, 1.0, 0.5);
         const auto got = superoperator_spectrum(p, proj);
         const auto want = predicted_superoperator_spectrum(p, proj);
         for (std::size_t i = 0; i < got.size(); ++i)
           if (std::abs(got[i] - want[i]) > 1e-9) return false;
         return got.size() == want.size();
       }},
      {"twirl_asymmetry",
       [&] {
         Rng rng(opts.seed);
         const ShellProjectors proj = build_projectors(2, qutrit);
         const DenseState rho = random_density_matrix(proj.dim(), rng);
         return std::abs(asymmetry(epu_twirl(rho, proj), proj)) <= 1e-12;
       }},
  };
  const auto results = parallel_map<int>(items.size(), opts.threads, [&](std::size_t i) { return items[i].run() ? 1 : 0; });
  bool all = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << "selftest " << items[i].name << ": " << (results[i] ? "PASS" : "FAIL") << '\n';
    all = all && results[i];
  }
  return all ? kOk : kViolation;
}

// ---------------------------------------------------------------- dispatch

/// Runs a subcommand and maps library errors to exit codes. Diagnostics go
/// to `err`.
inline int run_command(const std::string& command, const std::string& config_text, const RunOptions& opts,
                       std::ostream& out, std::ostream& err) {
  try {
    if (command == "selftest") return cmd_selftest(opts, out);
    const Config c = Config::parse(config_text);
    if (command == "sweep") return cmd_sweep(c, config_text, opts, out);
    if (command == "bounds") return cmd_bounds(c, config_text, opts, out);
    if (command == "lindblad") return cmd_lindblad(c, config_text, opts, out);
    err << "error: unknown command `" << command << "`\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionCap& e) {
    err << "resource cap exceeded: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace epu::app
