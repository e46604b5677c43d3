// Command-line front end for the sweep, bounds, lindblad and selftest
// subcommands.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "epu/app.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned threads = epu::default_thread_count();
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "Path to the key = value configuration file");
  if (needs_config) opt->required();
  sub->add_option("--out", c.out, "Output path (default: stdout)");
  sub->add_option("--threads", c.threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed (default: 0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact marginals, finite de Finetti bounds and energy-conserving Lindblad runs"};
  app.set_version_flag("--version", epu::app::kToolVersion);
  app.require_subcommand(1);
  Common common;
  auto* sweep = app.add_subcommand("sweep", "Trace or relative-entropy sweep over (N, k, E), written as CSV");
  auto* bounds = app.add_subcommand("bounds", "Check the bound inequalities and write a report");
  auto* lindblad = app.add_subcommand("lindblad", "Convergence of the Lindblad evolution to the twirl, as CSV");
  auto* selftest = app.add_subcommand("selftest", "Quick end-to-end consistency run");
  add_common(sweep, common, true);
  add_common(bounds, common, false);
  add_common(lindblad, common, false);
  add_common(selftest, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : epu::app::kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::string text;
  if (!common.config.empty()) {
    std::ifstream in(common.config, std::ios::binary);
    if (!in) {
      std::cerr << "config error: cannot read " << common.config << '\n';
      return epu::app::kConfigError;
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  epu::app::RunOptions opts;
  opts.threads = common.threads;
  opts.seed = common.seed;

  // Buffer everything so that a failed run never leaves a partial file behind.
  std::ostringstream buffer;
  const int rc = epu::app::run_command(command, text, opts, buffer, std::cerr);
  if (common.out.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream out(common.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << common.out << '\n';
      return epu::app::kConfigError;
    }
    out << buffer.str();
  }
  return rc;
}
