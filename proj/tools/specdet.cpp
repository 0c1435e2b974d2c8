// specdet: det / sweep / spectrum / validate.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specdet/commands.hpp"
#include "specdet/config.hpp"
#include "specdet/error.hpp"
#include "specdet/validate.hpp"

namespace {

struct Common {
  std::string config;
  std::string output;
  std::string format;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "experiment config file")->check(CLI::ExistingFile);
  if (needs_config) opt->required();
  sub->add_option("--output", c.output, "write the machine-readable table here instead of stdout");
  sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

/// The config with command-line overrides applied.
specdet::config::RunConfig load(const Common& c) {
  specdet::config::RunConfig cfg = specdet::config::parse_config_file(c.config);
  if (!c.output.empty()) cfg.path = c.output;
  if (!c.format.empty()) cfg.format = c.format;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace specdet;
  CLI::App app{"Spectral determinants of -d^2/dx^2 + |x|^beta + alpha q(x)"};
  app.require_subcommand(1);

  Common det_args, sweep_args, spectrum_args, validate_args;
  CLI::App* det = app.add_subcommand("det", "one determinant with diagnostics");
  add_common(det, det_args, true);
  CLI::App* sweep = app.add_subcommand("sweep", "determinants over a parameter range");
  add_common(sweep, sweep_args, true);
  CLI::App* spectrum = app.add_subcommand("spectrum", "truncated Dirichlet spectrum and product");
  add_common(spectrum, spectrum_args, true);
  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  validate_args.jobs = 1;
  validate->add_option("--jobs", validate_args.jobs, "worker threads")->check(CLI::PositiveNumber);
  std::optional<double> rtol;
  std::string filter;
  validate->add_option("--rtol", rtol, "solver rtol for the determinant checks")->check(CLI::PositiveNumber);
  validate->add_option("--filter", filter, "run only checks whose module/name contains this text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*det) return cli::cmd_det(load(det_args), std::cout, std::cerr);
    if (*sweep) return cli::cmd_sweep(load(sweep_args), std::cout, std::cerr, sweep_args.jobs);
    if (*spectrum) return cli::cmd_spectrum(load(spectrum_args), std::cout, std::cerr, spectrum_args.jobs);
    validate::ValidateOptions opt;
    opt.jobs = validate_args.jobs;
    if (rtol) opt.tol.rtol = *rtol;
    return cli::cmd_validate(opt, std::cout, filter);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitFailure;
  }
}
