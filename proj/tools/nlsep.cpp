// Command-line driver: nlsep {solve,converge,conserve,epcheck} [flags]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "nlsep/nlsep.hpp"

namespace {

struct Flags {
  std::optional<std::string> scheme, eps, h, quad, ic, out, snapshot, schemes;
  std::optional<double> ep2_m, L, lambda, T, fp_tol, mu, theta_max;
  std::optional<int> M, fp_max, stride, theta_samples, grid_samples;
  std::optional<std::uint64_t> seed;
  bool dealias = false;
  std::string config;
};

void AddFlags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its values");
  app->add_option("--scheme", f.scheme, "ep1, ep2, ep3 or etd2");
  app->add_option("--schemes", f.schemes,
                  "comma list of schemes (converge, epcheck) or variants such as ep2-mp "
                  "(conserve)");
  app->add_option("--ep2-m", f.ep2_m, "EP2 interior fitting node");
  app->add_option("--M", f.M, "half the number of Fourier modes");
  app->add_option("--L", f.L, "domain length");
  app->add_option("--eps", f.eps, "epsilon, or a comma list");
  app->add_option("--lambda", f.lambda, "nonlinearity coefficient");
  app->add_option("--h", f.h, "step size, or a comma list");
  app->add_option("--T", f.T, "final time");
  app->add_option("--quad", f.quad, "mp, gl1 .. gl10");
  app->add_option("--fp-tol", f.fp_tol, "fixed-point tolerance");
  app->add_option("--fp-max", f.fp_max, "fixed-point iteration cap");
  app->add_option("--ic", f.ic, "fig1, converge, smalldata or fourier:<file>");
  app->add_option("--mu", f.mu, "fig1 wavenumber");
  app->add_option("--out", f.out, "CSV output path (default stdout)");
  app->add_option("--stride", f.stride, "observable sampling stride in steps");
  app->add_option("--snapshot", f.snapshot, "final-state snapshot path (solve)");
  app->add_flag("--dealias", f.dealias, "apply the 2/3 rule to the nonlinearity");
  app->add_option("--theta-max", f.theta_max, "epcheck: largest theta");
  app->add_option("--theta-samples", f.theta_samples, "epcheck: theta samples");
  app->add_option("--grid-samples", f.grid_samples, "epcheck: tau and sigma samples");
  app->add_option("--seed", f.seed, "epcheck: random state seed");
}

nlsep::ExperimentConfig BuildConfig(const std::string& mode, const Flags& f) {
  nlsep::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = nlsep::load_config_file(f.config, cfg);
  cfg.mode = mode;
  if (f.scheme) cfg.scheme = *f.scheme;
  if (f.schemes) cfg.schemes = nlsep::parse_name_list(*f.schemes);
  if (f.ep2_m) cfg.ep2_m = *f.ep2_m;
  if (f.M) cfg.M = *f.M;
  if (f.L) cfg.L = *f.L;
  if (f.eps) cfg.eps = nlsep::parse_real_list(*f.eps);
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.h) cfg.h = nlsep::parse_real_list(*f.h);
  if (f.T) cfg.T = *f.T;
  if (f.quad) cfg.quad = *f.quad;
  if (f.fp_tol) cfg.fp_tol = *f.fp_tol;
  if (f.fp_max) cfg.fp_max = *f.fp_max;
  if (f.ic) cfg.ic = *f.ic;
  if (f.mu) cfg.mu = *f.mu;
  if (f.out) cfg.out = *f.out;
  if (f.stride) cfg.stride = *f.stride;
  if (f.snapshot) cfg.snapshot = *f.snapshot;
  if (f.dealias) cfg.dealias = true;
  if (f.theta_max) cfg.theta_max = *f.theta_max;
  if (f.theta_samples) cfg.theta_samples = *f.theta_samples;
  if (f.grid_samples) cfg.grid_samples = *f.grid_samples;
  if (f.seed) cfg.seed = *f.seed;
  cfg.Validate();
  return cfg;
}

int Run(const nlsep::ExperimentConfig& cfg) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!cfg.out.empty() && cfg.out != "-") {
    file.open(cfg.out, std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot open '" << cfg.out << "' for writing\n";
      return 1;
    }
    out = &file;
  }
  if (cfg.mode == "solve") {
    nlsep::run_solve(cfg, out);
  } else if (cfg.mode == "converge") {
    const auto r = nlsep::run_converge(cfg, out);
    for (const auto& e : r.errors)
      if (!e.failure.empty())
        std::cerr << "warning: " << e.scheme << " eps=" << e.eps << " h=" << e.h
                  << " did not converge; excluded from the fit\n";
  } else if (cfg.mode == "conserve") {
    nlsep::run_conserve(cfg, out);
  } else {
    nlsep::run_epcheck(cfg, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-preserving exponential integrators for the cubic NLS"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(NLSEP_BUILD_VERSION));
  Flags flags;
  std::string mode;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "time series of energy, density and momentum for one scheme"},
      {"converge", "error against a fine reference over h and eps, with fitted slopes"},
      {"conserve", "long-run density, momentum and action deviations on small data"},
      {"epcheck", "residuals of the energy-preserving conditions and quadrature energy defect"}};
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    AddFlags(sub, flags);
    sub->callback([&mode, name] { mode = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return Run(BuildConfig(mode, flags));
  } catch (const nlsep::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlsep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
