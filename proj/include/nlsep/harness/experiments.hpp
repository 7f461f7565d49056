#ifndef NLSEP_HARNESS_EXPERIMENTS_HPP
#define NLSEP_HARNESS_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/harness/config.hpp"
#include "nlsep/harness/csv.hpp"
#include "nlsep/harness/initial.hpp"
#include "nlsep/harness/snapshot.hpp"
#include "nlsep/quadrature.hpp"
#include "nlsep/schemes.hpp"
#include "nlsep/spectral.hpp"
#include "nlsep/stepper.hpp"

namespace nlsep {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Runs task(i) for i in [0, count) on up to hardware_concurrency threads.
/// The first exception thrown by any task is rethrown after all finish.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& task,
                         unsigned max_workers = 0) {
  unsigned workers = max_workers ? max_workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct LineFit {
  double slope = kNaN;
  double intercept = kNaN;
  double rms_residual = kNaN;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x over the finite pairs.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (std::isfinite(x[i]) && std::isfinite(y[i])) pts.emplace_back(x[i], y[i]);
  LineFit fit;
  fit.points = pts.size();
  if (pts.size() < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (auto [a, b] : pts) mx += a, my += b;
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (auto [a, b] : pts) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (auto [a, b] : pts) {
    const double r = b - (fit.intercept + fit.slope * a);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / pts.size());
  return fit;
}

/// Relative error when the reference is not tiny, absolute otherwise.
inline double rel_or_abs_error(double value, double reference) {
  const double diff = std::abs(value - reference);
  return std::abs(reference) > 1e-12 ? diff / std::abs(reference) : diff;
}

// --------------------------------------------------------------------- solve

struct SolveRow {
  double t = 0.0;
  double energy = 0.0;
  double density = 0.0;
  double momentum = 0.0;
  double energy_err = 0.0;
  double density_err = 0.0;
  double momentum_err = 0.0;
  int iterations = 0;
};

struct SolveResult {
  std::vector<SolveRow> rows;
  FourierState final_state;
  double max_energy_err = 0.0;
  double max_density_err = 0.0;
  double max_momentum_err = 0.0;
};

inline SolveResult run_solve(const ExperimentConfig& cfg, std::ostream* out = nullptr) {
  cfg.Validate();
  const Grid g = cfg.grid(cfg.eps.front());
  const double h = cfg.steps().front();
  const std::size_t n = steps_for(cfg.horizon(), h);
  const FourierState s0 = load_initial(g, cfg.initial_condition());
  const Observables o0 = observables(g, s0);

  std::optional<CsvWriter> csv;
  if (out) {
    csv.emplace(*out);
    csv->Comment(cfg.Describe());
    csv->Header({"t", "energy", "density", "momentum", "H-rel-err", "m-rel-err",
                 "K-abs-or-rel-err", "fp-iterations"});
  }

  SolveResult result;
  auto observe = [&](std::size_t, double t, const FourierState& s, const StepReport& rep) {
    const Observables o = observables(g, s);
    SolveRow row{t, o.energy, o.density, o.momentum,
                 rel_or_abs_error(o.energy, o0.energy),
                 rel_or_abs_error(o.density, o0.density),
                 rel_or_abs_error(o.momentum, o0.momentum), rep.iterations};
    result.max_energy_err = std::max(result.max_energy_err, row.energy_err);
    result.max_density_err = std::max(result.max_density_err, row.density_err);
    result.max_momentum_err = std::max(result.max_momentum_err, row.momentum_err);
    result.rows.push_back(row);
    if (csv) {
      csv->Row({row.t, row.energy, row.density, row.momentum, row.energy_err,
                row.density_err, row.momentum_err,
                static_cast<long long>(row.iterations)});
    }
  };

  try {
    result.final_state = evolve(cfg.scheme_id(), g, h, cfg.quad_rule(), cfg.solver(),
                                s0, n, observe, static_cast<std::size_t>(cfg.stride));
  } catch (const ConvergenceError&) {
    if (csv) csv->Flush();
    throw;
  }
  if (csv) csv->Flush();
  if (!cfg.snapshot.empty()) write_snapshot(cfg.snapshot, g, result.final_state);
  return result;
}

// ------------------------------------------------------------------ converge

struct ConvergeError {
  std::string scheme;
  double eps = 0.0;
  double h = 0.0;
  double err_l2 = kNaN;  // NaN when the fixed point failed
  double err_h1 = kNaN;
  std::string failure;
};

struct ConvergeFit {
  std::string scheme;
  double eps = 0.0;
  LineFit l2;
  LineFit h1;
};

struct ConvergeResult {
  std::vector<ConvergeError> errors;
  std::vector<ConvergeFit> fits;

  const ConvergeError* Find(const std::string& scheme, double eps, double h) const {
    for (const auto& e : errors)
      if (e.scheme == scheme && e.eps == eps && e.h == h) return &e;
    return nullptr;
  }
  const ConvergeFit* FindFit(const std::string& scheme, double eps) const {
    for (const auto& f : fits)
      if (f.scheme == scheme && f.eps == eps) return &f;
    return nullptr;
  }
};

/// Long-term form of the equation: unit dispersion, eps * lambda, horizon T/eps.
inline Grid long_term_grid(const ExperimentConfig& cfg, double eps) {
  return Grid(cfg.M, cfg.length(), 1.0, eps * cfg.lambda, cfg.dealias);
}

inline ConvergeResult run_converge(const ExperimentConfig& cfg, std::ostream* out = nullptr) {
  cfg.Validate();
  std::vector<std::string> schemes = cfg.schemes;
  if (schemes.empty()) schemes = {"ep1", "ep2", "ep3"};
  const std::vector<double> hs = cfg.steps();
  const double h_min = *std::min_element(hs.begin(), hs.end());
  const SolverConfig solver = cfg.solver();
  const QuadRule quad = cfg.quad_rule();

  struct PerEps {
    Grid grid;
    double horizon;
    FourierState s0;
    FourierState reference;
  };
  std::vector<PerEps> setups;
  for (double eps : cfg.eps) {
    Grid g = long_term_grid(cfg, eps);
    FourierState s0 = load_initial(g, cfg.initial_condition());
    setups.push_back({g, cfg.horizon() / eps, s0, {}});
    for (double h : hs) steps_for(setups.back().horizon, h);
  }
  // One reference per eps, shared by the whole h sweep.
  parallel_for(setups.size(), [&](std::size_t i) {
    auto& s = setups[i];
    s.reference = reference_solution(s.grid, s.horizon, s.s0, h_min / 10.0, solver.fp_tol);
  });

  ConvergeResult result;
  for (const auto& name : schemes)
    for (double eps : cfg.eps)
      for (double h : hs) {
        ConvergeError row;
        row.scheme = cfg.scheme_id(name).name();
        row.eps = eps;
        row.h = h;
        result.errors.push_back(row);
      }

  parallel_for(result.errors.size(), [&](std::size_t k) {
    const std::size_t per_scheme = cfg.eps.size() * hs.size();
    const std::size_t si = k / per_scheme;
    const std::size_t ei = (k % per_scheme) / hs.size();
    auto& row = result.errors[k];
    const auto& setup = setups[ei];
    try {
      const FourierState u = evolve(cfg.scheme_id(schemes[si]), setup.grid, row.h, quad,
                                    solver, setup.s0, steps_for(setup.horizon, row.h));
      row.err_l2 = sobolev_distance(setup.grid, u, setup.reference, 0.0);
      row.err_h1 = sobolev_distance(setup.grid, u, setup.reference, 1.0);
    } catch (const ConvergenceError& e) {
      row.failure = e.what();
    }
  });

  for (const auto& name : schemes) {
    const std::string label = cfg.scheme_id(name).name();
    for (double eps : cfg.eps) {
      std::vector<double> lh, l2, h1;
      for (const auto& r : result.errors) {
        if (r.scheme != label || r.eps != eps) continue;
        lh.push_back(std::log(r.h));
        l2.push_back(r.err_l2 > 0.0 ? std::log(r.err_l2) : kNaN);
        h1.push_back(r.err_h1 > 0.0 ? std::log(r.err_h1) : kNaN);
      }
      result.fits.push_back({label, eps, fit_line(lh, l2), fit_line(lh, h1)});
    }
  }

  if (out) {
    CsvWriter csv(*out);
    csv.Comment(cfg.Describe());
    csv.Comment("reference=ep3 gl5 h=" + format_real(h_min / 10.0) +
                "; long-term form with eps*lambda over [0, T/eps]");
    csv.Header({"kind", "scheme", "eps", "h", "err_L2", "err_H1", "slope_L2",
                "slope_H1", "fit-rms-residual_L2", "fit-rms-residual_H1", "points"});
    for (const auto& r : result.errors)
      csv.Row({std::string("error"), r.scheme, r.eps, r.h, r.err_l2, r.err_h1, kNaN, kNaN,
               kNaN, kNaN, r.failure.empty() ? 1LL : 0LL});
    for (const auto& f : result.fits)
      csv.Row({std::string("slope"), f.scheme, f.eps, kNaN, kNaN, kNaN, f.l2.slope,
               f.h1.slope, f.l2.rms_residual, f.h1.rms_residual,
               static_cast<long long>(f.l2.points)});
    for (const auto& r : result.errors)
      if (!r.failure.empty())
        csv.Comment("excluded from fit: " + r.scheme + " eps=" + format_real(r.eps) +
                    " h=" + format_real(r.h) + ": " + r.failure);
    csv.Flush();
  }
  return result;
}

// ------------------------------------------------------------------ conserve

struct ConserveVariant {
  std::string label;
  SchemeId scheme;
  QuadRule quad;
};

/// "ep2-mp", "ep1-gl3", "etd2", ...; a bare scheme name takes `fallback`.
inline ConserveVariant parse_variant(const std::string& text, double ep2_m,
                                     const std::string& fallback) {
  const auto dash = text.find('-');
  const std::string scheme = text.substr(0, dash);
  const std::string quad = dash == std::string::npos ? fallback : text.substr(dash + 1);
  SchemeId id = SchemeId::Parse(scheme, ep2_m);
  QuadRule rule = parse_quadrature(quad);
  std::string label = id.name();
  if (!id.is_explicit()) label += "-" + rule.name;
  return {label, id, rule};
}

struct ConserveRow {
  double t = 0.0;
  double density_err = 0.0;
  double momentum_err = 0.0;
  double action_dev = 0.0;
};

struct ConserveSeries {
  std::string label;
  double eps = 0.0;
  std::vector<ConserveRow> rows;
  double density_drift = kNaN;   // LS slope of |error| vs t
  double momentum_drift = kNaN;
  double max_density_err = 0.0;
  double max_momentum_err = 0.0;
  double max_action_dev = 0.0;
};

struct ConserveResult {
  double eps_tilde = 0.0;
  std::vector<ConserveSeries> series;

  const ConserveSeries* Find(const std::string& label, double eps) const {
    for (const auto& s : series)
      if (s.label == label && s.eps == eps) return &s;
    return nullptr;
  }
};

inline ConserveResult run_conserve(const ExperimentConfig& cfg, std::ostream* out = nullptr) {
  cfg.Validate();
  std::vector<ConserveVariant> variants;
  if (cfg.schemes.empty()) {
    for (const char* v : {"ep1-gl3", "ep2-gl3", "ep2-mp", "ep3-gl3", "etd2"})
      variants.push_back(parse_variant(v, cfg.ep2_m, cfg.quad));
  } else {
    for (const auto& v : cfg.schemes) variants.push_back(parse_variant(v, cfg.ep2_m, cfg.quad));
  }
  const double h = cfg.steps().front();
  const std::size_t n = steps_for(cfg.horizon(), h);
  const SolverConfig solver = cfg.solver();
  constexpr double kActionSobolev = 2.0;

  ConserveResult result;
  for (double eps : cfg.eps)
    for (const auto& v : variants) {
      ConserveSeries series;
      series.label = v.label;
      series.eps = eps;
      result.series.push_back(std::move(series));
    }

  {
    const Grid g = cfg.grid(cfg.eps.front());
    result.eps_tilde = sobolev_norm(g, load_initial(g, cfg.initial_condition()), kActionSobolev);
  }

  parallel_for(result.series.size(), [&](std::size_t k) {
    auto& series = result.series[k];
    const auto& v = variants[k % variants.size()];
    const Grid g = cfg.grid(series.eps);
    const FourierState s0 = load_initial(g, cfg.initial_condition());
    const Observables o0 = observables(g, s0);
    const double eps_tilde = sobolev_norm(g, s0, kActionSobolev);
    evolve(v.scheme, g, h, v.quad, solver, s0, n,
           [&](std::size_t, double t, const FourierState& s, const StepReport&) {
             const Observables o = observables(g, s);
             ConserveRow row{t, rel_or_abs_error(o.density, o0.density),
                             rel_or_abs_error(o.momentum, o0.momentum),
                             weighted_action_deviation(g, s, s0, kActionSobolev, eps_tilde)};
             series.max_density_err = std::max(series.max_density_err, row.density_err);
             series.max_momentum_err = std::max(series.max_momentum_err, row.momentum_err);
             series.max_action_dev = std::max(series.max_action_dev, row.action_dev);
             series.rows.push_back(row);
           },
           static_cast<std::size_t>(cfg.stride));
    std::vector<double> t, d, m;
    for (const auto& r : series.rows) {
      t.push_back(r.t);
      d.push_back(r.density_err);
      m.push_back(r.momentum_err);
    }
    series.density_drift = fit_line(t, d).slope;
    series.momentum_drift = fit_line(t, m).slope;
  });

  if (out) {
    CsvWriter csv(*out);
    csv.Comment(cfg.Describe());
    csv.Comment("eps-tilde=" + format_real(result.eps_tilde) + " (H^2 norm of u0)");
    csv.Header({"scheme", "eps", "t", "density-rel-err", "momentum-rel-err",
                "action-deviation"});
    for (const auto& s : result.series)
      for (const auto& r : s.rows)
        csv.Row({s.label, s.eps, r.t, r.density_err, r.momentum_err, r.action_dev});
    for (const auto& s : result.series)
      csv.Comment("summary " + s.label + " eps=" + format_real(s.eps) +
                  " density-drift=" + format_real(s.density_drift) +
                  " momentum-drift=" + format_real(s.momentum_drift) +
                  " max-density-err=" + format_real(s.max_density_err) +
                  " max-momentum-err=" + format_real(s.max_momentum_err) +
                  " max-action-deviation=" + format_real(s.max_action_dev));
    csv.Flush();
  }
  return result;
}

// ------------------------------------------------------------------- epcheck

struct EpcheckRow {
  std::string scheme;
  double theta = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
};

struct EnergyDefect {
  std::string scheme;
  std::string quad;
  double defect = 0.0;  // |H(u1) - H(u0)| / |H(u0)|
};

struct EpcheckResult {
  std::vector<EpcheckRow> rows;     // per (scheme, theta)
  std::vector<EpcheckRow> maxima;   // per scheme, theta = argmax
  std::vector<EnergyDefect> defects;

  const EpcheckRow* Max(const std::string& scheme) const {
    for (const auto& r : maxima)
      if (r.scheme == scheme) return &r;
    return nullptr;
  }
};

/// Max |r1|, |r2|, |r3| over a uniform (tau, sigma) grid on [0,1]^2 at z = -i theta.
inline EpcheckRow ep_residual_row(const SchemeId& id, double theta, int grid_samples) {
  const CoeffEval ce(id, Complex(0.0, -theta));
  EpcheckRow row{id.name(), theta};
  const int n = grid_samples;
  for (int a = 0; a < n; ++a) {
    const double tau = n == 1 ? 0.5 : static_cast<double>(a) / (n - 1);
    for (int b = 0; b < n; ++b) {
      const double sigma = n == 1 ? 0.5 : static_cast<double>(b) / (n - 1);
      const EpResiduals r = ep_condition_residuals(ce, tau, sigma);
      row.r1 = std::max(row.r1, std::abs(r.r1));
      row.r2 = std::max(row.r2, std::abs(r.r2));
      row.r3 = std::max(row.r3, std::abs(r.r3));
    }
  }
  return row;
}

/// Smooth random state: Gaussian coefficients scaled by (1 + |j|)^-3.
inline FourierState random_smooth_state(const Grid& g, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FourierState s = FourierState::Zero(g);
  for (std::size_t p = 0; p < s.coeffs.size(); ++p) {
    const double decay = scale * std::pow(1.0 + std::abs(g.ModeOf(p)), -3.0);
    const double re = normal(rng);
    const double im = normal(rng);
    s.coeffs[p] = decay * Complex(re, im);
  }
  return s;
}

inline EpcheckResult run_epcheck(const ExperimentConfig& cfg, std::ostream* out = nullptr) {
  cfg.Validate();
  std::vector<std::string> schemes = cfg.schemes;
  if (schemes.empty()) schemes = {"ep1", "ep2", "ep3", "etd2"};

  EpcheckResult result;
  const int nt = cfg.theta_samples;
  for (const auto& name : schemes) {
    const SchemeId id = cfg.scheme_id(name);
    EpcheckRow worst{id.name(), 0.0};
    double worst_value = -1.0;
    for (int i = 0; i < nt; ++i) {
      const double theta = nt == 1 ? 0.0 : cfg.theta_max * i / (nt - 1);
      EpcheckRow row = ep_residual_row(id, theta, cfg.grid_samples);
      const double m = std::max({row.r1, row.r2, row.r3});
      if (m > worst_value) worst_value = m, worst.theta = theta;
      worst.r1 = std::max(worst.r1, row.r1);
      worst.r2 = std::max(worst.r2, row.r2);
      worst.r3 = std::max(worst.r3, row.r3);
      result.rows.push_back(std::move(row));
    }
    result.maxima.push_back(worst);
  }

  const Grid g = cfg.grid(cfg.eps.front());
  const double h = cfg.steps().front();
  const FourierState s0 = random_smooth_state(g, cfg.seed);
  const double e0 = observables(g, s0).energy;
  const std::vector<std::string> quads = {"mp", "gl2", "gl3", "gl4", "gl5", "gl6"};
  for (const auto& name : schemes) {
    const SchemeId id = cfg.scheme_id(name);
    for (const auto& q : id.is_explicit() ? std::vector<std::string>{"gl3"} : quads) {
      const auto [s1, report] = step(id, g, h, parse_quadrature(q), cfg.solver(), s0);
      const double e1 = observables(g, s1).energy;
      result.defects.push_back({id.name(), id.is_explicit() ? "-" : q,
                                rel_or_abs_error(e1, e0)});
    }
  }

  if (out) {
    CsvWriter csv(*out);
    csv.Comment(cfg.Describe());
    csv.Comment("residuals: max over a " + std::to_string(cfg.grid_samples) + "x" +
                std::to_string(cfg.grid_samples) + " (tau, sigma) grid at z = -i theta");
    csv.Header({"kind", "scheme", "quad", "theta", "r1", "r2", "r3", "energy-defect"});
    for (const auto& r : result.rows)
      csv.Row({std::string("residual"), r.scheme, std::string("-"), r.theta, r.r1, r.r2,
               r.r3, kNaN});
    for (const auto& r : result.maxima)
      csv.Row({std::string("max"), r.scheme, std::string("-"), r.theta, r.r1, r.r2, r.r3,
               kNaN});
    for (const auto& d : result.defects)
      csv.Row({std::string("energy"), d.scheme, d.quad, kNaN, kNaN, kNaN, kNaN, d.defect});
    csv.Flush();
  }
  return result;
}

}  // namespace nlsep

#endif  // NLSEP_HARNESS_EXPERIMENTS_HPP
