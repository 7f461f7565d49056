#ifndef NLSEP_STEPPER_HPP
#define NLSEP_STEPPER_HPP

// Time stepping for the continuous-stage exponential integrators. The stage
// integral is discretized by a quadrature rule (nodes c_q, weights w_q), and
// the stage values U_q ~ u^{n+c_q} solve
//
//   U_q = C_{c_q} u^n + h sum_r w_r A_{c_q,c_r} f(U_r),
//
// by fixed-point iteration started from the free flow C_{c_q} u^n. Then
//
//   u^{n+1} = e^V u^n + h sum_r w_r A_{1,c_r} f(U_r).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/phi.hpp"
#include "nlsep/quadrature.hpp"
#include "nlsep/schemes.hpp"
#include "nlsep/spectral.hpp"

namespace nlsep {

struct SolverConfig {
  double fp_tol = 1e-14;  // absolute, max-norm on Fourier coefficients
  int fp_max = 100;
  int stagnation_window = 3;

  void Validate() const {
    if (!(fp_tol > 0.0)) throw ConfigError("fp_tol must be positive");
    if (fp_max < 1) throw ConfigError("fp_max must be at least 1");
    if (stagnation_window < 1)
      throw ConfigError("stagnation_window must be at least 1");
  }
};

struct StepReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = true;
  bool stagnated = false;  // accepted at the round-off floor above fp_tol
};

/// Number of steps of size h covering [0, T]; h must divide T.
inline std::size_t steps_for(double horizon, double h) {
  if (!(h > 0.0)) throw ConfigError("step size must be positive");
  if (!(horizon >= 0.0)) throw ConfigError("horizon must be non-negative");
  const double n = std::round(horizon / h);
  if (std::abs(n * h - horizon) > 1e-9 * std::max(1.0, horizon))
    throw ConfigError("step size does not divide the time horizon");
  return static_cast<std::size_t>(n);
}

/// Per-mode multipliers of one (scheme, grid, h, quadrature) combination.
class StepPlan {
 public:
  StepPlan(const SchemeId& id, const Grid& grid, double h, QuadRule quad)
      : id_(id), grid_(grid), h_(h), quad_(std::move(quad)) {
    if (!(h > 0.0) || !std::isfinite(h))
      throw ConfigError("step size must be positive");
    const std::size_t n = grid_.size();
    const std::size_t nq = quad_.size();
    exp_v_.resize(n);
    if (id_.is_explicit()) {
      etd_phi1_.resize(n);
      etd_phi2_.resize(n);
    } else {
      if (nq == 0) throw ConfigError("quadrature rule has no nodes");
      stage_c_.assign(nq, CVector(n));
      stage_a_.assign(nq * nq, CVector(n));
      update_a_.assign(nq, CVector(n));
    }
    const auto omega = grid_.omegas();
    for (std::size_t p = 0; p < n; ++p) {
      const Complex z(0.0, -h * omega[p]);
      exp_v_[p] = std::exp(z);
      if (id_.is_explicit()) {
        etd_phi1_[p] = h * phi(1, z);
        etd_phi2_[p] = h * phi(2, z);
        continue;
      }
      const CoeffEval ce(id_, z);
      for (std::size_t q = 0; q < nq; ++q) {
        const double cq = quad_.nodes[q];
        stage_c_[q][p] = ce.C(cq);
        for (std::size_t r = 0; r < nq; ++r)
          stage_a_[q * nq + r][p] = h * quad_.weights[r] * ce.A(cq, quad_.nodes[r]);
      }
      for (std::size_t r = 0; r < nq; ++r)
        update_a_[r][p] = h * quad_.weights[r] * ce.A(1.0, quad_.nodes[r]);
    }
  }

  const SchemeId& scheme() const { return id_; }
  const Grid& grid() const { return grid_; }
  double h() const { return h_; }
  const QuadRule& quad() const { return quad_; }

 private:
  friend class Stepper;

  SchemeId id_;
  Grid grid_;
  double h_;
  QuadRule quad_;
  CVector exp_v_;
  std::vector<CVector> stage_c_;   // [q][p]
  std::vector<CVector> stage_a_;   // [q * Q + r][p], includes h w_r
  std::vector<CVector> update_a_;  // [r][p], includes h w_r
  CVector etd_phi1_;               // h phi_1
  CVector etd_phi2_;               // h phi_2
};

/// One trajectory's integrator: the plan plus reusable stage buffers.
class Stepper {
 public:
  Stepper(const SchemeId& id, const Grid& grid, double h, const QuadRule& quad,
          const SolverConfig& cfg)
      : plan_(id, grid, h, quad), cfg_(cfg) {
    cfg_.Validate();
    const std::size_t n = grid.size();
    const std::size_t nq = plan_.id_.is_explicit() ? 2 : quad.size();
    stages_.assign(nq, CVector(n));
    next_.assign(nq, CVector(n));
    forces_.assign(nq, CVector(n));
  }

  const StepPlan& plan() const { return plan_; }
  const SolverConfig& config() const { return cfg_; }

  /// Advances `state` by one step in place.
  StepReport Step(FourierState& state) {
    plan_.grid_.CheckLength(state.coeffs.size());
    StepReport report = plan_.id_.is_explicit() ? StepExplicit(state.coeffs)
                                                 : StepImplicit(state.coeffs);
    state.t += plan_.h_;
    return report;
  }

 private:
  StepReport StepExplicit(CVector& u) {
    const Grid& g = plan_.grid_;
    const std::size_t n = g.size();
    CVector& fu = forces_[0];
    CVector& stage = stages_[0];
    CVector& fs = forces_[1];
    g.Nonlinearity(u, fu);
    for (std::size_t p = 0; p < n; ++p)
      stage[p] = plan_.exp_v_[p] * u[p] + plan_.etd_phi1_[p] * fu[p];
    g.Nonlinearity(stage, fs);
    for (std::size_t p = 0; p < n; ++p)
      u[p] = plan_.exp_v_[p] * u[p] +
             (plan_.etd_phi1_[p] - plan_.etd_phi2_[p]) * fu[p] +
             plan_.etd_phi2_[p] * fs[p];
    return StepReport{0, 0.0, true, false};
  }

  StepReport StepImplicit(CVector& u) {
    const Grid& g = plan_.grid_;
    const std::size_t n = g.size();
    const std::size_t nq = stages_.size();

    double scale = 0.0;
    for (const auto& v : u) scale = std::max(scale, std::abs(v));
    // Round-off floor below which a plateaued residual is accepted.
    const double ceiling = std::max(cfg_.fp_tol, 1e-12 * std::max(1.0, scale));

    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t p = 0; p < n; ++p) stages_[q][p] = plan_.stage_c_[q][p] * u[p];

    StepReport report;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int iter = 1;; ++iter) {
      for (std::size_t r = 0; r < nq; ++r) g.Nonlinearity(stages_[r], forces_[r]);
      double diff = 0.0;
      for (std::size_t q = 0; q < nq; ++q) {
        CVector& out = next_[q];
        for (std::size_t p = 0; p < n; ++p) {
          Complex acc = plan_.stage_c_[q][p] * u[p];
          for (std::size_t r = 0; r < nq; ++r)
            acc += plan_.stage_a_[q * nq + r][p] * forces_[r][p];
          out[p] = acc;
          const double d = std::abs(acc - stages_[q][p]);
          if (!(d <= diff)) diff = d;  // propagates NaN
        }
      }
      std::swap(stages_, next_);
      report.iterations = iter;
      report.final_residual = diff;
      if (!std::isfinite(diff)) throw ConvergenceError(diff, iter);
      if (diff <= cfg_.fp_tol) break;
      if (diff < best) {
        best = diff;
        since_best = 0;
      } else if (++since_best >= cfg_.stagnation_window && best <= ceiling) {
        report.stagnated = true;
        break;
      }
      if (iter >= cfg_.fp_max) throw ConvergenceError(diff, iter);
    }

    // forces_ hold f at the previous iterate, which generated stages_.
    for (std::size_t p = 0; p < n; ++p) {
      Complex acc = plan_.exp_v_[p] * u[p];
      for (std::size_t r = 0; r < nq; ++r) acc += plan_.update_a_[r][p] * forces_[r][p];
      u[p] = acc;
    }
    return report;
  }

  StepPlan plan_;
  SolverConfig cfg_;
  std::vector<CVector> stages_;
  std::vector<CVector> next_;
  std::vector<CVector> forces_;
};

inline std::pair<FourierState, StepReport> step(const SchemeId& id,
                                                const Grid& g, double h,
                                                const QuadRule& quad,
                                                const SolverConfig& cfg,
                                                const FourierState& s) {
  Stepper stepper(id, g, h, quad, cfg);
  FourierState next = s;
  StepReport report = stepper.Step(next);
  return {std::move(next), report};
}

using Observer = std::function<void(std::size_t step, double t,
                                    const FourierState& state,
                                    const StepReport& report)>;

/// Runs n_steps steps. The observer sees step 0, every `stride`-th step and
/// the final step. Convergence failures carry the failing step index.
inline FourierState evolve(Stepper& stepper, const FourierState& s0,
                           std::size_t n_steps, const Observer& observer = {},
                           std::size_t stride = 1) {
  if (stride == 0) throw ConfigError("observer stride must be positive");
  FourierState state = s0;
  const double t0 = s0.t;
  const double h = stepper.plan().h();
  if (observer) observer(0, t0, state, StepReport{});
  for (std::size_t i = 1; i <= n_steps; ++i) {
    StepReport report;
    try {
      report = stepper.Step(state);
    } catch (const ConvergenceError& e) {
      throw e.AtStep(i);
    }
    state.t = t0 + static_cast<double>(i) * h;
    if (observer && (i % stride == 0 || i == n_steps)) observer(i, state.t, state, report);
  }
  return state;
}

inline FourierState evolve(const SchemeId& id, const Grid& g, double h,
                           const QuadRule& quad, const SolverConfig& cfg,
                           const FourierState& s0, std::size_t n_steps,
                           const Observer& observer = {},
                           std::size_t stride = 1) {
  Stepper stepper(id, g, h, quad, cfg);
  return evolve(stepper, s0, n_steps, observer, stride);
}

/// Reference trajectory: EP3 with five-point Gauss-Legendre at h_ref.
inline FourierState reference_solution(const Grid& g, double horizon,
                                       const FourierState& s0, double h_ref,
                                       double fp_tol = 1e-14) {
  if (!(horizon > 0.0)) throw ConfigError("reference horizon must be positive");
  SolverConfig cfg;
  cfg.fp_tol = fp_tol;
  return evolve(SchemeId::EP3(), g, h_ref, gauss_legendre(5), cfg, s0,
                steps_for(horizon, h_ref));
}

/// Physical-space complex conjugate, i.e. c_j -> conj(c_{-j}) with the
/// Nyquist mode mapped to itself.
inline FourierState conjugate_state(const Grid& g, const FourierState& s) {
  PhysicalState p = to_physical(g, s);
  for (auto& v : p.values) v = std::conj(v);
  return to_fourier(g, p);
}

/// Max-norm residual of the symmetric two-step form of EP1,
///
///   u^{n+1} - 2 cos(h Omega) u^n + u^{n-1}
///     = h [phi_1(V) I(u^n, u^{n+1}) - phi_1(-V) I(u^{n-1}, u^n)],
///
/// where I(a, b) = int_0^1 f((1 - s) a + s b) ds by the same quadrature.
inline double ep1_two_step_residual(const Grid& g, double h,
                                    const QuadRule& quad,
                                    const SolverConfig& cfg,
                                    const FourierState& s0) {
  Stepper stepper(SchemeId::EP1(), g, h, quad, cfg);
  FourierState s1 = s0;
  stepper.Step(s1);
  FourierState s2 = s1;
  stepper.Step(s2);

  const std::size_t n = g.size();
  auto averaged_force = [&](const CVector& a, const CVector& b) {
    CVector sum(n, Complex(0.0));
    CVector mix(n);
    CVector f(n);
    for (std::size_t r = 0; r < quad.size(); ++r) {
      const double c = quad.nodes[r];
      for (std::size_t p = 0; p < n; ++p) mix[p] = (1.0 - c) * a[p] + c * b[p];
      g.Nonlinearity(mix, f);
      for (std::size_t p = 0; p < n; ++p) sum[p] += quad.weights[r] * f[p];
    }
    return sum;
  };
  const CVector forward = averaged_force(s1.coeffs, s2.coeffs);
  const CVector backward = averaged_force(s0.coeffs, s1.coeffs);

  const auto omega = g.omegas();
  double residual = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double theta = h * omega[p];
    const Complex lhs =
        s2.coeffs[p] - 2.0 * std::cos(theta) * s1.coeffs[p] + s0.coeffs[p];
    const Complex rhs = h * (phi(1, Complex(0.0, -theta)) * forward[p] -
                             phi(1, Complex(0.0, theta)) * backward[p]);
    residual = std::max(residual, std::abs(lhs - rhs));
  }
  return residual;
}

}  // namespace nlsep

#endif  // NLSEP_STEPPER_HPP
