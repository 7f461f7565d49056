#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlsep/harness/initial.hpp"
#include "nlsep/stepper.hpp"
#include "oracles.hpp"

namespace {

using nlsep::Complex;
using nlsep::CVector;
using nlsep::FourierState;
using nlsep::Grid;
using nlsep::SchemeId;
using nlsep::SolverConfig;
constexpr double kPi = std::numbers::pi;

const nlsep::QuadRule kGL3 = nlsep::gauss_legendre(3);

std::vector<SchemeId> AllSchemes() {
  return {SchemeId::EP1(), SchemeId::EP2(), SchemeId::EP3(), SchemeId::ETD2()};
}

FourierState Fig1(const Grid& g) {
  return nlsep::load_initial(g, nlsep::InitialCondition::Fig1());
}

TEST(StepsFor, DivisibilityAndErrors) {
  EXPECT_EQ(nlsep::steps_for(1.0, 0.01), 100u);
  EXPECT_EQ(nlsep::steps_for(1000.0, 1.0 / 64), 64000u);
  EXPECT_EQ(nlsep::steps_for(0.0, 0.1), 0u);
  EXPECT_THROW(nlsep::steps_for(1.0, 0.3), nlsep::ConfigError);
  EXPECT_THROW(nlsep::steps_for(1.0, 0.0), nlsep::ConfigError);
  EXPECT_THROW(nlsep::steps_for(-1.0, 0.1), nlsep::ConfigError);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.fp_tol = 0.0;
  EXPECT_THROW(c.Validate(), nlsep::ConfigError);
  c = SolverConfig{};
  c.fp_max = 0;
  EXPECT_THROW(c.Validate(), nlsep::ConfigError);
}

TEST(Step, LinearFlowIsExactPhase) {
  Grid g(8, 2 * kPi, 0.3, 0.0);
  const CVector c = oracle::RandomBandLimited(g, 8, 1);
  for (const auto& id : AllSchemes()) {
    const auto [next, rep] = nlsep::step(id, g, 0.1, kGL3, SolverConfig{}, FourierState{c, 0});
    for (std::size_t p = 0; p < g.size(); ++p)
      EXPECT_NEAR(std::abs(next.coeffs[p] - std::exp(Complex(0, -0.1 * g.omegas()[p])) * c[p]),
                  0.0, 1e-15)
          << id.name();
    if (!id.is_explicit()) {
      EXPECT_EQ(rep.iterations, 1) << id.name();
    }
    EXPECT_NEAR(next.t, 0.1, 1e-16);
  }
}

TEST(Step, ConsistencyAsStepShrinks) {
  Grid g(16, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  const FourierState s0 = Fig1(g);
  for (const auto& id : AllSchemes()) {
    double prev = 0.0;
    for (double h : {0.1, 0.05, 0.025}) {
      const auto [next, rep] = nlsep::step(id, g, h, kGL3, SolverConfig{}, s0);
      const double d = oracle::MaxAbsDiff(next.coeffs, s0.coeffs);
      if (prev > 0.0) {
        EXPECT_NEAR(prev / d, 2.0, 0.1) << id.name();
      }
      prev = d;
    }
  }
}

TEST(Step, Ep1MatchesDenseFixedPointOracle) {
  for (double eps : {1.0, 0.05}) {
    Grid g(2, 2 * kPi, eps, 1.0);
    FourierState single = FourierState::Zero(g);
    single.at(g, 1) = Complex(0.8, 0.3);
    FourierState mixed = single;
    mixed.at(g, 0) = 0.5;
    mixed.at(g, -1) = Complex(0.0, -0.4);
    mixed.at(g, -2) = 0.1;
    for (const auto& s0 : {single, mixed}) {
      const auto [next, rep] = nlsep::step(SchemeId::EP1(), g, 0.01, kGL3, SolverConfig{}, s0);
      const CVector want = oracle::DenseEp1Step(g, s0.coeffs, 0.01);
      EXPECT_LE(oracle::MaxAbsDiff(next.coeffs, want), 1e-12) << eps;
    }
  }
}

TEST(Step, Etd2MatchesTwoStageFormula) {
  Grid g(8, 2 * kPi, 0.5, -2.0);
  const FourierState s0{oracle::RandomBandLimited(g, 4, 3, 0.5), 0.0};
  const double h = 0.05;
  const auto [next, rep] = nlsep::step(SchemeId::ETD2(), g, h, kGL3, SolverConfig{}, s0);
  // u+ = e^V u + h (phi1 - phi2) f(u) + h phi2 f(e^V u + h phi1 f(u))
  const auto fu = nlsep::nonlinearity(g, s0);
  FourierState stage = s0;
  CVector want(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Complex z(0, -h * g.omegas()[p]);
    stage.coeffs[p] = std::exp(z) * s0.coeffs[p] + h * nlsep::phi(1, z) * fu.coeffs[p];
  }
  const auto fs = nlsep::nonlinearity(g, stage);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Complex z(0, -h * g.omegas()[p]);
    want[p] = std::exp(z) * s0.coeffs[p] +
              h * (nlsep::phi(1, z) - nlsep::phi(2, z)) * fu.coeffs[p] +
              h * nlsep::phi(2, z) * fs.coeffs[p];
  }
  EXPECT_LE(oracle::MaxAbsDiff(next.coeffs, want), 1e-15);
  EXPECT_EQ(rep.iterations, 0);
}

TEST(Step, NonConvergenceIsAnError) {
  Grid g(8, 2 * kPi, 1.0, -40.0);
  const FourierState s0 = nlsep::load_initial(g, nlsep::InitialCondition::Converge());
  try {
    nlsep::evolve(SchemeId::EP1(), g, 0.5, kGL3, SolverConfig{}, s0, 3);
    FAIL() << "expected ConvergenceError";
  } catch (const nlsep::ConvergenceError& e) {
    EXPECT_EQ(e.step(), std::optional<std::size_t>(1));
    EXPECT_GE(e.iterations(), 1);
  }
  SolverConfig tight;
  tight.fp_max = 2;
  Grid mild(8, 2 * kPi, 1.0, -2.0);
  EXPECT_THROW(nlsep::step(SchemeId::EP3(), mild, 0.1, kGL3, tight,
                           nlsep::load_initial(mild, nlsep::InitialCondition::Converge())),
               nlsep::ConvergenceError);
}

TEST(Evolve, ZeroStepsAndObserverSchedule) {
  Grid g(4, 2 * kPi, 1.0, -2.0);
  const FourierState s0 = nlsep::load_initial(g, nlsep::InitialCondition::Converge());
  const FourierState same = nlsep::evolve(SchemeId::EP1(), g, 0.1, kGL3, SolverConfig{}, s0, 0);
  EXPECT_EQ(same.coeffs, s0.coeffs);

  std::vector<std::size_t> seen;
  std::vector<double> times;
  nlsep::evolve(SchemeId::EP2(), g, 0.1, kGL3, SolverConfig{}, s0, 7,
                [&](std::size_t i, double t, const FourierState&, const nlsep::StepReport&) {
                  seen.push_back(i);
                  times.push_back(t);
                },
                3);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 3, 6, 7}));
  EXPECT_NEAR(times.back(), 0.7, 1e-15);
  EXPECT_THROW(nlsep::evolve(SchemeId::EP1(), g, 0.1, kGL3, SolverConfig{}, s0, 1, {}, 0),
               nlsep::ConfigError);
}

TEST(Evolve, LinearPhaseComposition) {
  Grid g(8, 2 * kPi, 0.1, 0.0);
  const CVector c = oracle::RandomBandLimited(g, 8, 8);
  for (const auto& id : AllSchemes()) {
    const auto s = nlsep::evolve(id, g, 0.01, kGL3, SolverConfig{}, FourierState{c, 0}, 250);
    for (std::size_t p = 0; p < g.size(); ++p)
      EXPECT_NEAR(std::abs(s.coeffs[p] - std::exp(Complex(0, -2.5 * g.omegas()[p])) * c[p]), 0.0,
                  1e-12);
  }
}

TEST(Evolve, Deterministic) {
  Grid g(16, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  const auto a = nlsep::evolve(SchemeId::EP3(), g, 0.01, kGL3, SolverConfig{}, Fig1(g), 50);
  const auto b = nlsep::evolve(SchemeId::EP3(), g, 0.01, kGL3, SolverConfig{}, Fig1(g), 50);
  EXPECT_EQ(a.coeffs, b.coeffs);
}

TEST(Evolve, Ep1EnergyDriftOverTenThousandSteps) {
  Grid g(32, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  const FourierState s0 = Fig1(g);
  const double e0 = nlsep::observables(g, s0).energy;
  double worst = 0.0;
  nlsep::evolve(SchemeId::EP1(), g, 0.01, kGL3, SolverConfig{}, s0, 10000,
                [&](std::size_t, double, const FourierState& s, const nlsep::StepReport&) {
                  worst = std::max(worst, std::abs(nlsep::observables(g, s).energy - e0) / std::abs(e0));
                },
                100);
  EXPECT_LE(worst, 1e-10);
}

TEST(Evolve, EnergyExactRulesConserveEnergyAndEtd2DoesNot) {
  Grid g(16, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  const FourierState s0 = Fig1(g);
  const double e0 = nlsep::observables(g, s0).energy;
  for (const auto& id : AllSchemes()) {
    const auto s = nlsep::evolve(id, g, 0.05, nlsep::energy_exact_quadrature(id), SolverConfig{},
                                 s0, 400);
    const double drift = std::abs(nlsep::observables(g, s).energy - e0) / std::abs(e0);
    if (id.energy_preserving()) {
      EXPECT_LE(drift, 1e-11) << id.name();
    } else {
      EXPECT_GT(drift, 1e-6) << id.name();
    }
  }
}

TEST(Evolve, TimeReversibleForEnergyPreservingSchemes) {
  // One step with h followed by the step of the conjugated state is the
  // identity up to conjugation for the symmetric EP1.
  Grid g(8, 2 * kPi, 1.0, -2.0);
  const FourierState s0{oracle::RandomBandLimited(g, 4, 12, 0.4), 0.0};
  const auto [s1, r1] = nlsep::step(SchemeId::EP1(), g, 0.05, kGL3, SolverConfig{}, s0);
  const auto back = nlsep::step(SchemeId::EP1(), g, 0.05, kGL3, SolverConfig{},
                                nlsep::conjugate_state(g, s1)).first;
  const auto restored = nlsep::conjugate_state(g, back);
  EXPECT_LE(oracle::MaxAbsDiff(restored.coeffs, s0.coeffs), 1e-13);
}

TEST(TwoStep, LinearIdentityIsExact) {
  Grid g(8, 2 * kPi, 0.5, 0.0);
  const FourierState s0{oracle::RandomBandLimited(g, 8, 5), 0.0};
  EXPECT_LE(nlsep::ep1_two_step_residual(g, 0.1, kGL3, SolverConfig{}, s0), 1e-13);
}

TEST(TwoStep, ResidualBoundedByTolerance) {
  Grid g(32, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  SolverConfig cfg;
  EXPECT_LE(nlsep::ep1_two_step_residual(g, 0.01, kGL3, cfg, Fig1(g)), 10 * cfg.fp_tol);
}

TEST(TwoStep, ResidualGrowsWithLooserTolerance) {
  Grid g(32, 4 * std::sqrt(2.0) * kPi, 1.0, -2.0);
  const FourierState s0 = Fig1(g);
  double prev = 0.0;
  for (double tol : {1e-14, 1e-10, 1e-8, 1e-6}) {
    SolverConfig cfg;
    cfg.fp_tol = tol;
    const double r = nlsep::ep1_two_step_residual(g, 0.05, kGL3, cfg, s0);
    EXPECT_LE(r, 10 * tol) << tol;
    if (prev > 0.0) {
      EXPECT_GT(r, 10 * prev) << tol;
    }
    prev = r;
  }
}

TEST(Reference, LinearProblemMatchesPhase) {
  Grid g(8, 2 * kPi, 1.0, 0.0);
  const CVector c = oracle::RandomBandLimited(g, 8, 6);
  const auto ref = nlsep::reference_solution(g, 1.0, FourierState{c, 0}, 1.0 / 640);
  for (std::size_t p = 0; p < g.size(); ++p)
    EXPECT_NEAR(std::abs(ref.coeffs[p] - std::exp(Complex(0, -g.omegas()[p])) * c[p]), 0.0,
                1e-12);
  EXPECT_THROW(nlsep::reference_solution(g, 0.0, FourierState{c, 0}, 0.1), nlsep::ConfigError);
}

TEST(Reference, HalvingReferenceStepIsSelfConsistent) {
  // Long-term form at eps = 0.1 over [0, 10].
  Grid g(32, 2 * kPi, 1.0, -0.2);
  const FourierState s0 = nlsep::load_initial(g, nlsep::InitialCondition::Converge());
  const auto a = nlsep::reference_solution(g, 10.0, s0, 1.0 / 640);
  const auto b = nlsep::reference_solution(g, 10.0, s0, 1.0 / 1280);
  EXPECT_LE(nlsep::sobolev_distance(g, a, b, 0.0), 1e-10);
}

TEST(Rescaling, OriginalAndLongTermRunsAgree) {
  for (double eps : {0.1, 0.01}) {
    const double lambda = -2.0, dk = 0.05;
    Grid original(32, 2 * kPi, eps, lambda);
    Grid long_term(32, 2 * kPi, 1.0, eps * lambda);
    const auto ic = nlsep::InitialCondition::Converge();
    const auto u = nlsep::evolve(SchemeId::EP2(), original, eps * dk, kGL3, SolverConfig{},
                                 nlsep::load_initial(original, ic), 100);
    const auto w = nlsep::evolve(SchemeId::EP2(), long_term, dk, kGL3, SolverConfig{},
                                 nlsep::load_initial(long_term, ic), 100);
    EXPECT_LE(oracle::MaxAbsDiff(u.coeffs, w.coeffs), 1e-12) << eps;
  }
}

}  // namespace
