#ifndef NLSEP_HARNESS_INITIAL_HPP
#define NLSEP_HARNESS_INITIAL_HPP

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/spectral.hpp"

namespace nlsep {

struct FourierMode {
  int j = 0;
  double re = 0.0;
  double im = 0.0;
};

struct InitialCondition {
  enum class Preset { kFig1, kConverge, kSmallData, kFourier };

  Preset preset = Preset::kFig1;
  double mu = 0.0;  // fig1 wavenumber; <= 0 selects 2 pi / L
  std::vector<FourierMode> modes;

  static InitialCondition Fig1(double mu = 0.0) {
    return InitialCondition{Preset::kFig1, mu, {}};
  }
  static InitialCondition Converge() {
    return InitialCondition{Preset::kConverge, 0.0, {}};
  }
  static InitialCondition SmallData() {
    return InitialCondition{Preset::kSmallData, 0.0, {}};
  }
  static InitialCondition Fourier(std::vector<FourierMode> modes) {
    return InitialCondition{Preset::kFourier, 0.0, std::move(modes)};
  }

  std::string name() const {
    switch (preset) {
      case Preset::kFig1: return "fig1";
      case Preset::kConverge: return "converge";
      case Preset::kSmallData: return "smalldata";
      case Preset::kFourier: return "fourier";
    }
    return "?";
  }

  /// Domain length the preset is defined on (fig1: 4 sqrt(2) pi).
  double natural_length() const {
    if (preset == Preset::kFig1) return 4.0 * std::sqrt(2.0) * std::numbers::pi;
    return 2.0 * std::numbers::pi;
  }
};

/// Reads "j re im" triples, one per line; '#' starts a comment and commas
/// count as whitespace.
inline std::vector<FourierMode> read_fourier_modes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Fourier mode file '" + path + "'");
  std::vector<FourierMode> modes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    FourierMode m;
    if (!(fields >> m.j)) continue;
    if (!(fields >> m.re >> m.im))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'j re im'");
    modes.push_back(m);
  }
  return modes;
}

inline FourierState load_initial(const Grid& g, const InitialCondition& ic) {
  using Preset = InitialCondition::Preset;
  if (ic.preset == Preset::kFourier) {
    FourierState s = FourierState::Zero(g);
    for (const auto& m : ic.modes) s.at(g, m.j) += Complex(m.re, m.im);
    return s;
  }
  if ((ic.preset == Preset::kConverge || ic.preset == Preset::kSmallData) &&
      std::abs(g.length() - 2.0 * std::numbers::pi) > 1e-12)
    throw ConfigError("initial condition '" + ic.name() +
                      "' is defined on L = 2 pi");

  const double pi = std::numbers::pi;
  const double mu = ic.mu > 0.0 ? ic.mu : 2.0 * pi / g.length();
  PhysicalState p{CVector(g.size()), 0.0};
  const auto x = g.points();
  for (std::size_t k = 0; k < g.size(); ++k) {
    switch (ic.preset) {
      case Preset::kFig1:
        p.values[k] = Complex(0.025 * std::cos(mu * x[k]), 0.5);
        break;
      case Preset::kConverge:
        p.values[k] = std::cos(x[k]) + std::sin(x[k]);
        break;
      case Preset::kSmallData: {
        const double a = x[k] / pi - 1.0;
        const double b = x[k] / pi + 1.0;
        const double base = 0.1 * a * a * a * b * b;
        p.values[k] = Complex(base, base * b);
        break;
      }
      case Preset::kFourier: break;
    }
  }
  return to_fourier(g, p);
}

}  // namespace nlsep

#endif  // NLSEP_HARNESS_INITIAL_HPP
