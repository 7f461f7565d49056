#ifndef NLSEP_HARNESS_CONFIG_HPP
#define NLSEP_HARNESS_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlsep/errors.hpp"
#include "nlsep/harness/csv.hpp"
#include "nlsep/harness/initial.hpp"
#include "nlsep/quadrature.hpp"
#include "nlsep/schemes.hpp"
#include "nlsep/stepper.hpp"

#ifndef NLSEP_BUILD_VERSION
#define NLSEP_BUILD_VERSION "unknown"
#endif

namespace nlsep {

inline std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw ConfigError("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) throw ConfigError("empty number list '" + text + "'");
  return values;
}

inline std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> names;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) names.push_back(item);
  return names;
}

/// One run of the command-line driver. Field names follow the CLI flags.
struct ExperimentConfig {
  std::string mode = "solve";
  std::string scheme = "ep1";
  std::vector<std::string> schemes;  // converge/epcheck scheme set
  double ep2_m = 0.5;
  int M = 32;
  std::optional<double> L;
  std::vector<double> eps{1.0};
  double lambda = -2.0;
  std::vector<double> h;    // empty: mode default
  std::optional<double> T;  // unset: mode default
  std::string quad = "gl3";
  double fp_tol = 1e-14;
  int fp_max = 100;
  std::string ic;  // empty: mode default
  std::optional<double> mu;
  std::string out;
  int stride = 1;
  std::string snapshot;
  bool dealias = false;
  // epcheck
  double theta_max = 50.0;
  int theta_samples = 200;
  int grid_samples = 20;
  std::uint64_t seed = 1;

  SchemeId scheme_id(const std::string& name) const {
    return SchemeId::Parse(name, ep2_m);
  }
  SchemeId scheme_id() const { return scheme_id(scheme); }
  QuadRule quad_rule() const { return parse_quadrature(quad); }

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.fp_tol = fp_tol;
    cfg.fp_max = fp_max;
    return cfg;
  }

  std::string ic_name() const {
    if (!ic.empty()) return ic;
    if (mode == "converge") return "converge";
    if (mode == "conserve") return "smalldata";
    return "fig1";
  }

  std::vector<double> steps() const {
    if (!h.empty()) return h;
    if (mode == "converge") return {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    if (mode == "epcheck") return {0.1};
    return {0.01};
  }

  double horizon() const {
    if (T) return *T;
    if (mode == "converge") return 1.0;
    if (mode == "conserve") return 1e4;
    return 100.0;
  }

  InitialCondition initial_condition() const {
    const std::string ic = ic_name();
    InitialCondition result;
    if (ic == "fig1") {
      result = InitialCondition::Fig1(mu.value_or(0.0));
    } else if (ic == "converge") {
      result = InitialCondition::Converge();
    } else if (ic == "smalldata") {
      result = InitialCondition::SmallData();
    } else if (ic.rfind("fourier:", 0) == 0) {
      result = InitialCondition::Fourier(read_fourier_modes(ic.substr(8)));
    } else {
      throw ConfigError("unknown initial condition '" + ic +
                        "' (expected fig1, converge, smalldata, fourier:<file>)");
    }
    return result;
  }

  double length() const {
    if (L) return *L;
    if (ic_name() == "fig1") return InitialCondition::Fig1().natural_length();
    return 2.0 * std::numbers::pi;
  }

  Grid grid(double eps_value) const {
    return Grid(M, length(), eps_value, lambda, dealias);
  }

  void Validate() const {
    if (mode != "solve" && mode != "converge" && mode != "conserve" &&
        mode != "epcheck")
      throw ConfigError("unknown mode '" + mode + "'");
    if (M < 2) throw ConfigError("M must be at least 2");
    if (!(length() > 0.0)) throw ConfigError("L must be positive");
    if (eps.empty()) throw ConfigError("eps list is empty");
    for (double e : eps)
      if (!(e > 0.0)) throw ConfigError("eps must be positive");
    for (double v : steps())
      if (!(v > 0.0)) throw ConfigError("h must be positive");
    if (!(horizon() > 0.0)) throw ConfigError("T must be positive");
    if (stride < 1) throw ConfigError("stride must be at least 1");
    if (theta_samples < 1 || grid_samples < 1)
      throw ConfigError("sample counts must be positive");
    if (!(theta_max >= 0.0)) throw ConfigError("theta-max must be non-negative");
    solver().Validate();
    SchemeId::EP2(ep2_m);
    scheme_id();
    for (const auto& s : schemes) {
      // conserve takes scheme-quadrature variants such as "ep2-mp"
      const auto dash = mode == "conserve" ? s.find('-') : std::string::npos;
      scheme_id(s.substr(0, dash));
      if (dash != std::string::npos) parse_quadrature(s.substr(dash + 1));
    }
    quad_rule();
    initial_condition();
  }

  /// Multi-line description used as the CSV comment header.
  std::string Describe() const {
    std::ostringstream os;
    auto join = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
      return s;
    };
    os << "mode=" << mode << '\n'
       << "scheme=" << scheme << '\n';
    if (!schemes.empty()) {
      os << "schemes=";
      for (std::size_t i = 0; i < schemes.size(); ++i) os << (i ? "," : "") << schemes[i];
      os << '\n';
    }
    os << "ep2-m=" << format_real(ep2_m) << '\n'
       << "M=" << M << '\n'
       << "L=" << format_real(length()) << '\n'
       << "eps=" << join(eps) << '\n'
       << "lambda=" << format_real(lambda) << '\n'
       << "h=" << join(steps()) << '\n'
       << "T=" << format_real(horizon()) << '\n'
       << "quad=" << quad << '\n'
       << "fp-tol=" << format_real(fp_tol) << '\n'
       << "fp-max=" << fp_max << '\n'
       << "ic=" << ic_name() << '\n';
    if (mu) os << "mu=" << format_real(*mu) << '\n';
    os << "stride=" << stride << '\n'
       << "build=" << NLSEP_BUILD_VERSION;
    return os.str();
  }
};

namespace config_detail {

inline std::vector<double> RealOrList(const nlohmann::json& v) {
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
  }
  if (v.is_string()) return parse_real_list(v.get<std::string>());
  return {v.get<double>()};
}

}  // namespace config_detail

/// Applies the keys of a JSON object (flag names without the leading
/// dashes) on top of `cfg`. Unknown keys are rejected.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  using config_detail::RealOrList;
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "mode") cfg.mode = v.get<std::string>();
      else if (key == "scheme") cfg.scheme = v.get<std::string>();
      else if (key == "schemes") {
        cfg.schemes = v.is_array() ? v.get<std::vector<std::string>>()
                                   : parse_name_list(v.get<std::string>());
      }
      else if (key == "ep2-m") cfg.ep2_m = v.get<double>();
      else if (key == "M") cfg.M = v.get<int>();
      else if (key == "L") cfg.L = v.get<double>();
      else if (key == "eps") cfg.eps = RealOrList(v);
      else if (key == "lambda") cfg.lambda = v.get<double>();
      else if (key == "h") cfg.h = RealOrList(v);
      else if (key == "T") cfg.T = v.get<double>();
      else if (key == "quad") cfg.quad = v.get<std::string>();
      else if (key == "fp-tol") cfg.fp_tol = v.get<double>();
      else if (key == "fp-max") cfg.fp_max = v.get<int>();
      else if (key == "ic") cfg.ic = v.get<std::string>();
      else if (key == "mu") cfg.mu = v.get<double>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "stride") cfg.stride = v.get<int>();
      else if (key == "snapshot") cfg.snapshot = v.get<std::string>();
      else if (key == "dealias") cfg.dealias = v.get<bool>();
      else if (key == "theta-max") cfg.theta_max = v.get<double>();
      else if (key == "theta-samples") cfg.theta_samples = v.get<int>();
      else if (key == "grid-samples") cfg.grid_samples = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_json(base, j);
  return base;
}

}  // namespace nlsep

#endif  // NLSEP_HARNESS_CONFIG_HPP
