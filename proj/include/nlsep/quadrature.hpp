#ifndef NLSEP_QUADRATURE_HPP
#define NLSEP_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nlsep/errors.hpp"

namespace nlsep {

/// Quadrature rule on [0, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::string name;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree 2n-1.
inline QuadRule gauss_legendre(int n) {
  if (n < 1 || n > 10)
    throw ConfigError("Gauss-Legendre rules are available for 1..10 points");
  QuadRule rule;
  rule.name = n == 1 ? "mp" : "gl" + std::to_string(n);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = 0.5 * (1.0 + x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  // Roots come out in decreasing x.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

inline QuadRule midpoint_rule() { return gauss_legendre(1); }

/// Parses "mp" or "gl1".."gl10".
inline QuadRule parse_quadrature(const std::string& id) {
  if (id == "mp" || id == "midpoint") return midpoint_rule();
  if (id.size() >= 3 && id.rfind("gl", 0) == 0) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(id.substr(2), &used);
      if (used != id.size() - 2) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n >= 1 && n <= 10) return gauss_legendre(n);
  }
  throw ConfigError("unknown quadrature '" + id + "' (expected mp, gl2..gl10)");
}

}  // namespace nlsep

#endif  // NLSEP_QUADRATURE_HPP
