#ifndef NLSEP_PHI_HPP
#define NLSEP_PHI_HPP

// phi-functions of exponential integrators:
//
//   phi_0(z) = e^z,
//   phi_j(z) = int_0^1 e^{(1-x) z} x^{j-1}/(j-1)! dx,   j >= 1,
//
// which satisfy phi_j(z) = 1/j! + z phi_{j+1}(z).

#include <cmath>
#include <complex>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/spectral.hpp"

namespace nlsep {

namespace phi_detail {

inline constexpr double kSeriesRadius = 0.5;
inline constexpr int kSeriesTerms = 30;

inline double InverseFactorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r /= i;
  return r;
}

// sum_{n=0}^{N} z^n/(n+j)!, nested as 1/j! (1 + z/(j+1) (1 + z/(j+2) (...))).
inline Complex Series(int j, Complex z, int last) {
  Complex acc(1.0);
  for (int n = last; n >= 1; --n) acc = 1.0 + acc * z / static_cast<double>(j + n);
  return acc * InverseFactorial(j);
}

}  // namespace phi_detail

inline Complex phi(int j, Complex z) {
  if (j < 0) throw ConfigError("phi order must be non-negative");
  if (j == 0) return std::exp(z);
  if (std::abs(z) < phi_detail::kSeriesRadius)
    return phi_detail::Series(j, z, phi_detail::kSeriesTerms);
  Complex value = std::exp(z);
  double inv_fact = 1.0;  // 1/k! for the current order k
  for (int k = 0; k < j; ++k) {
    value = (value - inv_fact) / z;
    inv_fact /= (k + 1);
  }
  return value;
}

/// Partial sum sum_{n=0}^{terms-1} z^n/(n+j)!; an independent cross-check
/// for phi() that never uses the recurrence.
inline Complex phi_series_oracle(int j, Complex z, int terms) {
  if (j < 0) throw ConfigError("phi order must be non-negative");
  if (terms < 1) throw ConfigError("series needs at least one term");
  Complex sum(0.0);
  Complex power(1.0);
  for (int n = 0; n < terms; ++n) {
    sum += power * phi_detail::InverseFactorial(n + j);
    power *= z;
  }
  return sum;
}

/// Per-mode multipliers phi_j(scale * (-i h omega_j)).
inline CVector phi_diag(int j, const Grid& g, double h, double scale) {
  if (!(h > 0.0)) throw ConfigError("step size must be positive");
  const auto omega = g.omegas();
  CVector out(omega.size());
  for (std::size_t p = 0; p < omega.size(); ++p)
    out[p] = phi(j, Complex(0.0, -scale * h * omega[p]));
  return out;
}

}  // namespace nlsep

#endif  // NLSEP_PHI_HPP
