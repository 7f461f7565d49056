#ifndef NLSEP_SPECTRAL_HPP
#define NLSEP_SPECTRAL_HPP

// Periodic Fourier pseudospectral discretization of the cubic NLS
//
//   i u_t = -(1/eps) u_xx + lambda |u|^2 u,   x in [-L/2, L/2),
//
// with 2M collocation points. Modes are stored in the order j = -M..M-1,
// i.e. array slot p holds mode j = p - M.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/fft.hpp"

namespace nlsep {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

class Grid {
 public:
  Grid(int half_modes, double length, double eps, double lambda,
       bool dealias = false)
      : half_modes_(half_modes),
        length_(length),
        eps_(eps),
        lambda_(lambda),
        dealias_(dealias) {
    if (half_modes < 2) throw ConfigError("M must be at least 2");
    if (!(length > 0.0) || !std::isfinite(length))
      throw ConfigError("domain length L must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw ConfigError("eps must be positive");
    if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");

    const std::size_t n = size();
    wavenumbers_.resize(n);
    omegas_.resize(n);
    points_.resize(n);
    parity_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const int j = ModeOf(p);
      const double k = 2.0 * std::numbers::pi * j / length;
      wavenumbers_[p] = k;
      // Exact integer arithmetic on the 2*pi periodic domain keeps
      // omega_j = j^2/eps bit-exact there.
      omegas_[p] = (length == 2.0 * std::numbers::pi)
                       ? static_cast<double>(j) * j / eps
                       : k * k / eps;
      points_[p] = length * j / static_cast<double>(n);
      parity_[p] = (p % 2 == 0) ? 1.0 : -1.0;
    }
    half_sign_ = (half_modes % 2 == 0) ? 1.0 : -1.0;
    fft_ = FftPlan::ForSize(n);
  }

  int half_modes() const { return half_modes_; }
  std::size_t size() const { return 2 * static_cast<std::size_t>(half_modes_); }
  double length() const { return length_; }
  double eps() const { return eps_; }
  double lambda() const { return lambda_; }
  bool dealias() const { return dealias_; }

  int ModeOf(std::size_t slot) const {
    return static_cast<int>(slot) - half_modes_;
  }
  std::size_t SlotOf(int mode) const {
    if (mode < -half_modes_ || mode >= half_modes_)
      throw ConfigError("mode index " + std::to_string(mode) +
                        " outside [-M, M-1]");
    return static_cast<std::size_t>(mode + half_modes_);
  }

  std::span<const double> wavenumbers() const { return wavenumbers_; }
  std::span<const double> omegas() const { return omegas_; }
  /// Collocation points x_k = L k / (2M), k = -M..M-1.
  std::span<const double> points() const { return points_; }

  /// A grid identical except for eps and lambda (shares the FFT plan).
  Grid WithParameters(double eps, double lambda) const {
    return Grid(half_modes_, length_, eps, lambda, dealias_);
  }

  // u(x_k) = sum_j c_j exp(i k_j x_k). In place is allowed.
  void ToPhysical(std::span<const Complex> in, std::span<Complex> out) const {
    CheckLength(in.size());
    CheckLength(out.size());
    const std::size_t n = size();
    for (std::size_t p = 0; p < n; ++p) out[p] = parity_[p] * in[p];
    fft_->Backward(out);
    for (std::size_t q = 0; q < n; ++q) out[q] *= parity_[q] * half_sign_;
  }

  // c_j = (1/2M) sum_k u(x_k) exp(-i k_j x_k). In place is allowed.
  void ToFourier(std::span<const Complex> in, std::span<Complex> out) const {
    CheckLength(in.size());
    CheckLength(out.size());
    const std::size_t n = size();
    for (std::size_t q = 0; q < n; ++q) out[q] = parity_[q] * in[q];
    fft_->Forward(out);
    const double scale = half_sign_ / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) out[p] *= parity_[p] * scale;
  }

  // Fourier coefficients of -i lambda Q(|u|^2 u); `out` is also the scratch.
  void Nonlinearity(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t n = size();
    if (lambda_ == 0.0) {
      CheckLength(in.size());
      CheckLength(out.size());
      for (std::size_t p = 0; p < n; ++p) out[p] = 0.0;
      return;
    }
    ToPhysical(in, out);
    const Complex factor(0.0, -lambda_);
    for (std::size_t q = 0; q < n; ++q) out[q] *= factor * std::norm(out[q]);
    ToFourier(out, out);
    if (dealias_) {
      const double cutoff = 2.0 * half_modes_ / 3.0;
      for (std::size_t p = 0; p < n; ++p)
        if (std::abs(ModeOf(p)) > cutoff) out[p] = 0.0;
    }
  }

  void CheckLength(std::size_t len) const {
    if (len != size())
      throw ConfigError("state length " + std::to_string(len) +
                        " does not match grid size " + std::to_string(size()));
  }

 private:
  int half_modes_;
  double length_;
  double eps_;
  double lambda_;
  bool dealias_;
  std::vector<double> wavenumbers_;
  std::vector<double> omegas_;
  std::vector<double> points_;
  std::vector<double> parity_;
  double half_sign_ = 1.0;
  std::shared_ptr<const FftPlan> fft_;
};

inline Grid build_grid(int half_modes, double length, double eps,
                       double lambda) {
  return Grid(half_modes, length, eps, lambda);
}

struct FourierState {
  CVector coeffs;
  double t = 0.0;

  Complex& at(const Grid& g, int mode) { return coeffs[g.SlotOf(mode)]; }
  Complex at(const Grid& g, int mode) const { return coeffs[g.SlotOf(mode)]; }

  static FourierState Zero(const Grid& g, double t = 0.0) {
    return FourierState{CVector(g.size(), Complex(0.0)), t};
  }
};

struct PhysicalState {
  CVector values;
  double t = 0.0;
};

struct Observables {
  double energy = 0.0;
  double density = 0.0;
  double momentum = 0.0;
  std::vector<double> actions;
};

inline PhysicalState to_physical(const Grid& g, const FourierState& s) {
  PhysicalState out{CVector(g.size()), s.t};
  g.ToPhysical(s.coeffs, out.values);
  return out;
}

inline FourierState to_fourier(const Grid& g, const PhysicalState& p) {
  FourierState out{CVector(g.size()), p.t};
  g.ToFourier(p.values, out.coeffs);
  return out;
}

inline FourierState nonlinearity(const Grid& g, const FourierState& s) {
  g.CheckLength(s.coeffs.size());
  FourierState out{CVector(g.size()), s.t};
  g.Nonlinearity(s.coeffs, out.coeffs);
  return out;
}

/// Discrete energy, density, momentum and actions of a state.
///
/// energy   = 1/(2 eps) sum_j k_j^2 |c_j|^2 + lambda/4 * mean_k |u(x_k)|^4
/// density  = sum_j |c_j|^2
/// momentum = 2 sum_j k_j |c_j|^2
/// action_j = |c_j|^2 / 2
inline Observables observables(const Grid& g, const FourierState& s) {
  g.CheckLength(s.coeffs.size());
  const std::size_t n = g.size();
  Observables obs;
  obs.actions.resize(n);
  double gradient = 0.0;
  const auto k = g.wavenumbers();
  for (std::size_t p = 0; p < n; ++p) {
    const double a = std::norm(s.coeffs[p]);
    obs.actions[p] = 0.5 * a;
    obs.density += a;
    obs.momentum += 2.0 * k[p] * a;
    gradient += k[p] * k[p] * a;
  }
  double quartic = 0.0;
  if (g.lambda() != 0.0) {
    CVector u(n);
    g.ToPhysical(s.coeffs, u);
    for (const auto& v : u) {
      const double m = std::norm(v);
      quartic += m * m;
    }
    quartic /= static_cast<double>(n);
  }
  obs.energy = gradient / (2.0 * g.eps()) + 0.25 * g.lambda() * quartic;
  return obs;
}

/// (sum_j (1 + k_j^2)^s |c_j|^2)^(1/2)
inline double sobolev_norm(const Grid& g, std::span<const Complex> coeffs,
                           double sidx) {
  if (!(sidx >= 0.0)) throw ConfigError("Sobolev index must be >= 0");
  g.CheckLength(coeffs.size());
  const auto k = g.wavenumbers();
  double sum = 0.0;
  for (std::size_t p = 0; p < coeffs.size(); ++p) {
    const double w = sidx == 0.0 ? 1.0 : std::pow(1.0 + k[p] * k[p], sidx);
    sum += w * std::norm(coeffs[p]);
  }
  return std::sqrt(sum);
}

inline double sobolev_norm(const Grid& g, const FourierState& s, double sidx) {
  return sobolev_norm(g, std::span<const Complex>(s.coeffs), sidx);
}

/// Sobolev norm of the coefficient difference a - b.
inline double sobolev_distance(const Grid& g, const FourierState& a,
                               const FourierState& b, double sidx) {
  g.CheckLength(a.coeffs.size());
  g.CheckLength(b.coeffs.size());
  CVector diff(a.coeffs.size());
  for (std::size_t p = 0; p < diff.size(); ++p)
    diff[p] = a.coeffs[p] - b.coeffs[p];
  return sobolev_norm(g, std::span<const Complex>(diff), sidx);
}

/// sum_j |omega_j|^s |I_j(s) - I_j(s0)| / eps_tilde^2. The zero mode has
/// weight |omega_0|^s = 0.
inline double weighted_action_deviation(const Grid& g, const FourierState& s,
                                        const FourierState& s0, double sidx,
                                        double eps_tilde) {
  if (!(eps_tilde > 0.0)) throw ConfigError("eps_tilde must be positive");
  g.CheckLength(s.coeffs.size());
  g.CheckLength(s0.coeffs.size());
  const auto omega = g.omegas();
  double sum = 0.0;
  for (std::size_t p = 0; p < s.coeffs.size(); ++p) {
    if (omega[p] == 0.0) continue;
    const double di =
        0.5 * std::abs(std::norm(s.coeffs[p]) - std::norm(s0.coeffs[p]));
    sum += std::pow(std::abs(omega[p]), sidx) * di;
  }
  return sum / (eps_tilde * eps_tilde);
}

}  // namespace nlsep

#endif  // NLSEP_SPECTRAL_HPP
