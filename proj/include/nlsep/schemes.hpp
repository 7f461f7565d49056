#ifndef NLSEP_SCHEMES_HPP
#define NLSEP_SCHEMES_HPP

// Coefficient functions of continuous-stage exponential integrators
//
//   u^{n+tau} = C_tau(V) u^n + h int_0^1 A_{tau,sigma}(V) f(u^{n+sigma}) dsigma
//
// evaluated on a single Fourier mode, where V acts as the scalar
// z = -i h omega_j. All schemes here write
//
//   C_tau        = sum_k l_k(tau) e^{c_k z}          (Lagrange in tau)
//   A_{tau,sigma} = sum_{l,n} a_{ln}(z) tau^l sigma^{n-1}
//
// except the ETD2 comparator, whose C_tau is the exact free flow e^{tau z}.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/phi.hpp"
#include "nlsep/quadrature.hpp"

namespace nlsep {

enum class SchemeKind { kEP1, kEP2, kEP3, kETD2 };

class SchemeId {
 public:
  static SchemeId EP1() { return SchemeId(SchemeKind::kEP1, 0.0); }
  static SchemeId EP2(double m = 0.5) {
    if (m == 0.0 || m == 1.0 || !std::isfinite(m))
      throw ConfigError("EP2 parameter m must differ from 0 and 1");
    return SchemeId(SchemeKind::kEP2, m);
  }
  static SchemeId EP3() { return SchemeId(SchemeKind::kEP3, 0.0); }
  static SchemeId ETD2() { return SchemeId(SchemeKind::kETD2, 0.0); }

  static SchemeId Parse(const std::string& name, double ep2_m = 0.5) {
    if (name == "ep1") return EP1();
    if (name == "ep2") return EP2(ep2_m);
    if (name == "ep3") return EP3();
    if (name == "etd2") return ETD2();
    throw ConfigError("unknown scheme '" + name +
                      "' (expected ep1, ep2, ep3, etd2)");
  }

  SchemeKind kind() const { return kind_; }
  double m() const { return m_; }
  bool energy_preserving() const { return kind_ != SchemeKind::kETD2; }
  bool is_explicit() const { return kind_ == SchemeKind::kETD2; }

  std::string name() const {
    switch (kind_) {
      case SchemeKind::kEP1: return "ep1";
      case SchemeKind::kEP2: return "ep2";
      case SchemeKind::kEP3: return "ep3";
      case SchemeKind::kETD2: return "etd2";
    }
    return "?";
  }

  /// Fitting nodes c_0 = 0 < ... < c_s = 1 (EP3's c_2 lies above 1).
  std::vector<double> fitting_nodes() const;

  bool operator==(const SchemeId&) const = default;

 private:
  SchemeId(SchemeKind kind, double m) : kind_(kind), m_(m) {}
  SchemeKind kind_;
  double m_;
};

/// Lagrange basis over a node set, stored as power-series coefficients.
class LagrangeBasis {
 public:
  LagrangeBasis() = default;
  explicit LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    coeffs_.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> poly{1.0};
      double denom = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t d = 0; d < poly.size(); ++d) {
          next[d + 1] += poly[d];
          next[d] -= nodes_[i] * poly[d];
        }
        poly = std::move(next);
        denom *= nodes_[k] - nodes_[i];
      }
      for (std::size_t d = 0; d < n; ++d) coeffs_[k][d] = poly[d] / denom;
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }

  double Value(std::size_t k, double tau) const {
    double acc = 0.0;
    for (std::size_t d = coeffs_[k].size(); d-- > 0;) acc = acc * tau + coeffs_[k][d];
    return acc;
  }

  double Derivative(std::size_t k, double tau) const {
    double acc = 0.0;
    for (std::size_t d = coeffs_[k].size(); d-- > 1;)
      acc = acc * tau + d * coeffs_[k][d];
    return acc;
  }

  /// Coefficient of tau^i in l_k'(tau).
  double DerivativeCoeff(std::size_t i, std::size_t k) const {
    return i + 1 < coeffs_[k].size() ? (i + 1) * coeffs_[k][i + 1] : 0.0;
  }

 private:
  std::vector<double> nodes_;
  std::vector<std::vector<double>> coeffs_;
};

/// Fixed constants of EP3: nodes {0, c1, c2, 1} and the table
/// C_{ik} = [tau^i] l_k'(tau), i = 0..2, k = 0..3.
struct EP3Constants {
  double c1;
  double c2;
  LagrangeBasis basis;
  std::array<std::array<double, 4>, 3> C;

  static const EP3Constants& Get() {
    static const EP3Constants constants = Make();
    return constants;
  }

 private:
  static EP3Constants Make() {
    const double c1 = 1.0 / 3.0;
    const double r = 9.0 * std::sqrt(58.0);
    const double c2 = (14.0 + std::cbrt(71.0 - r) + std::cbrt(71.0 + r)) / 18.0;
    LagrangeBasis basis({0.0, c1, c2, 1.0});
    std::array<std::array<double, 4>, 3> table{};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 4; ++k) table[i][k] = basis.DerivativeCoeff(i, k);
    return EP3Constants{c1, c2, std::move(basis), table};
  }
};

inline std::vector<double> SchemeId::fitting_nodes() const {
  switch (kind_) {
    case SchemeKind::kEP1:
    case SchemeKind::kETD2: return {0.0, 1.0};
    case SchemeKind::kEP2: return {0.0, m_, 1.0};
    case SchemeKind::kEP3: {
      const auto& k = EP3Constants::Get();
      return {0.0, k.c1, k.c2, 1.0};
    }
  }
  return {};
}

/// All coefficient functions of one scheme at one scalar argument z.
class CoeffEval {
 public:
  CoeffEval(const SchemeId& id, Complex z) : id_(id), z_(z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ConfigError("coefficient argument must be finite");
    for (auto& row : a_) row.fill(Complex(0.0));
    switch (id.kind()) {
      case SchemeKind::kEP1: InitEP1(); break;
      case SchemeKind::kEP2: InitEP2(id.m()); break;
      case SchemeKind::kEP3: InitEP3(); break;
      case SchemeKind::kETD2: InitETD2(); break;
    }
  }

  Complex z() const { return z_; }

  /// a_{ln}, 1-based as in the coefficient tables.
  Complex a(int l, int n) const { return a_[l - 1][n - 1]; }

  Complex C(double tau) const {
    if (exact_flow_) return std::exp(tau * z_);
    Complex sum(0.0);
    for (std::size_t k = 0; k < exps_.size(); ++k)
      sum += basis_.Value(k, tau) * exps_[k];
    return sum;
  }

  Complex dC(double tau) const {
    if (exact_flow_) return z_ * std::exp(tau * z_);
    Complex sum(0.0);
    for (std::size_t k = 0; k < exps_.size(); ++k)
      sum += basis_.Derivative(k, tau) * exps_[k];
    return sum;
  }

  Complex A(double tau, double sigma) const {
    Complex sum(0.0);
    double tp = tau;
    for (int l = 0; l < stages_; ++l, tp *= tau) {
      Complex inner(0.0);
      double sp = 1.0;
      for (int n = 0; n < stages_; ++n, sp *= sigma) inner += a_[l][n] * sp;
      sum += tp * inner;
    }
    return sum;
  }

  /// d/dtau A_{tau,sigma}.
  Complex dA(double tau, double sigma) const {
    Complex sum(0.0);
    double tp = 1.0;
    for (int l = 0; l < stages_; ++l, tp *= tau) {
      Complex inner(0.0);
      double sp = 1.0;
      for (int n = 0; n < stages_; ++n, sp *= sigma) inner += a_[l][n] * sp;
      sum += static_cast<double>(l + 1) * tp * inner;
    }
    return sum;
  }

 private:
  void SetNodes(std::vector<double> nodes) {
    basis_ = LagrangeBasis(nodes);
    exps_.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) exps_[k] = std::exp(nodes[k] * z_);
  }

  void InitEP1() {
    stages_ = 1;
    SetNodes({0.0, 1.0});
    a_[0][0] = phi(1, z_);
  }

  void InitEP2(double m) {
    stages_ = 2;
    SetNodes({0.0, m, 1.0});
    const Complex p_m = phi(1, m * z_);
    const Complex p_1 = phi(1, z_);
    const Complex p_r = phi(1, (1.0 - m) * z_);
    const Complex a11 = (1.0 + m) / (m * (1.0 - m)) * p_m +
                        (m + 1.0) / (m - 1.0) * p_1 + 1.0 / (1.0 - m) * p_r;
    const Complex a22 = 2.0 / (m * (1.0 - m)) * (p_m - p_1 + p_r);
    const Complex a21 = (1.0 + 1.0 / m) * p_1 - (1.0 / m) * p_r - a11;
    const Complex a12 = -(2.0 / m) * (p_1 - p_r) - a22;
    a_[0][0] = a11;
    a_[0][1] = a12;
    a_[1][0] = a21;
    a_[1][1] = a22;
  }

  // For the node pairs k < q the table reads
  //   a_{ln} = -(1/l) sum_{k<q} (c_q - c_k) C_{l-1,q} C_{n-1,k}
  //                             phi_1((c_q - c_k) z),
  // which makes A_{1,sigma} = -sum_k (1 - c_k) l_k'(sigma) phi_1((1-c_k) z).
  void InitEP3() {
    stages_ = 3;
    const auto& k3 = EP3Constants::Get();
    basis_ = k3.basis;
    const auto& nodes = basis_.nodes();
    exps_.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) exps_[k] = std::exp(nodes[k] * z_);

    std::array<std::array<Complex, 4>, 4> phi_gap{};
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t q = k + 1; q < 4; ++q)
        phi_gap[k][q] = (nodes[q] - nodes[k]) * phi(1, (nodes[q] - nodes[k]) * z_);

    for (int l = 1; l <= 3; ++l) {
      for (int n = 1; n <= 3; ++n) {
        Complex sum(0.0);
        for (std::size_t k = 0; k < 4; ++k)
          for (std::size_t q = k + 1; q < 4; ++q)
            sum += k3.C[l - 1][q] * k3.C[n - 1][k] * phi_gap[k][q];
        a_[l - 1][n - 1] = -sum / static_cast<double>(l);
      }
    }
  }

  // Explicit second-order exponential Runge-Kutta written in
  // continuous-stage form: C_tau = e^{tau z} and
  // A_{tau,sigma} = tau (alpha + beta sigma), with alpha, beta chosen so that
  // the sigma-moments of A_{1,.} reproduce the update weights phi_1, phi_2.
  void InitETD2() {
    stages_ = 2;
    exact_flow_ = true;
    const Complex p1 = phi(1, z_);
    const Complex p2 = phi(2, z_);
    a_[0][0] = 4.0 * p1 - 6.0 * p2;
    a_[0][1] = 12.0 * p2 - 6.0 * p1;
  }

  SchemeId id_;
  Complex z_;
  int stages_ = 1;
  bool exact_flow_ = false;
  LagrangeBasis basis_;
  std::vector<Complex> exps_;
  std::array<std::array<Complex, 3>, 3> a_{};
};

inline Complex coeff_C(const SchemeId& id, double tau, Complex z) {
  return CoeffEval(id, z).C(tau);
}
inline Complex coeff_A(const SchemeId& id, double tau, double sigma, Complex z) {
  return CoeffEval(id, z).A(tau, sigma);
}
inline Complex coeff_dC(const SchemeId& id, double tau, Complex z) {
  return CoeffEval(id, z).dC(tau);
}
inline Complex coeff_dA(const SchemeId& id, double tau, double sigma, Complex z) {
  return CoeffEval(id, z).dA(tau, sigma);
}

struct EpResiduals {
  Complex r1;
  Complex r2;
  Complex r3;

  double max_abs() const {
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
  }
};

/// Energy-preservation conditions reduced to one Fourier mode, where the
/// generator acts as multiplication by a purely imaginary z and
/// transposition becomes complex conjugation.
inline EpResiduals ep_condition_residuals(const CoeffEval& ce, double tau,
                                          double sigma) {
  const Complex z = ce.z();
  if (z.real() != 0.0)
    throw ConfigError("energy-preservation residuals need an imaginary argument");
  const Complex a1_tau = ce.A(1.0, tau);
  const Complex a1_sigma = ce.A(1.0, sigma);
  EpResiduals r;
  r.r1 = ce.A(0.0, sigma);
  r.r2 = std::conj(std::exp(z)) * z * a1_tau + std::conj(ce.dC(tau));
  r.r3 = std::conj(z * a1_tau) * z * a1_sigma + z * ce.dA(tau, sigma) +
         std::conj(z * ce.dA(sigma, tau));
  return r;
}

inline EpResiduals ep_condition_residuals(const SchemeId& id, Complex z,
                                          double tau, double sigma) {
  if (z.real() != 0.0)
    throw ConfigError("energy-preservation residuals need an imaginary argument");
  return ep_condition_residuals(CoeffEval(id, z), tau, sigma);
}

inline EpResiduals ep_condition_residuals(const SchemeId& id, double theta,
                                          double tau, double sigma) {
  return ep_condition_residuals(CoeffEval(id, Complex(0.0, -theta)), tau, sigma);
}

/// Three-point Gauss-Legendre for every scheme.
inline QuadRule default_quadrature(const SchemeId&) { return gauss_legendre(3); }

/// Smallest Gauss-Legendre rule for which the discrete stage integrals are
/// exact in the energy balance (sigma-degree 4s - 1 for s stages).
inline QuadRule energy_exact_quadrature(const SchemeId& id) {
  switch (id.kind()) {
    case SchemeKind::kEP1: return gauss_legendre(2);
    case SchemeKind::kEP2: return gauss_legendre(4);
    case SchemeKind::kEP3: return gauss_legendre(6);
    case SchemeKind::kETD2: return gauss_legendre(3);
  }
  return gauss_legendre(3);
}

}  // namespace nlsep

#endif  // NLSEP_SCHEMES_HPP
