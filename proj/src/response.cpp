#include "diamag/response.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace diamag {

namespace {

constexpr double kPoleThreshold = 1e-15;

Reciprocal reciprocal(Complex x) {
  if (std::abs(x) <= kPoleThreshold) {
    const double inf = std::numeric_limits<double>::infinity();
    return {{inf, 0.0}, true};
  }
  return {1.0 / x, false};
}

double real_static(Complex v, const char* name) {
  if (std::abs(v.imag()) >= 1e-14)
    throw std::logic_error(std::string("static ") + name + " has an imaginary part");
  return v.real();
}

}  // namespace

void MediumModel::validate() const {
  if (!(omega_p > 0.0)) throw std::invalid_argument("plasma frequency must be positive");
  for (const auto& t : transitions) t.validate();
}

MediumModel box_medium(const BoxGeometry& geom, int n_max, double gamma_e, DampingForm damping) {
  MediumModel model;
  model.transitions = box_strengths(enumerate_transitions(n_max, geom), geom, gamma_e);
  model.provenance = Provenance::first_principles;
  model.descriptor = "box n_max=" + std::to_string(n_max);
  model.damping = damping;
  return model;
}

Complex resonance_denominator(const MediumModel& model, const TransitionStrengths& t,
                              double omega) {
  const double w2 = t.omega_eg * t.omega_eg;
  if (model.damping == DampingForm::appendix) {
    const Complex z{omega, t.gamma_e};
    return w2 - z * z;
  }
  return {w2 - omega * omega, -2.0 * omega * t.gamma_e};
}

Complex epsilon(const MediumModel& model, double omega) {
  Complex e{1.0, 0.0};
  for (const auto& t : model.transitions) e += t.d_edip / resonance_denominator(model, t, omega);
  return e;
}

Complex inverse_mu(const MediumModel& model, double omega) {
  Complex v{1.0, 0.0};
  const double w2 = omega * omega;
  for (const auto& t : model.transitions) {
    const Complex d = resonance_denominator(model, t, omega);
    v += t.d_dia / (t.omega_eg * t.omega_eg) - t.d_mdip / d - t.d_quad * w2 / d +
         t.d_dipoct * w2 / d;
  }
  return v;
}

Complex chi(const MediumModel& model, double omega) {
  Complex v{0.0, 0.0};
  const double w2 = omega * omega;
  for (const auto& t : model.transitions) {
    const Complex d = resonance_denominator(model, t, omega);
    v += -t.d_dia / (t.omega_eg * t.omega_eg) + t.d_mdip / d + (t.d_quad - t.d_dipoct) * w2 / d;
  }
  return v;
}

Complex chi_E(const MediumModel& model, double omega) { return epsilon(model, omega) - 1.0; }

Reciprocal mu(const MediumModel& model, double omega) {
  return reciprocal(inverse_mu(model, omega));
}

Reciprocal chi_H(const MediumModel& model, double omega) {
  const Complex c = chi(model, omega);
  Reciprocal r = reciprocal(1.0 - c);
  if (!r.pole) r.value *= c;
  return r;
}

ResponseSample sample(const MediumModel& model, double omega) {
  ResponseSample s;
  s.omega = omega;
  s.eps = epsilon(model, omega);
  const Complex inv = inverse_mu(model, omega);
  const Reciprocal m = reciprocal(inv);
  s.mu = m.value;
  s.mu_pole = m.pole;
  s.chi = 1.0 - inv;
  s.chiE = s.eps - 1.0;
  s.epsmu = s.eps * s.mu;
  return s;
}

Eigen::Vector3cd current_response(const MediumModel& model, const PlaneWaveProbe& probe) {
  if (!(probe.k >= 0.0)) throw std::invalid_argument("probe wavevector must be non-negative");
  const double dn = probe.direction.norm();
  if (!(dn > 0.0)) throw std::invalid_argument("probe direction must be non-zero");
  const Eigen::Vector3cd khat = (probe.direction / dn).cast<Complex>();
  if (std::abs(khat.dot(probe.A)) >= 1e-12 * probe.A.norm())
    throw std::invalid_argument("probe amplitude is not transverse");

  const double w2 = probe.omega * probe.omega;
  Complex electric{0.0, 0.0};
  Complex magnetic{0.0, 0.0};
  for (const auto& t : model.transitions) {
    const Complex d = resonance_denominator(model, t, probe.omega);
    electric += t.d_edip * w2 / d;
    magnetic += t.d_dia / (t.omega_eg * t.omega_eg) - t.d_mdip / d - t.d_quad * w2 / d +
                t.d_dipoct * w2 / d;
  }
  return (electric - probe.k * probe.k * magnetic) * probe.A;
}

StaticLimits static_limits(const MediumModel& model) {
  StaticLimits s;
  const Complex inv = inverse_mu(model, 0.0);
  const Reciprocal m = reciprocal(inv);
  s.mu_pole = m.pole;
  s.mu0 = m.pole ? m.value.real() : real_static(m.value, "mu");
  s.eps0 = real_static(epsilon(model, 0.0), "epsilon");
  s.chi0 = real_static(chi(model, 0.0), "chi");
  return s;
}

double resonant_positivity(const MediumModel& model, std::size_t index) {
  if (index >= model.transitions.size())
    throw std::out_of_range("resonant_positivity: transition index out of range");
  const auto& t = model.transitions[index];
  if (!(t.gamma_e > 0.0)) throw std::invalid_argument("resonant_positivity: linewidth must be positive");
  return (t.d_edip - t.d_dipoct * t.omega_eg * t.omega_eg) / (2.0 * t.omega_eg * t.gamma_e);
}

LongitudinalCoefficients longitudinal_coefficients(const Tensor4cd& f) {
  Complex ndnd{0.0, 0.0}, nndd{0.0, 0.0}, nddn{0.0, 0.0}, dnnd{0.0, 0.0};
  for (int d = 0; d < 3; ++d)
    for (int n = 0; n < 3; ++n) {
      ndnd += f(n, d, n, d);
      nndd += f(n, n, d, d);
      nddn += f(n, d, d, n);
      dnnd += f(d, n, n, d);
    }
  return {(4.0 * ndnd - nndd - nddn) / 30.0, (4.0 * nndd - ndnd - dnnd) / 30.0};
}

}  // namespace diamag
