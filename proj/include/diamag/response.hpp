#pragma once

// Frequency-dependent response of a multipole medium: eps, mu, chi, chi_E and
// the transverse current response, in omega_p units.

#include <string>
#include <vector>

#include "diamag/multipole.hpp"

namespace diamag {

enum class Provenance { phenomenological, first_principles };

/// Main text: w_eg^2 - w^2 - 2 i w gamma. Appendix: w_eg^2 - (w + i gamma)^2.
enum class DampingForm { main_text, appendix };

struct MediumModel {
  std::vector<TransitionStrengths> transitions;
  double omega_p = 1.0;
  Provenance provenance = Provenance::phenomenological;
  std::string descriptor;
  DampingForm damping = DampingForm::main_text;

  /// Validates every transition. An empty list is vacuum.
  void validate() const;
};

/// First-principles medium from an enumerated box basis.
MediumModel box_medium(const BoxGeometry& geom, int n_max, double gamma_e,
                       DampingForm damping = DampingForm::main_text);

Complex resonance_denominator(const MediumModel& model, const TransitionStrengths& t,
                              double omega);

Complex epsilon(const MediumModel& model, double omega);
Complex inverse_mu(const MediumModel& model, double omega);
Complex chi(const MediumModel& model, double omega);
Complex chi_E(const MediumModel& model, double omega);

/// A reciprocal that may sit on a pole.
struct Reciprocal {
  Complex value;
  bool pole = false;
};

Reciprocal mu(const MediumModel& model, double omega);
/// chi / (1 - chi)
Reciprocal chi_H(const MediumModel& model, double omega);

struct ResponseSample {
  double omega = 0.0;
  Complex eps, mu, chi, chiE, epsmu;
  bool mu_pole = false;
};

ResponseSample sample(const MediumModel& model, double omega);

struct PlaneWaveProbe {
  double omega = 0.0;
  double k = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector3cd A = Eigen::Vector3cd::UnitX();
};

/// delta j for a transverse plane wave, omega_p^2 units, E = i omega A.
Eigen::Vector3cd current_response(const MediumModel& model, const PlaneWaveProbe& probe);

struct StaticLimits {
  double mu0 = 1.0;
  double eps0 = 1.0;
  double chi0 = 0.0;
  bool mu_pole = false;
};

/// Throws std::logic_error if any zero-frequency value has an imaginary part.
StaticLimits static_limits(const MediumModel& model);

/// (1 / 2 w_eg gamma_e) [d_edip - d_dipoct w_eg^2] for transition `index`.
double resonant_positivity(const MediumModel& model, std::size_t index);

struct LongitudinalCoefficients {
  Complex zeta, upsilon;
};

LongitudinalCoefficients longitudinal_coefficients(const Tensor4cd& alpha_tot);

}  // namespace diamag
