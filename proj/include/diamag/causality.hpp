#pragma once

// Kramers-Kronig transforms on tabulated data, the static identity, passivity
// scans, the high-frequency sum rule and a time-domain causality test.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diamag/response.hpp"

namespace diamag {

/// f(omega) ~ coefficient / omega^exponent beyond the last grid point.
struct PowerTail {
  int exponent = 2;
  double coefficient = 0.0;
};

/// Fits an integer power law to the upper end of (omegas, values).
/// A non-decaying tail yields exponent <= 0.
PowerTail fit_power_tail(const Eigen::ArrayXd& omegas, const Eigen::ArrayXd& values);

/// Samples of a response function on omega >= 0. The real part is taken to be
/// even in omega, the imaginary part odd.
struct TabulatedResponse {
  Eigen::ArrayXd omegas;
  Eigen::ArrayXcd values;
  PowerTail re_tail;
  PowerTail im_tail;

  /// Builds a table and fits both tails from the samples.
  static TabulatedResponse from_samples(Eigen::ArrayXd omegas, Eigen::ArrayXcd values);

  /// Throws std::invalid_argument unless the grid has >= 64 strictly increasing,
  /// non-negative points, finite values, and tails matching the last sample.
  void validate() const;
};

/// Principal-value transforms at one target frequency.
double kk_real_at(const TabulatedResponse& tab, double omega);
double kk_imag_at(const TabulatedResponse& tab, double omega);

/// Re from Im (and the mirror). The input component is kept, the other
/// replaced; tails of the result are refitted. Tail exponent < 1 is rejected.
TabulatedResponse kk_real_from_imag(const TabulatedResponse& tab);
TabulatedResponse kk_imag_from_real(const TabulatedResponse& tab);

/// Half the points uniform on [0, omega_max], the rest clustered around each
/// resonance below omega_max. Starts at 0, strictly increasing.
Eigen::ArrayXd refined_grid(const MediumModel& model, double omega_max, int n_points);

TabulatedResponse tabulate_chi(const MediumModel& model, const Eigen::ArrayXd& grid);

struct StaticIdentity {
  double lhs = 0.0;        ///< chi(0)
  double asymptote = 0.0;  ///< chi(inf), zero for a sum-rule-closed model
  double rhs = 0.0;        ///< (2/pi) int_0^inf Im chi / omega
  /// |rhs - (lhs - asymptote)| / |lhs - asymptote|
  double residual = 0.0;
  std::optional<std::string> warning;
};

StaticIdentity kk_static_identity(const MediumModel& model, double omega_max = 50.0,
                                  int n_points = 4096);

/// sum_e [d_dia / w_eg^2 + d_quad - d_dipoct]
double mu_sum_rule_residual(const MediumModel& model);

struct PassivityReport {
  double min_im_epsmu = 0.0;
  double min_im_epsmu_at = 0.0;
  double min_im_mu = 0.0;
  double min_im_mu_at = 0.0;
  std::vector<std::pair<double, double>> negative_im_mu_intervals;
  double kk_static_residual = 0.0;
};

/// Scans (0, omega_max] on `grid` (points <= 0 are skipped); interval ends are
/// bisected to 1e-6.
PassivityReport passivity_scan(const MediumModel& model, const Eigen::ArrayXd& grid);

struct TimeDomainSpec {
  int n_points = 1 << 16;
  double half_width = 200.0;
  bool hann_window = true;
  /// Pre-signal is measured for t < -exclusion; 0 means one time step.
  double exclusion = 0.0;
  /// Remove chi(inf) before transforming; otherwise a non-decaying chi is rejected.
  bool subtract_asymptote = false;
  /// Transform the t = 0 step of chi(t) analytically instead of by FFT.
  bool analytic_jump = true;
};

struct TimeDomainReport {
  double max_pre = 0.0;
  double max_post = 0.0;
  double dt = 0.0;
  double ratio() const { return max_post > 0.0 ? max_pre / max_post : 0.0; }
};

TimeDomainReport time_domain_causality(const MediumModel& model, const TimeDomainSpec& spec = {});

/// chi at infinite frequency.
double chi_asymptote(const MediumModel& model);

/// chi(t = 0+), the coefficient b of chi ~ i b / omega.
double chi_jump(const MediumModel& model);

/// chi(t) on the wrapped time axis of the transform; first = times, second = values.
std::pair<Eigen::ArrayXd, Eigen::ArrayXcd> chi_time_series(const MediumModel& model,
                                                           const TimeDomainSpec& spec);

}  // namespace diamag
