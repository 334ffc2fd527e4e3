#pragma once

// Polariton branches of k^2 = omega^2 eps(omega) mu(omega) in the lossless limit
// and the optical sum rule over branches.

#include <string>
#include <vector>

#include "diamag/response.hpp"

namespace diamag {

/// The model with every linewidth multiplied by `scale`.
MediumModel scaled_linewidths(const MediumModel& model, double scale);

/// Distinct positive frequencies where the lossless eps or 1/mu diverge.
std::vector<double> lossless_poles(const MediumModel& model);

/// omega^2 eps(omega) - k^2 / mu(omega) with all linewidths zero.
double dispersion_function(const MediumModel& model, double omega, double k);

struct BracketFailure {
  double k = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string reason;
};

struct LosslessRoots {
  double k = 0.0;
  std::vector<double> omegas;  ///< ascending
  std::size_t expected = 0;     ///< distinct poles + 1
  std::vector<BracketFailure> failures;
  bool complete() const { return failures.empty() && omegas.size() == expected; }
};

/// All positive real roots at wavevector k, bracketed between consecutive poles.
LosslessRoots lossless_roots(const MediumModel& model, double k);

struct DispersionBranch {
  std::vector<double> k_grid;
  std::vector<double> omega;  ///< NaN where the branch has no root
  std::vector<double> v_p;
  std::vector<double> v_g;
  std::vector<Complex> mu;  ///< mu(omega_j) at the scaled linewidths
};

struct BranchSet {
  std::vector<DispersionBranch> branches;
  std::vector<bool> complete;  ///< per k
  std::vector<BracketFailure> failures;
};

/// Branches on k_grid (all k > 0). gamma_scale in [0, 1] multiplies the
/// linewidths used for mu(omega_j); the branch frequencies are lossless.
BranchSet solve_branches(const MediumModel& model, const std::vector<double>& k_grid,
                         double gamma_scale);

struct OpticalSumRule {
  double residual = 0.0;
  bool reliable = true;
};

/// Re[sum_j mu(omega_j) v_p v_g] - 1 at k_grid[k_index].
OpticalSumRule optical_sum_rule_residual(const BranchSet& set, std::size_t k_index);

/// Convenience: solve at a single k and sum.
OpticalSumRule optical_sum_rule_residual(const MediumModel& model, double k, double gamma_scale);

}  // namespace diamag
