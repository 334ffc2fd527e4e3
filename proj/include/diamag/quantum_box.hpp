#pragma once

// Particle-in-a-box emitter: eigenstates of a centred rectangular box,
// transition frequencies, and the position/momentum matrix elements used by
// the multipole expansion. Natural units (hbar = c = eps0 = 1), with every
// length in 1/omega_p and the mass in omega_p.

#include <array>
#include <string_view>
#include <vector>

#include "diamag/tensor.hpp"

namespace diamag {

struct BoxGeometry {
  Eigen::Vector3d lengths;  ///< L_x, L_y, L_z
  double mass = 1.0;
  double charge = 1.0;

  BoxGeometry(double lx, double ly, double lz, double mass, double charge = 1.0);

  double length(int axis) const { return lengths[axis]; }
  bool operator==(const BoxGeometry&) const = default;
};

struct BoxState {
  std::array<int, 3> n{1, 1, 1};

  BoxState() = default;
  BoxState(int nx, int ny, int nz);

  int operator[](int axis) const { return n[static_cast<std::size_t>(axis)]; }
  auto operator<=>(const BoxState&) const = default;
};

/// One-dimensional operator strings, applied in written order with p acting
/// on everything to its right: px means p(x psi).
enum class Moment1D { overlap, x, x2, p, px, px2 };

Moment1D moment_kind_from_string(std::string_view name);
std::string_view to_string(Moment1D kind);

/// Transition moments between a ground state g and an excited state e.
/// Tensor slots follow the written operator order: pr(i, k) = (p_i r_k),
/// prr(i, k, m) = (p_i r_k r_m). The `_ge` members are <g|O|e>, the `_eg`
/// members <e|O|g>; both are computed directly, not by a phase rule.
struct MomentSet {
  double omega_eg = 0.0;

  Eigen::Vector3cd p_ge = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd r_ge = Eigen::Vector3cd::Zero();
  Eigen::Matrix3cd pr_ge = Eigen::Matrix3cd::Zero();
  Tensor3cd prr_ge;

  Eigen::Vector3cd p_eg = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd r_eg = Eigen::Vector3cd::Zero();
  Eigen::Matrix3cd pr_eg = Eigen::Matrix3cd::Zero();
  Tensor3cd prr_eg;

  MomentSet() {
    prr_ge.setZero();
    prr_eg.setZero();
  }

  bool all_zero() const;
};

struct GroundTensors {
  Eigen::Matrix3d rr_gg = Eigen::Matrix3d::Zero();  ///< (r_k r_m)^{gg}
  double r2 = 0.0;                                  ///< <r^2>
};

struct Transition {
  BoxState excited;
  MomentSet moments;
};

/// (pi^2 / 2m) * sum_a n_a^2 / L_a^2
double energy(const BoxState& state, const BoxGeometry& geom);

/// <n| op |n'> on a box of length L centred at the origin. Parity-forbidden
/// elements are returned as exact zeros.
Complex moment_1d(Moment1D kind, int n, int n_prime, double length);

MomentSet transition_moments(const BoxState& g, const BoxState& e, const BoxGeometry& geom);

GroundTensors ground_expectations(const BoxState& g, const BoxGeometry& geom);

/// All excited states e != g with quantum numbers <= n_max and at least one
/// non-zero moment, lexicographic in (n_x, n_y, n_z). g defaults to (1,1,1).
std::vector<Transition> enumerate_transitions(int n_max, const BoxGeometry& geom,
                                              const BoxState& ground = {});

}  // namespace diamag
