#include "diamag/quantum_box.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace diamag {

namespace {

constexpr int kKinds = 6;

Moment1D kind_of(bool has_p, int power) {
  static constexpr Moment1D table[2][3] = {{Moment1D::overlap, Moment1D::x, Moment1D::x2},
                                           {Moment1D::p, Moment1D::px, Moment1D::px2}};
  return table[has_p ? 1 : 0][power];
}

// Integrals over u in [0, L] of u^k cos(a pi u / L) and u^k sin(a pi u / L).
double int_cos(int k, int a, double L) {
  if (a == 0) return std::pow(L, k + 1) / (k + 1);
  const double b = a * kPi / L;
  const double s = (a % 2 == 0) ? 1.0 : -1.0;
  switch (k) {
    case 0: return 0.0;
    case 1: return (s - 1.0) / (b * b);
    case 2: return 2.0 * L * s / (b * b);
  }
  throw std::logic_error("int_cos: power out of range");
}

double int_sin(int k, int a, double L) {
  if (a == 0) return 0.0;
  const double b = a * kPi / L;
  const double s = (a % 2 == 0) ? 1.0 : -1.0;
  switch (k) {
    case 0: return (1.0 - s) / b;
    case 1: return -L * s / b;
    case 2: return -L * L * s / b + 2.0 * (s - 1.0) / (b * b * b);
  }
  throw std::logic_error("int_sin: power out of range");
}

double binomial(int k, int j) { return (k == 2 && j == 1) ? 2.0 : 1.0; }

// <n| x^k |n'> with x = u - L/2.
double position_power(int k, int n, int np, double L) {
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double shift = binomial(k, j) * std::pow(-0.5 * L, k - j);
    sum += shift * (int_cos(j, n - np, L) - int_cos(j, n + np, L));
  }
  return sum / L;
}

// Integral of psi_n x^k d/dx psi_n'.
double derivative_power(int k, int n, int np, double L) {
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double shift = binomial(k, j) * std::pow(-0.5 * L, k - j);
    sum += shift * (int_sin(j, n + np, L) + int_sin(j, n - np, L));
  }
  return sum * np * kPi / (L * L);
}

int state_parity(int n) { return (n % 2 == 1) ? 1 : -1; }

int operator_parity(Moment1D kind) {
  switch (kind) {
    case Moment1D::overlap:
    case Moment1D::x2:
    case Moment1D::px:
      return 1;
    case Moment1D::x:
    case Moment1D::p:
    case Moment1D::px2:
      return -1;
  }
  return 1;
}

using AxisTable = std::array<std::array<Complex, kKinds>, 3>;

AxisTable axis_table(const BoxState& bra, const BoxState& ket, const BoxGeometry& geom) {
  AxisTable t{};
  for (int a = 0; a < 3; ++a)
    for (int kind = 0; kind < kKinds; ++kind)
      t[a][kind] = moment_1d(static_cast<Moment1D>(kind), bra[a], ket[a], geom.length(a));
  return t;
}

// Product over axes of 1D elements for the operator p_i * prod_a r_a^{power[a]}.
Complex separable(const AxisTable& t, int p_axis, const std::array<int, 3>& power) {
  Complex v{1.0, 0.0};
  for (int a = 0; a < 3; ++a) v *= t[a][static_cast<int>(kind_of(a == p_axis, power[a]))];
  return v;
}

void fill(const AxisTable& t, Eigen::Vector3cd& p, Eigen::Vector3cd& r, Eigen::Matrix3cd& pr,
          Tensor3cd& prr) {
  for (int i = 0; i < 3; ++i) {
    p[i] = separable(t, i, {0, 0, 0});
    std::array<int, 3> pw{0, 0, 0};
    pw[i] = 1;
    r[i] = separable(t, -1, pw);
    for (int k = 0; k < 3; ++k) {
      std::array<int, 3> c{0, 0, 0};
      ++c[k];
      pr(i, k) = separable(t, i, c);
      for (int m = 0; m < 3; ++m) {
        std::array<int, 3> cc = c;
        ++cc[m];
        prr(i, k, m) = separable(t, i, cc);
      }
    }
  }
}

}  // namespace

BoxGeometry::BoxGeometry(double lx, double ly, double lz, double m, double q)
    : lengths(lx, ly, lz), mass(m), charge(q) {
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0)) throw std::invalid_argument("box lengths must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("box mass must be positive");
}

BoxState::BoxState(int nx, int ny, int nz) : n{nx, ny, nz} {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("box quantum numbers must be >= 1");
}

Moment1D moment_kind_from_string(std::string_view name) {
  for (int k = 0; k < kKinds; ++k)
    if (to_string(static_cast<Moment1D>(k)) == name) return static_cast<Moment1D>(k);
  throw std::invalid_argument("unknown 1D moment kind '" + std::string(name) + "'");
}

std::string_view to_string(Moment1D kind) {
  switch (kind) {
    case Moment1D::overlap: return "overlap";
    case Moment1D::x: return "x";
    case Moment1D::x2: return "x2";
    case Moment1D::p: return "p";
    case Moment1D::px: return "px";
    case Moment1D::px2: return "px2";
  }
  return "?";
}

bool MomentSet::all_zero() const {
  auto zero3 = [](const Tensor3cd& t) { return max_abs(t) == 0.0; };
  return p_ge.isZero(0.0) && pr_ge.isZero(0.0) && zero3(prr_ge) && p_eg.isZero(0.0) &&
         pr_eg.isZero(0.0) && zero3(prr_eg);
}

double energy(const BoxState& state, const BoxGeometry& geom) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += std::pow(state[a] / geom.length(a), 2);
  return kPi * kPi / (2.0 * geom.mass) * s;
}

Complex moment_1d(Moment1D kind, int n, int np, double L) {
  if (n < 1 || np < 1) throw std::invalid_argument("moment_1d: quantum numbers must be >= 1");
  if (!(L > 0.0)) throw std::invalid_argument("moment_1d: length must be positive");
  if (state_parity(n) * state_parity(np) * operator_parity(kind) < 0) return {0.0, 0.0};

  switch (kind) {
    case Moment1D::overlap: return {n == np ? 1.0 : 0.0, 0.0};
    case Moment1D::x: return {position_power(1, n, np, L), 0.0};
    case Moment1D::x2: return {position_power(2, n, np, L), 0.0};
    // p x^k psi = -i [k x^{k-1} psi + x^k psi']
    case Moment1D::p: return {0.0, -derivative_power(0, n, np, L)};
    case Moment1D::px:
      return {0.0, -((n == np ? 1.0 : 0.0) + derivative_power(1, n, np, L))};
    case Moment1D::px2:
      return {0.0, -(2.0 * position_power(1, n, np, L) + derivative_power(2, n, np, L))};
  }
  throw std::invalid_argument("moment_1d: unknown kind");
}

MomentSet transition_moments(const BoxState& g, const BoxState& e, const BoxGeometry& geom) {
  if (g == e) throw std::invalid_argument("transition_moments: ground and excited state coincide");
  MomentSet ms;
  ms.omega_eg = energy(e, geom) - energy(g, geom);
  fill(axis_table(g, e, geom), ms.p_ge, ms.r_ge, ms.pr_ge, ms.prr_ge);
  fill(axis_table(e, g, geom), ms.p_eg, ms.r_eg, ms.pr_eg, ms.prr_eg);
  return ms;
}

GroundTensors ground_expectations(const BoxState& g, const BoxGeometry& geom) {
  const AxisTable t = axis_table(g, g, geom);
  GroundTensors gt;
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      std::array<int, 3> pw{0, 0, 0};
      ++pw[k];
      ++pw[m];
      gt.rr_gg(k, m) = separable(t, -1, pw).real();
    }
  gt.r2 = gt.rr_gg.trace();
  return gt;
}

std::vector<Transition> enumerate_transitions(int n_max, const BoxGeometry& geom,
                                              const BoxState& ground) {
  if (n_max < 2) throw std::invalid_argument("enumerate_transitions: n_max must be >= 2");
  std::vector<Transition> out;
  for (int nx = 1; nx <= n_max; ++nx)
    for (int ny = 1; ny <= n_max; ++ny)
      for (int nz = 1; nz <= n_max; ++nz) {
        const BoxState e(nx, ny, nz);
        if (e == ground) continue;
        MomentSet ms = transition_moments(ground, e, geom);
        if (!ms.all_zero()) out.push_back({e, std::move(ms)});
      }
  return out;
}

}  // namespace diamag
