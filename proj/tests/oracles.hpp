#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <algorithm>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <unsupported/Eigen/Polynomials>

#include "diamag/multipole.hpp"
#include "diamag/polariton.hpp"

namespace oracle {

using diamag::Complex;
using diamag::kPi;

// Adaptive Gauss-Kronrod 7-15 on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                        int depth = 0) {
  static constexpr double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                                   0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                                   0.207784955007898468, 0.0};
  static constexpr double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                                   0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                                   0.204432940075298892, 0.209482141084727828};
  static constexpr double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                                   0.417959183673469388};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kron = wk[7] * f(c), gauss = wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  if (std::abs(kron - gauss) <= tol * std::max(1.0, std::abs(kron)) || depth > 40) return kron;
  return integrate(f, a, c, tol, depth + 1) + integrate(f, c, b, tol, depth + 1);
}

// Box eigenfunction on [-L/2, L/2] and its first two derivatives.
inline double psi(int n, double L, double x) {
  return std::sqrt(2.0 / L) * std::sin(n * kPi * (x + 0.5 * L) / L);
}
inline double dpsi(int n, double L, double x) {
  return std::sqrt(2.0 / L) * (n * kPi / L) * std::cos(n * kPi * (x + 0.5 * L) / L);
}

// <n| op |n'> by quadrature, p = -i d/dx acting on x^power psi_n'.
inline Complex moment(diamag::Moment1D kind, int n, int np, double L) {
  using diamag::Moment1D;
  int power = 0;
  bool has_p = false;
  switch (kind) {
    case Moment1D::overlap: break;
    case Moment1D::x: power = 1; break;
    case Moment1D::x2: power = 2; break;
    case Moment1D::p: has_p = true; break;
    case Moment1D::px: has_p = true; power = 1; break;
    case Moment1D::px2: has_p = true; power = 2; break;
  }
  const double a = -0.5 * L, b = 0.5 * L;
  if (!has_p)
    return integrate([&](double x) { return psi(n, L, x) * std::pow(x, power) * psi(np, L, x); }, a, b);
  // d/dx (x^k psi) = k x^(k-1) psi + x^k psi'
  const double v = integrate(
      [&](double x) {
        const double d = (power > 0 ? power * std::pow(x, power - 1) * psi(np, L, x) : 0.0) +
                         std::pow(x, power) * dpsi(np, L, x);
        return psi(n, L, x) * d;
      },
      a, b);
  return Complex{0.0, -v};
}

inline Eigen::Matrix3d random_rotation(std::mt19937& rng) {
  // Eigen's UnitRandom draws from the global rand(); seed a quaternion here instead.
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

template <typename Scalar>
diamag::Tensor4<Scalar> rotate(const diamag::Tensor4<Scalar>& f, const Eigen::Matrix3d& R) {
  diamag::Tensor4<Scalar> out;
  out.setZero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
          Scalar s{};
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) s += R(i, a) * R(k, b) * R(m, c) * R(j, d) * f(a, b, c, d);
          out(i, k, m, j) = s;
        }
  return out;
}

inline diamag::Tensor4d random_tensor(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  diamag::Tensor4d f;
  for (Eigen::Index n = 0; n < 81; ++n) f.data()[n] = u(rng);
  return f;
}

// Full isotropic average: sum_{abcd} I4_{ikmj,abcd} f_abcd with I4 built from
// the delta products, no shortcut through pair contractions.
inline diamag::Tensor4d isotropic_average(const diamag::Tensor4d& f) {
  auto d = diamag::kronecker;
  auto basis = [&](int which, int i, int k, int m, int j) {
    switch (which) {
      case 0: return d(i, k) * d(m, j);
      case 1: return d(i, m) * d(k, j);
      default: return d(i, j) * d(k, m);
    }
  };
  static constexpr double w[3][3] = {{4, -1, -1}, {-1, 4, -1}, {-1, -1, 4}};
  diamag::Tensor4d out;
  out.setZero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              for (int c = 0; c < 3; ++c)
                for (int e = 0; e < 3; ++e)
                  for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q)
                      out(i, k, m, j) += w[p][q] / 30.0 * basis(p, i, k, m, j) * basis(q, a, b, c, e) *
                                         f(a, b, c, e);
  return out;
}

inline diamag::Tensor4d delta_product(int which) {
  diamag::Tensor4d t;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
          auto d = diamag::kronecker;
          t(i, k, m, j) = which == 0 ? d(i, k) * d(m, j) : which == 1 ? d(i, m) * d(k, j) : d(i, j) * d(k, m);
        }
  return t;
}

// Positive roots of F on (0, omega_max] by a dense uniform sign scan of
// F times all pole factors (a polynomial-like, continuous function). The grid
// is offset by an irrational fraction so no sample lands on a pole.
inline std::vector<double> sign_scan_roots(const diamag::MediumModel& model, double k, double omega_max,
                                           int n) {
  const std::vector<double> poles = diamag::lossless_poles(model);
  auto g = [&](double w) {
    long double v = diamag::dispersion_function(model, w, k);
    for (double p : poles) v *= (long double)p * p - (long double)w * w;
    return v;
  };
  std::vector<double> roots;
  constexpr double shift = 0.3819660112501051;
  double x0 = omega_max * (1 - shift) / n;
  long double g0 = g(x0);
  for (int i = 2; i <= n; ++i) {
    const double x1 = omega_max * (i - shift) / n;
    const long double g1 = g(x1);
    if ((g0 > 0) != (g1 > 0)) {
      double lo = x0, hi = x1;
      long double glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const long double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

// Positive roots via the companion matrix: with s = omega^2 and one factor
// (w_e^2 - s) per transition, F times the factors is a polynomial in s.
inline std::vector<double> companion_roots(const diamag::MediumModel& model, double k) {
  using Poly = std::vector<double>;  // ascending powers of s
  auto mul = [](const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  auto add = [](Poly a, const Poly& b, double scale) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
    return a;
  };
  const auto& ts = model.transitions;
  auto product_except = [&](std::size_t skip) {
    Poly p{1.0};
    for (std::size_t e = 0; e < ts.size(); ++e)
      if (e != skip) p = mul(p, {ts[e].omega_eg * ts[e].omega_eg, -1.0});
    return p;
  };
  const Poly all = product_except(ts.size());
  // s eps P - k^2 (1/mu) P
  Poly g = mul({0.0, 1.0}, all);
  g = add(g, all, -k * k);
  for (std::size_t e = 0; e < ts.size(); ++e) {
    const auto& t = ts[e];
    const Poly rest = product_except(e);
    g = add(g, mul({0.0, 1.0}, rest), t.d_edip);
    g = add(g, all, -k * k * t.d_dia / (t.omega_eg * t.omega_eg));
    g = add(g, rest, k * k * t.d_mdip);
    g = add(g, mul({0.0, 1.0}, rest), k * k * (t.d_quad - t.d_dipoct));
  }
  while (g.size() > 1 && g.back() == 0.0) g.pop_back();
  Eigen::VectorXd coeffs = Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
  std::vector<double> out;
  for (const auto& r : solver.roots())
    if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r)) && r.real() > 0.0)
      out.push_back(std::sqrt(r.real()));
  std::sort(out.begin(), out.end());
  return out;
}

// Phenomenological model used by the paper-style figures: three resonances,
// sum-rule closed.
inline diamag::MediumModel three_resonance_model() {
  diamag::MediumModel m;
  m.transitions = {{2, 0, 0, 0, 65.0 / 64, 1, 0.18}, {0, 0, 1.0 / 16, 0, 0, 2, 0.05},
                   {0, 1.0 / 64, 0, 9, 0, 3, 0.04}};
  return m;
}

}  // namespace oracle
