#include "diamag/polariton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace diamag {

namespace {

constexpr int kScanPoints = 512;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Brent's method on [a, b] with f(a) f(b) < 0.
std::optional<double> brent(const auto& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return std::nullopt;
}

// c in F ~ c / (p^2 - omega^2) near the pole p.
double pole_residue(const MediumModel& model, double p, double k) {
  double c = 0.0;
  for (const auto& t : model.transitions)
    if (std::abs(t.omega_eg - p) <= 1e-12 * p)
      c += p * p * t.d_edip + k * k * (t.d_mdip + (t.d_quad - t.d_dipoct) * p * p);
  return c;
}

double upper_bound(const MediumModel& model, double k, double last_pole) {
  double u = std::max({2.0 * last_pole, 2.0 * std::abs(k), 1.0});
  for (int i = 0; i < 80 && dispersion_function(model, u, k) <= 0.0; ++i) u *= 2.0;
  return u;
}

// Roots of F in the open interval (a, b); pole_a / pole_b mark which ends are
// poles. F is multiplied by the factors vanishing there, which keeps it
// continuous, so roots hugging a weak pole still show up as sign changes.
void interval_roots(const MediumModel& model, double k, double a, double b, bool pole_a, bool pole_b,
                    std::vector<double>& roots, std::vector<BracketFailure>& failures) {
  auto h = [&](double w) {
    double v = dispersion_function(model, w, k);
    if (pole_a) v *= w * w - a * a;
    if (pole_b) v *= b * b - w * w;
    return v;
  };
  const double width2 = b * b - a * a;
  std::vector<double> xs, hs;
  xs.push_back(a);
  hs.push_back(pole_a ? -pole_residue(model, a, k) * (pole_b ? width2 : 1.0) : h(a));
  for (int i = 0; i < kScanPoints; ++i) {
    const double s = (i + 0.5) / kScanPoints;
    xs.push_back(a + 0.5 * (b - a) * (1.0 - std::cos(kPi * s)));
    hs.push_back(h(xs.back()));
  }
  xs.push_back(b);
  hs.push_back(pole_b ? pole_residue(model, b, k) * (pole_a ? width2 : 1.0) : h(b));

  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (hs[i - 1] == 0.0 || (hs[i] != 0.0 && (hs[i] > 0.0) == (hs[i - 1] > 0.0))) continue;
    auto root = brent(h, xs[i - 1], xs[i], hs[i - 1], hs[i]);
    if (!root) {
      failures.push_back({k, xs[i - 1], xs[i], "bracket did not converge"});
      continue;
    }
    // Last-ulp polish: Brent stops within a few ulps of the sign change.
    for (int step = 0; step < 4; ++step) {
      const double up = std::nextafter(*root, b), down = std::nextafter(*root, a);
      const double here = std::abs(h(*root));
      if (up < b && std::abs(h(up)) < here) root = up;
      else if (down > a && std::abs(h(down)) < here) root = down;
      else break;
    }
    // Closer to the pole than one ulp: keep it just inside the interval.
    if (pole_a && *root <= a) root = std::nextafter(a, b);
    if (pole_b && *root >= b) root = std::nextafter(b, a);
    if (*root > 0.0) roots.push_back(*root);
  }
}

struct Intervals {
  std::vector<double> edges;
  std::size_t n_poles = 0;
  std::pair<double, double> bounds(std::size_t iv) const { return {edges[iv], edges[iv + 1]}; }
  bool pole_lo(std::size_t iv) const { return iv > 0; }
  bool pole_hi(std::size_t iv) const { return iv < n_poles; }
};

Intervals intervals(const MediumModel& model, const std::vector<double>& poles, double k) {
  Intervals iv;
  iv.n_poles = poles.size();
  iv.edges.push_back(0.0);
  iv.edges.insert(iv.edges.end(), poles.begin(), poles.end());
  iv.edges.push_back(upper_bound(model, k, poles.empty() ? 0.0 : poles.back()));
  return iv;
}

// Root in pole interval iv at wavevector k nearest to omega0; NaN if none.
double tracked_root(const MediumModel& model, const std::vector<double>& poles, std::size_t iv,
                    double k, double omega0) {
  const Intervals ivs = intervals(model, poles, k);
  const auto [a, b] = ivs.bounds(iv);
  std::vector<double> roots;
  std::vector<BracketFailure> failures;
  interval_roots(model, k, a, b, ivs.pole_lo(iv), ivs.pole_hi(iv), roots, failures);
  double best = kNaN;
  for (double w : roots)
    if (std::isnan(best) || std::abs(w - omega0) < std::abs(best - omega0)) best = w;
  return best;
}

// Five-point centred difference along the branch through omega in interval iv.
// The step stays well below the distance to the neighbouring roots so the
// stencil cannot jump across an anticrossing.
double group_velocity(const MediumModel& model, const std::vector<double>& poles, std::size_t iv,
                      double k, double omega, double gap) {
  // A power-of-two step keeps k +- h and k +- 2h exact in floating point.
  const double h = std::exp2(std::floor(std::log2(std::max(std::min(1e-3 * std::max(k, 1e-3), 0.01 * gap), 1e-7 * k))));
  const double wp1 = tracked_root(model, poles, iv, k + h, omega);
  const double wm1 = tracked_root(model, poles, iv, k - h, omega);
  const double wp2 = tracked_root(model, poles, iv, k + 2 * h, omega);
  const double wm2 = tracked_root(model, poles, iv, k - 2 * h, omega);
  return (8.0 * (wp1 - wm1) - (wp2 - wm2)) / (12.0 * h);
}

}  // namespace

MediumModel scaled_linewidths(const MediumModel& model, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("linewidth scale must be finite and non-negative");
  MediumModel m = model;
  for (auto& t : m.transitions) t.gamma_e *= scale;
  return m;
}

std::vector<double> lossless_poles(const MediumModel& model) {
  std::vector<double> poles;
  for (const auto& t : model.transitions) {
    if (t.d_edip == 0.0 && t.d_mdip == 0.0 && t.d_quad == 0.0 && t.d_dipoct == 0.0) continue;
    poles.push_back(t.omega_eg);
  }
  std::sort(poles.begin(), poles.end());
  std::vector<double> distinct;
  for (double p : poles)
    if (distinct.empty() || p - distinct.back() > 1e-12 * p) distinct.push_back(p);
  return distinct;
}

double dispersion_function(const MediumModel& model, double omega, double k) {
  const double w2 = omega * omega;
  double eps = 1.0, inv_mu = 1.0;
  for (const auto& t : model.transitions) {
    const double d = t.omega_eg * t.omega_eg - w2;
    eps += t.d_edip / d;
    inv_mu += t.d_dia / (t.omega_eg * t.omega_eg) - t.d_mdip / d - t.d_quad * w2 / d +
              t.d_dipoct * w2 / d;
  }
  return w2 * eps - k * k * inv_mu;
}

LosslessRoots lossless_roots(const MediumModel& model, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("wavevector must be positive and finite");
  LosslessRoots out;
  out.k = k;
  const std::vector<double> poles = lossless_poles(model);
  out.expected = poles.size() + 1;
  const Intervals ivs = intervals(model, poles, k);
  for (std::size_t iv = 0; iv + 1 < ivs.edges.size(); ++iv) {
    const auto [a, b] = ivs.bounds(iv);
    interval_roots(model, k, a, b, ivs.pole_lo(iv), ivs.pole_hi(iv), out.omegas, out.failures);
  }
  std::sort(out.omegas.begin(), out.omegas.end());
  if (out.failures.empty() && out.omegas.size() != out.expected)
    out.failures.push_back({k, 0.0, ivs.edges.back(),
                            "found " + std::to_string(out.omegas.size()) + " roots, expected " +
                                std::to_string(out.expected)});
  return out;
}

BranchSet solve_branches(const MediumModel& model, const std::vector<double>& k_grid,
                         double gamma_scale) {
  if (!(gamma_scale >= 0.0 && gamma_scale <= 1.0))
    throw std::invalid_argument("gamma_scale must lie in [0, 1]");
  for (double k : k_grid)
    if (!(k > 0.0)) throw std::invalid_argument("polariton wavevectors must be positive");

  const MediumModel lossless = scaled_linewidths(model, 0.0);
  const MediumModel damped = scaled_linewidths(model, gamma_scale);
  const std::vector<double> poles = lossless_poles(lossless);
  const std::size_t nk = k_grid.size();

  BranchSet set;
  std::vector<double> last;  // last known omega per branch
  auto new_branch = [&]() {
    DispersionBranch b;
    b.k_grid = k_grid;
    b.omega.assign(nk, kNaN);
    b.v_p.assign(nk, kNaN);
    b.v_g.assign(nk, kNaN);
    b.mu.assign(nk, Complex{kNaN, kNaN});
    set.branches.push_back(std::move(b));
    last.push_back(kNaN);
  };

  for (std::size_t ik = 0; ik < nk; ++ik) {
    const double k = k_grid[ik];
    const LosslessRoots roots = lossless_roots(lossless, k);
    set.complete.push_back(roots.complete());
    set.failures.insert(set.failures.end(), roots.failures.begin(), roots.failures.end());

    // Same count as before: labels follow ascending order. Otherwise match by
    // minimum distance to the previous frequencies.
    std::vector<std::size_t> label(roots.omegas.size());
    if (ik == 0 || roots.omegas.size() == set.branches.size()) {
      while (set.branches.size() < roots.omegas.size()) new_branch();
      for (std::size_t j = 0; j < roots.omegas.size(); ++j) label[j] = j;
    } else {
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t j = 0; j < roots.omegas.size(); ++j)
        for (std::size_t b = 0; b < last.size(); ++b)
          if (!std::isnan(last[b])) pairs.emplace_back(std::abs(roots.omegas[j] - last[b]), j, b);
      std::sort(pairs.begin(), pairs.end());
      std::vector<bool> root_used(roots.omegas.size(), false), branch_used(last.size(), false);
      for (const auto& [dist, j, b] : pairs) {
        if (root_used[j] || branch_used[b]) continue;
        root_used[j] = branch_used[b] = true;
        label[j] = b;
      }
      for (std::size_t j = 0; j < roots.omegas.size(); ++j)
        if (!root_used[j]) {
          new_branch();
          label[j] = set.branches.size() - 1;
        }
    }

    for (std::size_t j = 0; j < roots.omegas.size(); ++j) {
      const double w = roots.omegas[j];
      const std::size_t iv = std::upper_bound(poles.begin(), poles.end(), w) - poles.begin();
      double gap = std::numeric_limits<double>::infinity();
      if (j > 0) gap = w - roots.omegas[j - 1];
      if (j + 1 < roots.omegas.size()) gap = std::min(gap, roots.omegas[j + 1] - w);
      DispersionBranch& br = set.branches[label[j]];
      br.omega[ik] = w;
      br.v_p[ik] = w / k;
      br.v_g[ik] = group_velocity(lossless, poles, iv, k, w, gap);
      br.mu[ik] = mu(damped, w).value;
      last[label[j]] = w;
    }
  }
  return set;
}

OpticalSumRule optical_sum_rule_residual(const BranchSet& set, std::size_t k_index) {
  if (k_index >= set.complete.size()) throw std::out_of_range("optical_sum_rule_residual: k index");
  OpticalSumRule r;
  r.reliable = set.complete[k_index];
  double sum = 0.0;
  for (const auto& b : set.branches) {
    if (std::isnan(b.omega[k_index])) continue;
    sum += (b.mu[k_index] * b.v_p[k_index] * b.v_g[k_index]).real();
  }
  r.residual = sum - 1.0;
  return r;
}

OpticalSumRule optical_sum_rule_residual(const MediumModel& model, double k, double gamma_scale) {
  return optical_sum_rule_residual(solve_branches(model, {k}, gamma_scale), 0);
}

}  // namespace diamag
