#include "diamag/causality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace diamag {

namespace {

constexpr int kMinPoints = 64;
constexpr int kMaxTailExponent = 8;

// P int_{x_0}^{x_N} f(x) / (x - s) dx for f linear on each panel.
double pv_linear(const Eigen::ArrayXd& x, const Eigen::ArrayXd& f, double s) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i], b = x[i + 1];
    const double beta = (f[i + 1] - f[i]) / (b - a);
    const double fs = f[i] + beta * (s - a);
    double log_ratio;
    if (a == s)
      log_ratio = std::log(std::abs(b - s));
    else if (b == s)
      log_ratio = -std::log(std::abs(a - s));
    else if ((a - s) * (b - s) > 0.0)
      log_ratio = std::log1p((b - a) / (a - s));
    else
      log_ratio = std::log(std::abs(b - s)) - std::log(std::abs(a - s));
    sum += beta * (b - a) + fs * log_ratio;
  }
  return sum;
}

// P int_W^inf C w^-p / (w - s) dw
double tail_integral(const PowerTail& tail, double W, double s) {
  if (tail.coefficient == 0.0) return 0.0;
  const int p = tail.exponent;
  double v = 0.0;
  if (std::abs(s) < 0.5 * W) {
    double term_scale = std::pow(W, -p);
    const double ratio = s / W;
    for (int n = 0; n < 400; ++n) {
      const double term = term_scale / (p + n);
      v += term;
      if (std::abs(term) <= 1e-17 * std::abs(v)) break;
      term_scale *= ratio;
    }
  } else {
    const double log_term = (s == W) ? std::log(W) : std::log(W / std::abs(W - s));
    v = std::pow(s, -p) * log_term;
    for (int j = 2; j <= p; ++j) v -= std::pow(s, -(p - j + 1)) * std::pow(W, 1 - j) / (j - 1);
  }
  return tail.coefficient * v;
}

// Grid and component values with omega = 0 prepended using the parity of f.
struct Folded {
  Eigen::ArrayXd x, f;
};

Folded fold(const Eigen::ArrayXd& x, const Eigen::ArrayXd& f, bool odd) {
  if (x[0] == 0.0) return {x, f};
  Folded out{Eigen::ArrayXd(x.size() + 1), Eigen::ArrayXd(x.size() + 1)};
  out.x << 0.0, x;
  out.f << (odd ? 0.0 : f[0]), f;
  return out;
}

double principal_integral(const Folded& d, const PowerTail& tail, double s) {
  return pv_linear(d.x, d.f, s) + tail_integral(tail, d.x[d.x.size() - 1], s);
}

void require_decay(const PowerTail& tail, const char* part) {
  if (tail.exponent < 1)
    throw std::invalid_argument(std::string("tail of ") + part +
                                " part must decay at least as 1/omega");
}

// Lower-half-plane roots of the resonance denominator, D = -(w - a)(w - b).
std::pair<Complex, Complex> denominator_roots(const MediumModel& model,
                                              const TransitionStrengths& t) {
  const double w = t.omega_eg, g = t.gamma_e;
  if (model.damping == DampingForm::appendix) return {Complex{w, -g}, Complex{-w, -g}};
  const Complex root = std::sqrt(Complex{w * w - g * g, 0.0});
  return {root - Complex{0.0, g}, -root - Complex{0.0, g}};
}

// Im int_W^inf chi(w) / w dw, term by term in closed form.
double static_tail(const MediumModel& model, double W) {
  double total = 0.0;
  for (const auto& t : model.transitions) {
    const auto [a, b] = denominator_roots(model, t);
    const Complex la = std::log(W - a), lb = std::log(W - b);
    // int 1 / (w D)
    const Complex A = 1.0 / (a * b), B = 1.0 / (a * (a - b)), C = 1.0 / (b * (b - a));
    const Complex inv = A * std::log(W) + B * la + C * lb;
    // int w / D, imaginary part only
    const Complex Bp = a / (a - b), Cp = b / (b - a);
    const Complex lin = Bp * la + Cp * lb;
    total += t.d_mdip * inv.imag() + (t.d_quad - t.d_dipoct) * lin.imag();
  }
  return total;
}

}  // namespace

PowerTail fit_power_tail(const Eigen::ArrayXd& omegas, const Eigen::ArrayXd& values) {
  const Eigen::Index n = omegas.size();
  if (n < 2 || values.size() != n) throw std::invalid_argument("fit_power_tail: need >= 2 samples");
  const double W = omegas[n - 1];
  const double f_last = values[n - 1];
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (std::abs(omegas[i] - 0.7 * W) < std::abs(omegas[j] - 0.7 * W)) j = i;
  const double f_ref = values[j];

  if (f_last == 0.0) return {f_ref == 0.0 ? 2 : kMaxTailExponent, 0.0};
  if (f_ref == 0.0 || omegas[j] <= 0.0) return {0, f_last};
  const double raw = std::log(std::abs(f_ref / f_last)) / std::log(W / omegas[j]);
  const int p = std::clamp(static_cast<int>(std::lround(raw)), -kMaxTailExponent, kMaxTailExponent);
  return {p, f_last * std::pow(W, p)};
}

TabulatedResponse TabulatedResponse::from_samples(Eigen::ArrayXd omegas, Eigen::ArrayXcd values) {
  TabulatedResponse t;
  t.omegas = std::move(omegas);
  t.values = std::move(values);
  if (t.omegas.size() != t.values.size())
    throw std::invalid_argument("tabulated response: grid and values differ in length");
  if (t.omegas.size() >= 2) {
    t.re_tail = fit_power_tail(t.omegas, t.values.real());
    t.im_tail = fit_power_tail(t.omegas, t.values.imag());
  }
  t.validate();
  return t;
}

void TabulatedResponse::validate() const {
  const Eigen::Index n = omegas.size();
  if (n < kMinPoints) throw std::invalid_argument("tabulated response needs at least 64 points");
  if (values.size() != n) throw std::invalid_argument("tabulated response: grid and values differ in length");
  if (!(omegas[0] >= 0.0)) throw std::invalid_argument("tabulated response grid must start at omega >= 0");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(omegas[i + 1] > omegas[i]))
      throw std::invalid_argument("tabulated response grid must be strictly increasing");
  if (!values.allFinite()) throw std::invalid_argument("tabulated response has non-finite values");

  const double W = omegas[n - 1];
  auto consistent = [W](const PowerTail& t, double last) {
    const double predicted = t.coefficient * std::pow(W, -t.exponent);
    return std::abs(predicted - last) <= 1e-6 * std::abs(last) + 1e-300;
  };
  if (!consistent(re_tail, values[n - 1].real()) || !consistent(im_tail, values[n - 1].imag()))
    throw std::invalid_argument("tabulated response tail does not match the last sample");
}

double kk_real_at(const TabulatedResponse& tab, double omega) {
  require_decay(tab.im_tail, "imaginary");
  const Folded d = fold(tab.omegas, tab.values.imag(), true);
  return (principal_integral(d, tab.im_tail, omega) + principal_integral(d, tab.im_tail, -omega)) /
         kPi;
}

double kk_imag_at(const TabulatedResponse& tab, double omega) {
  require_decay(tab.re_tail, "real");
  if (omega == 0.0) return 0.0;
  const Folded d = fold(tab.omegas, tab.values.real(), false);
  return -(principal_integral(d, tab.re_tail, omega) - principal_integral(d, tab.re_tail, -omega)) /
         kPi;
}

TabulatedResponse kk_real_from_imag(const TabulatedResponse& tab) {
  tab.validate();
  require_decay(tab.im_tail, "imaginary");
  Eigen::ArrayXcd out(tab.values.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = {kk_real_at(tab, tab.omegas[i]), tab.values[i].imag()};
  TabulatedResponse r = TabulatedResponse::from_samples(tab.omegas, std::move(out));
  r.im_tail = tab.im_tail;
  return r;
}

TabulatedResponse kk_imag_from_real(const TabulatedResponse& tab) {
  tab.validate();
  require_decay(tab.re_tail, "real");
  Eigen::ArrayXcd out(tab.values.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = {tab.values[i].real(), kk_imag_at(tab, tab.omegas[i])};
  TabulatedResponse r = TabulatedResponse::from_samples(tab.omegas, std::move(out));
  r.re_tail = tab.re_tail;
  return r;
}

Eigen::ArrayXd refined_grid(const MediumModel& model, double omega_max, int n_points) {
  if (!(omega_max > 0.0)) throw std::invalid_argument("refined_grid: omega_max must be positive");
  if (n_points < kMinPoints) throw std::invalid_argument("refined_grid: need at least 64 points");

  std::vector<std::pair<double, double>> resonances;
  for (const auto& t : model.transitions) {
    if (!(t.gamma_e > 0.0) || t.omega_eg >= omega_max) continue;
    const bool seen = std::any_of(resonances.begin(), resonances.end(), [&](const auto& r) {
      return std::abs(r.first - t.omega_eg) <= 1e-12 * t.omega_eg && r.second == t.gamma_e;
    });
    if (!seen) resonances.emplace_back(t.omega_eg, t.gamma_e);
  }

  const int n_uniform = resonances.empty() ? n_points : n_points / 2;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_uniform; ++i) pts.push_back(omega_max * i / (n_uniform - 1));
  if (!resonances.empty()) {
    const int per = std::max(1, (n_points - n_uniform) / static_cast<int>(resonances.size()));
    for (const auto& [w, g] : resonances)
      for (int j = 0; j < per; ++j) {
        const double theta = -0.5 * kPi + kPi * (j + 0.5) / per;
        const double x = w + g * std::tan(theta);
        if (x > 0.0 && x < omega_max) pts.push_back(x);
      }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> unique;
  unique.reserve(pts.size());
  for (double x : pts)
    if (unique.empty() || x - unique.back() > 1e-12 * omega_max) unique.push_back(x);
  unique.back() = omega_max;
  return Eigen::Map<const Eigen::ArrayXd>(unique.data(), static_cast<Eigen::Index>(unique.size()));
}

TabulatedResponse tabulate_chi(const MediumModel& model, const Eigen::ArrayXd& grid) {
  Eigen::ArrayXcd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = chi(model, grid[i]);
  return TabulatedResponse::from_samples(grid, std::move(v));
}

double mu_sum_rule_residual(const MediumModel& model) {
  double r = 0.0;
  for (const auto& t : model.transitions)
    r += t.d_dia / (t.omega_eg * t.omega_eg) + t.d_quad - t.d_dipoct;
  return r;
}

double chi_asymptote(const MediumModel& model) { return -mu_sum_rule_residual(model); }

double chi_jump(const MediumModel& model) {
  double b = 0.0;
  for (const auto& t : model.transitions) b += 2.0 * (t.d_quad - t.d_dipoct) * t.gamma_e;
  return b;
}

StaticIdentity kk_static_identity(const MediumModel& model, double omega_max, int n_points) {
  const Eigen::ArrayXd grid = refined_grid(model, omega_max, n_points);
  Eigen::ArrayXd g(grid.size());
  const double h = 1e-6 * grid[1];
  g[0] = chi(model, h).imag() / h;
  for (Eigen::Index i = 1; i < grid.size(); ++i) g[i] = chi(model, grid[i]).imag() / grid[i];

  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
    integral += 0.5 * (g[i] + g[i + 1]) * (grid[i + 1] - grid[i]);
  integral += static_tail(model, omega_max);

  StaticIdentity s;
  s.lhs = chi(model, 0.0).real();
  s.asymptote = chi_asymptote(model);
  s.rhs = 2.0 / kPi * integral;
  const double target = s.lhs - s.asymptote;
  const double scale = std::abs(target) > 0.0 ? std::abs(target) : 1.0;
  s.residual = std::abs(s.rhs - target) / scale;
  if (std::abs(s.asymptote) > 1e-9 * std::max(1.0, std::abs(s.lhs))) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "model is not sum-rule closed: chi(inf) = %.3e, compared against chi(0) - chi(inf)",
                  s.asymptote);
    s.warning = buf;
  }
  return s;
}

PassivityReport passivity_scan(const MediumModel& model, const Eigen::ArrayXd& grid) {
  PassivityReport rep;
  auto im_mu = [&](double w) { return mu(model, w).value.imag(); };

  auto bisect = [&](double lo, double hi) {
    // im_mu(lo) and im_mu(hi) straddle zero; returns the crossing.
    const bool lo_neg = im_mu(lo) < 0.0;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      if ((im_mu(mid) < 0.0) == lo_neg)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  bool first = true;
  bool in_negative = false;
  double start = 0.0, prev = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double w = grid[i];
    if (!(w > 0.0)) continue;
    const ResponseSample s = sample(model, w);
    const double m = s.mu.imag();
    const double em = s.epsmu.imag();
    if (first || em < rep.min_im_epsmu) {
      rep.min_im_epsmu = em;
      rep.min_im_epsmu_at = w;
    }
    if (first || m < rep.min_im_mu) {
      rep.min_im_mu = m;
      rep.min_im_mu_at = w;
    }
    const bool neg = m < 0.0;
    if (first) {
      if (neg) start = w;
    } else if (neg && !in_negative) {
      start = bisect(prev, w);
    } else if (!neg && in_negative) {
      rep.negative_im_mu_intervals.emplace_back(start, bisect(prev, w));
    }
    in_negative = neg;
    prev = w;
    first = false;
  }
  if (in_negative) rep.negative_im_mu_intervals.emplace_back(start, prev);
  rep.kk_static_residual = kk_static_identity(model).residual;
  return rep;
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXcd> chi_time_series(const MediumModel& model,
                                                           const TimeDomainSpec& spec) {
  const int N = spec.n_points;
  const double W = spec.half_width;
  if (N < kMinPoints || N % 2 != 0) throw std::invalid_argument("time domain grid must be even and >= 64");
  if (!(W > 0.0)) throw std::invalid_argument("time domain half width must be positive");

  const double asymptote = chi_asymptote(model);
  const double scale = std::max(1.0, std::abs(chi(model, 0.0)));
  if (!spec.subtract_asymptote && std::abs(asymptote) > 1e-9 * scale)
    throw std::invalid_argument("chi does not decay at high frequency; its transform does not exist");
  const double offset = spec.subtract_asymptote ? asymptote : 0.0;

  // chi ~ i b / omega at high frequency: a step of height b in chi(t) at t = 0,
  // carried by b exp(-t) theta(t) so the transformed remainder has no jump.
  const double b = spec.analytic_jump ? chi_jump(model) : 0.0;
  constexpr double kJumpDecay = 1.0;

  const double dw = 2.0 * W / N;
  std::vector<Complex> in(static_cast<std::size_t>(N)), out;
  for (int k = 0; k < N; ++k) {
    const double w = -W + k * dw;
    Complex v = chi(model, w) - offset - Complex{0.0, b} / Complex{w, kJumpDecay};
    if (spec.hann_window) v *= std::pow(std::cos(0.5 * kPi * w / W), 2);
    in[static_cast<std::size_t>(k)] = v;
  }
  Eigen::FFT<double> fft;
  fft.fwd(out, in);

  const double dt = 2.0 * kPi / (N * dw);
  Eigen::ArrayXd t(N);
  Eigen::ArrayXcd x(N);
  for (int j = 0; j < N; ++j) {
    const double tj = (j < N / 2 ? j : j - N) * dt;
    t[j] = tj;
    x[j] = dw / (2.0 * kPi) * std::exp(Complex{0.0, W * tj}) * out[static_cast<std::size_t>(j)];
    if (tj > 0.0)
      x[j] += b * std::exp(-kJumpDecay * tj);
    else if (tj == 0.0)
      x[j] += 0.5 * b;
  }
  return {t, x};
}

TimeDomainReport time_domain_causality(const MediumModel& model, const TimeDomainSpec& spec) {
  const auto [t, x] = chi_time_series(model, spec);
  TimeDomainReport rep;
  rep.dt = t[1] - t[0];
  const double cutoff = (spec.exclusion > 0.0 ? spec.exclusion : rep.dt) + 1e-9 * rep.dt;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double a = std::abs(x[j]);
    if (t[j] > 0.0) rep.max_post = std::max(rep.max_post, a);
    if (t[j] < -cutoff) rep.max_pre = std::max(rep.max_pre, a);
  }
  return rep;
}

}  // namespace diamag
