#include "doctest.h"
#include "oracles.hpp"

#include <chrono>

#include "diamag/causality.hpp"
#include "diamag/polariton.hpp"

using namespace diamag;

namespace {

MediumModel fig2a() { return oracle::three_resonance_model(); }

const BoxGeometry kFig2b(0.2 / (2 * kPi), 0.4 / (2 * kPi), 0.2 / (2 * kPi), 500.0, 1.0 / std::sqrt(32.0));

// Causal Lorentzian with a closed-form transform pair.
Complex lorentzian(double w) { return 1.0 / Complex(4.0 - w * w, -0.3 * w); }

TabulatedResponse lorentzian_table(int n, double omega_max) {
  Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(n, 0.0, omega_max);
  Eigen::ArrayXcd v = w.unaryExpr([](double x) { return lorentzian(x); });
  return TabulatedResponse::from_samples(w, v);
}

}  // namespace

TEST_CASE("power tail fit") {
  const Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(200, 1.0, 100.0);
  const PowerTail two = fit_power_tail(w, 3.0 / w.square());
  CHECK(two.exponent == 2);
  CHECK(two.coefficient == doctest::Approx(3.0).epsilon(1e-9));
  const PowerTail one = fit_power_tail(w, -0.5 / w);
  CHECK(one.exponent == 1);
  CHECK(one.coefficient == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fit_power_tail(w, Eigen::ArrayXd::Constant(200, 2.0)).exponent <= 0);
}

TEST_CASE("tabulated response validation") {
  TabulatedResponse ok = lorentzian_table(128, 20.0);
  CHECK_NOTHROW(ok.validate());

  CHECK_THROWS_AS(lorentzian_table(32, 20.0), std::invalid_argument);

  TabulatedResponse unsorted = ok;
  std::swap(unsorted.omegas[10], unsorted.omegas[11]);
  CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);

  TabulatedResponse negative = ok;
  negative.omegas[0] = -1.0;
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

  TabulatedResponse nan = ok;
  nan.values[5] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
}

TEST_CASE("Lorentzian transforms match the closed form") {
  // 20 points per linewidth.
  const TabulatedResponse tab = lorentzian_table(1 << 14, 250.0);
  double worst_re = 0.0, worst_im = 0.0;
  for (double w : {0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 6.0, 20.0}) {
    worst_re = std::max(worst_re, std::abs(kk_real_at(tab, w) - lorentzian(w).real()));
    worst_im = std::max(worst_im, std::abs(kk_imag_at(tab, w) - lorentzian(w).imag()));
  }
  // Peak |f| is 1 / (2 * 0.3) = 1.67.
  CHECK(worst_re < 1e-2);
  CHECK(worst_im < 1e-2);

  const TabulatedResponse re = kk_real_from_imag(tab);
  const TabulatedResponse im = kk_imag_from_real(tab);
  CHECK((re.values.imag() == tab.values.imag()).all());
  CHECK((im.values.real() == tab.values.real()).all());
  double round = 0.0;
  for (Eigen::Index i = 0; i < tab.omegas.size() / 2; ++i)
    round = std::max(round, std::abs(re.values[i].real() - tab.values[i].real()));
  CHECK(round < 1e-2);
}

TEST_CASE("non-decaying input is rejected by the transforms") {
  const Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(128, 0.0, 10.0);
  const TabulatedResponse flat = TabulatedResponse::from_samples(w, Eigen::ArrayXcd::Constant(128, {0.5, 0.5}));
  CHECK_THROWS_AS(kk_real_from_imag(flat), std::invalid_argument);
}

TEST_CASE("refined grid") {
  const Eigen::ArrayXd g = refined_grid(fig2a(), 50.0, 4096);
  // Clustered points beyond omega_max or on top of uniform ones are dropped.
  CHECK(g.size() <= 4096);
  CHECK(g.size() > 4000);
  CHECK(g[0] == 0.0);
  CHECK(g[g.size() - 1] == doctest::Approx(50.0));
  for (Eigen::Index i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // Denser next to a resonance than the uniform half alone.
  auto spacing_near = [&](double w) {
    Eigen::Index i = 0;
    while (g[i] < w) ++i;
    return g[i] - g[i - 1];
  };
  CHECK(spacing_near(1.0) < 50.0 / 2048);
  CHECK(spacing_near(3.0) < 50.0 / 2048);
}

TEST_CASE("static identity with a sign-indefinite Im chi") {
  const MediumModel m = fig2a();
  const auto start = std::chrono::steady_clock::now();
  const StaticIdentity s = kk_static_identity(m, 50.0, 4096);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  CHECK(s.lhs == doctest::Approx(-63.0 / 64).epsilon(1e-14));
  CHECK(s.asymptote == doctest::Approx(0.0));
  CHECK(s.rhs == doctest::Approx(-63.0 / 64).epsilon(1e-2));
  CHECK(s.residual < 1e-2);
  CHECK(seconds < 10.0);

  // Im chi changes sign on the grid, so the identity is not a positivity statement.
  bool positive = false, negative = false;
  for (double w = 0.01; w < 5.0; w += 0.01) {
    positive |= chi(m, w).imag() > 0.0;
    negative |= chi(m, w).imag() < 0.0;
  }
  CHECK(positive);
  CHECK(negative);
}

TEST_CASE("static identity converges with the grid") {
  const MediumModel m = fig2a();
  double previous = 1.0;
  for (int n : {512, 1024, 2048, 4096}) {
    const double r = kk_static_identity(m, 50.0, n).residual;
    CHECK(r <= previous * 1.05);
    previous = r;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("static identity for the box medium") {
  const MediumModel box = box_medium(kFig2b, 6, 0.15);
  const StaticIdentity s = kk_static_identity(box, 400.0, 4096);
  CHECK(s.lhs < 0.0);
  CHECK(s.residual < 1e-2);
}

TEST_CASE("mu sum rule") {
  MediumModel m = fig2a();
  CHECK(std::abs(mu_sum_rule_residual(m)) <= 1e-14);
  CHECK(chi_asymptote(m) == doctest::Approx(0.0).scale(1.0));

  m.transitions[0].d_dipoct = 0.0;
  CHECK(mu_sum_rule_residual(m) == doctest::Approx(65.0 / 64).epsilon(1e-14));
  CHECK(std::abs(mu(m, 1e6).value - 1.0) > 1e-2);
  CHECK(chi_asymptote(m) != doctest::Approx(0.0));

  CHECK(mu_sum_rule_residual(MediumModel{}) == 0.0);
}

TEST_CASE("passivity scan") {
  const MediumModel m = fig2a();
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(200001, 0.0, 1000.0);
  const auto start = std::chrono::steady_clock::now();
  const PassivityReport r = passivity_scan(m, grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 10.0);

  bool covers_one = false;
  for (const auto& [lo, hi] : r.negative_im_mu_intervals) {
    CHECK(lo < hi);
    for (std::size_t i = 0; i < 100; ++i) CHECK(mu(m, lo + (hi - lo) * (i + 0.5) / 100).value.imag() < 0.0);
    covers_one |= lo < 1.0 && 1.0 < hi;
  }
  CHECK(covers_one);
  CHECK(r.min_im_mu < 0.0);
  CHECK(mu(m, r.min_im_mu_at).value.imag() == doctest::Approx(r.min_im_mu));

  // The three-resonance model is not passive: Im(eps mu) dips below zero
  // between the upper resonances. The scan must report that, not hide it.
  CHECK(r.min_im_epsmu < 0.0);
  CHECK(r.min_im_epsmu_at > 2.0);
  CHECK(r.min_im_epsmu_at < 3.0);
  CHECK(sample(m, r.min_im_epsmu_at).epsmu.imag() == doctest::Approx(r.min_im_epsmu));
}

TEST_CASE("passivity scan on a plain dipole medium") {
  MediumModel m;
  m.transitions = {{1.0, 0, 0, 0, 0, 1.0, 0.1}};
  const PassivityReport r = passivity_scan(m, Eigen::ArrayXd::LinSpaced(10001, 0.0, 100.0));
  CHECK(r.min_im_epsmu > 0.0);
  CHECK(r.negative_im_mu_intervals.empty());
}

TEST_CASE("time-domain causality") {
  const MediumModel m = fig2a();
  const auto start = std::chrono::steady_clock::now();
  const TimeDomainReport r = time_domain_causality(m);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.max_post > 0.0);
  CHECK(r.ratio() < 1e-3);
  // Frequencies span [-half_width, half_width], so dt = pi / half_width.
  CHECK(r.dt == doctest::Approx(kPi / TimeDomainSpec{}.half_width));
  CHECK(seconds < 10.0);
}

TEST_CASE("time series of a single Lorentzian") {
  // chi = d / (w0^2 - w^2 - 2 i g w) has chi(t) = d e^{-g t} sin(W t) / W for t > 0.
  MediumModel m;
  const double d = 0.7, w0 = 1.5, g = 0.2;
  m.transitions = {{0, 0, d, 0, 0, w0, g}};
  // The magnetic dipole enters 1/mu with a minus sign, so chi carries +d / D.
  const Complex direct = chi(m, 0.4);
  CHECK(std::abs(direct - d / Complex(w0 * w0 - 0.16, -2.0 * g * 0.4)) < 1e-14);

  TimeDomainSpec spec;
  spec.n_points = 1 << 14;
  spec.half_width = 100.0;
  spec.hann_window = false;
  const auto [t, x] = chi_time_series(m, spec);
  const double W = std::sqrt(w0 * w0 - g * g);
  double worst = 0.0, pre = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t[i] > 0.5 && t[i] < 40.0)
      worst = std::max(worst, std::abs(x[i].real() - d * std::exp(-g * t[i]) * std::sin(W * t[i]) / W));
    if (t[i] < -0.5) pre = std::max(pre, std::abs(x[i]));
  }
  CHECK(worst < 1e-3);
  CHECK(pre < 1e-3);
  CHECK(chi_jump(m) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("time domain rejects a non-decaying chi unless asked") {
  MediumModel m = fig2a();
  m.transitions[0].d_dipoct = 0.0;
  CHECK_THROWS_AS(time_domain_causality(m), std::invalid_argument);
  TimeDomainSpec spec;
  spec.subtract_asymptote = true;
  CHECK(time_domain_causality(m, spec).ratio() < 1e-3);
}
