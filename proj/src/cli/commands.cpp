#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "diamag/cli.hpp"

namespace diamag::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kInfinityProbe = 1e6;
constexpr double kPassivityMax = 1e3;
constexpr int kPassivityPoints = 8192;
constexpr double kDefaultGammaScale = 1e-3;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::phenomenological: return "phenomenological";
    case Mode::box: return "box";
    case Mode::vacuum: return "vacuum";
  }
  return "?";
}

fs::path output_dir(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (opt.out_dir) return *opt.out_dir;
  if (cfg.output_dir) return *cfg.output_dir;
  return ".";
}

ScenarioConfig effective(ScenarioConfig cfg, const RunOptions& opt) {
  cfg.tolerances.scale(opt.tolerance_scale);
  if (opt.n_max) {
    if (!cfg.box) throw ConfigError(cfg.source + ": --n-max needs a box scenario");
    if (*opt.n_max < 2) throw ConfigError(cfg.source + ": --n-max must be >= 2");
    cfg.box->n_max = *opt.n_max;
  }
  if (opt.gamma_scale) {
    if (!(*opt.gamma_scale >= 0.0 && *opt.gamma_scale <= 1.0))
      throw ConfigError(cfg.source + ": --gamma-scale must lie in [0, 1]");
    cfg.polariton.gamma_scale = *opt.gamma_scale;
  }
  return cfg;
}

std::vector<Transition> basis_for(const ScenarioConfig& cfg, const fs::path& dir, std::ostream& log) {
  if (cfg.mode != Mode::box) return {};
  return box_transitions(*cfg.box, dir / "moments.cache", log);
}

double max_resonance(const MediumModel& model) {
  double w = 0.0;
  for (const auto& t : model.transitions) w = std::max(w, t.omega_eg);
  return w;
}

CheckResult bounded(std::string name, double measured, double threshold, std::string detail = {}) {
  return {measured <= threshold ? Status::pass : Status::fail, std::move(name), measured, threshold,
          std::move(detail)};
}

CheckResult info(std::string name, double measured, std::string detail = {}) {
  return {Status::info, std::move(name), measured, 0.0, std::move(detail)};
}

// A check whose computation rejects the model is a failure of that check,
// not a usage error.
template <typename F>
CheckResult attempt(const std::string& name, double threshold, F&& run) {
  try {
    return run();
  } catch (const std::invalid_argument& e) {
    return {Status::fail, name, std::numeric_limits<double>::infinity(), threshold, e.what()};
  }
}

double relative_max(const Eigen::ArrayXd& err, const Eigen::ArrayXd& ref) {
  const double scale = ref.abs().maxCoeff();
  return scale > 0.0 ? err.abs().maxCoeff() / scale : err.abs().maxCoeff();
}

void box_checks(const ScenarioConfig& cfg, const std::vector<Transition>& basis,
                std::vector<CheckResult>& out) {
  const BoxSpec& spec = *cfg.box;
  const BoxGeometry geom = box_geometry(spec);
  const GroundTensors gt = ground_expectations({}, geom);

  auto moments = [](const std::vector<Transition>& ts) {
    std::vector<MomentSet> ms;
    for (const auto& t : ts) ms.push_back(t.moments);
    return ms;
  };
  const TrkResiduals trk = trk_residuals(moments(basis), gt, geom);
  out.push_back(bounded("trk_diagonal", trk.diagonal, cfg.tolerances.trk_diagonal,
                        "n_max=" + std::to_string(spec.n_max)));
  out.push_back(info("trk_rank2", trk.rank2));
  out.push_back(info("trk_rank4", trk.rank4));

  const auto strengths = box_strengths(basis, geom, spec.gamma);
  const StaticClosure closure = static_closure(strengths, gt);
  out.push_back(info("static_closure_relative_error", closure.relative_error(),
                     "sum d_dia/w^2=" + num(closure.sum_dia) + " <r^2>/6=" + num(closure.ground_value)));

  if (spec.n_max >= 4) {
    const auto coarse = enumerate_transitions(spec.n_max - 2, geom);
    const TrkResiduals trk_c = trk_residuals(moments(coarse), gt, geom);
    const std::string pair = "n_max " + std::to_string(spec.n_max - 2) + " -> " + std::to_string(spec.n_max);
    out.push_back({trk.diagonal < trk_c.diagonal ? Status::pass : Status::fail, "trk_decreasing",
                   trk.diagonal, trk_c.diagonal, pair});
    MediumModel coarse_model;
    coarse_model.transitions = box_strengths(coarse, geom, spec.gamma);
    MediumModel fine_model;
    fine_model.transitions = strengths;
    const double r_c = std::abs(mu_sum_rule_residual(coarse_model));
    const double r_f = std::abs(mu_sum_rule_residual(fine_model));
    out.push_back({r_f < r_c ? Status::pass : Status::fail, "sum_rule_decreasing", r_f, r_c, pair});
  }
}

}  // namespace

MediumModel build_model(const ScenarioConfig& cfg, const std::vector<Transition>& box_basis) {
  MediumModel model;
  model.damping = cfg.damping;
  model.descriptor = cfg.name;
  switch (cfg.mode) {
    case Mode::phenomenological:
      model.transitions = cfg.transitions;
      break;
    case Mode::box:
      model.transitions = box_strengths(box_basis, box_geometry(*cfg.box), cfg.box->gamma);
      model.provenance = Provenance::first_principles;
      break;
    case Mode::vacuum:
      break;
  }
  model.validate();
  return model;
}

std::vector<CheckResult> run_checks(const ScenarioConfig& cfg, const MediumModel& model,
                                    const std::vector<Transition>& box_basis) {
  const Tolerances& tol = cfg.tolerances;
  std::vector<CheckResult> out;

  const double span = std::max(cfg.grid.omega_max, 2.0 * max_resonance(model));
  Eigen::ArrayXd reflection(10000), consistency(10000);
  for (int i = 0; i < 10000; ++i) {
    const double w = span * (i + 1) / 10000.0;
    const Complex c = chi(model, w);
    const double scale = std::max(1.0, std::abs(c));
    reflection[i] = std::abs(chi(model, -w) - std::conj(c)) / scale;
    const ResponseSample s = sample(model, w);
    consistency[i] = std::max(std::abs(s.chi - c) / scale,
                              std::abs(s.epsmu - s.eps * s.mu) / std::max(1.0, std::abs(s.epsmu)));
  }
  out.push_back(bounded("reflection_symmetry", reflection.maxCoeff(), tol.reflection));
  out.push_back(bounded("chi_mu_consistency", consistency.maxCoeff(), tol.consistency));

  const StaticLimits st = static_limits(model);
  out.push_back(info("mu0", st.mu0, st.mu0 < 1.0 ? "diamagnetic" : "not diamagnetic"));
  out.push_back(info("eps0", st.eps0));
  out.push_back(info("chi0", st.chi0));

  const double closure = mu_sum_rule_residual(model);
  if (cfg.mode == Mode::box)
    out.push_back(info("sum_rule", closure, "truncated basis; see sum_rule_decreasing"));
  else
    out.push_back(bounded("sum_rule", std::abs(closure), tol.sum_rule));
  const double mu_inf = std::abs(inverse_mu(model, kInfinityProbe) - 1.0);
  out.push_back(bounded("mu_infinity", mu_inf, tol.mu_infinity, "|1/mu(1e6) - 1|"));

  out.push_back(attempt("kk_static_identity", tol.static_identity, [&] {
    const StaticIdentity si = kk_static_identity(model);
    return bounded("kk_static_identity", si.residual, tol.static_identity,
                   "chi(0)=" + num(si.lhs) + " integral=" + num(si.rhs) +
                       (si.warning ? "; " + *si.warning : ""));
  }));

  out.push_back(attempt("kk_roundtrip", tol.kk_roundtrip, [&] {
    const double w_max = std::max(50.0, 4.0 * max_resonance(model));
    const TabulatedResponse tab = tabulate_chi(model, refined_grid(model, w_max, 4096));
    const TabulatedResponse round = kk_imag_from_real(kk_real_from_imag(tab));
    std::vector<double> err, ref;
    for (Eigen::Index i = 0; i < tab.omegas.size(); ++i)
      if (tab.omegas[i] <= 0.5 * w_max) {
        err.push_back(round.values[i].imag() - tab.values[i].imag());
        ref.push_back(tab.values[i].imag());
      }
    const auto map = [](const std::vector<double>& v) {
      return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    return bounded("kk_roundtrip", relative_max(map(err), map(ref)), tol.kk_roundtrip,
                   "interior half of [0, " + num(w_max) + "]");
  }));

  const PassivityReport pr =
      passivity_scan(model, refined_grid(model, kPassivityMax, kPassivityPoints));
  const bool lossless = std::none_of(model.transitions.begin(), model.transitions.end(),
                                     [](const TransitionStrengths& t) { return t.gamma_e > 0.0; });
  const bool passive = lossless ? pr.min_im_epsmu >= 0.0 : pr.min_im_epsmu > 0.0;
  out.push_back({passive ? Status::pass : Status::fail, "passivity_im_epsmu", pr.min_im_epsmu, 0.0,
                 "min Im(eps mu) on (0, 1e3] at omega=" + num(pr.min_im_epsmu_at) +
                     (lossless ? "; lossless, must be >= 0" : "; must be > 0")});
  {
    std::string where;
    for (std::size_t i = 0; i < pr.negative_im_mu_intervals.size() && i < 4; ++i)
      where += (i ? " " : "") + std::string("[") + num(pr.negative_im_mu_intervals[i].first) + ", " +
               num(pr.negative_im_mu_intervals[i].second) + "]";
    if (pr.negative_im_mu_intervals.size() > 4) where += " ...";
    out.push_back(info("negative_im_mu_intervals", static_cast<double>(pr.negative_im_mu_intervals.size()),
                       pr.negative_im_mu_intervals.empty() ? "none" : "negative Im mu interval found: " + where));
  }

  out.push_back(attempt("time_domain_causality", tol.time_domain, [&] {
    TimeDomainSpec td;
    td.subtract_asymptote = cfg.mode == Mode::box;
    const TimeDomainReport tr = time_domain_causality(model, td);
    return bounded("time_domain_causality", tr.ratio(), tol.time_domain,
                   "max|chi(t < -dt)| / max|chi(t > 0)|");
  }));

  {
    const OpticalSumRule osr = optical_sum_rule_residual(model, 10.0, kDefaultGammaScale);
    CheckResult c = bounded("optical_sum_rule_k10", std::abs(osr.residual), tol.optical_sum_rule,
                            "lossless branches, gamma_scale=1e-3");
    if (!osr.reliable) {
      c.status = Status::fail;
      c.detail += "; branch set incomplete";
    }
    out.push_back(c);
  }

  if (cfg.mode == Mode::box) box_checks(cfg, box_basis, out);
  return out;
}

std::string format_report(const ScenarioConfig& cfg, const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  os << "# verify report: " << cfg.name << " (" << mode_name(cfg.mode) << ")\n";
  int pass = 0, fail = 0, inf = 0;
  for (const auto& c : checks) {
    const char* tag = c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "INFO";
    os << tag << "  " << c.name << "  measured=" << num(c.measured);
    if (c.status != Status::info) os << " threshold=" << num(c.threshold);
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
    (c.status == Status::pass ? pass : c.status == Status::fail ? fail : inf)++;
  }
  os << "# " << pass << " passed, " << fail << " failed, " << inf << " informational\n";
  return os.str();
}

int cmd_respond(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                std::ostream& err) {
  const ScenarioConfig cfg = effective(config, options);
  const fs::path dir = output_dir(cfg, options);
  const MediumModel model = build_model(cfg, basis_for(cfg, dir, err));
  const fs::path path = dir / "response.csv";
  write_atomic(path, format_dataset(model, frequency_grid(cfg.grid)));
  out << "wrote " << path.string() << " (" << cfg.grid.n_points << " rows)\n";
  return kExitPass;
}

int cmd_verify(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
               std::ostream& err) {
  const ScenarioConfig cfg = effective(config, options);
  const fs::path dir = output_dir(cfg, options);
  const auto basis = basis_for(cfg, dir, err);
  const MediumModel model = build_model(cfg, basis);
  const auto checks = run_checks(cfg, model, basis);
  const std::string report = format_report(cfg, checks);
  write_atomic(dir / "verify_report.txt", report);
  out << report;
  const bool ok = std::none_of(checks.begin(), checks.end(),
                               [](const CheckResult& c) { return c.status == Status::fail; });
  return ok ? kExitPass : kExitCheckFailure;
}

int cmd_box(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
            std::ostream& err) {
  const ScenarioConfig cfg = effective(config, options);
  if (cfg.mode != Mode::box) throw ConfigError(cfg.source + ": the box command needs mode = box");
  const fs::path path = output_dir(cfg, options) / "moments.cache";
  const std::string hash = cache_hash(*cfg.box);
  if (const auto old = read_cache(path); old && old->hash != hash)
    err << "notice: " << path.string() << " was built for a different geometry; recomputing\n";
  const auto transitions = enumerate_transitions(cfg.box->n_max, box_geometry(*cfg.box));
  write_atomic(path, format_cache(*cfg.box, transitions));
  out << "wrote " << path.string() << " (" << transitions.size() << " transitions, hash " << hash << ")\n";
  return kExitPass;
}

int cmd_polariton(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                  std::ostream& err) {
  const ScenarioConfig cfg = effective(config, options);
  const fs::path dir = output_dir(cfg, options);
  const MediumModel model = build_model(cfg, basis_for(cfg, dir, err));

  double gamma_scale = kDefaultGammaScale;
  if (cfg.polariton.gamma_scale) {
    gamma_scale = *cfg.polariton.gamma_scale;
  } else if (std::any_of(model.transitions.begin(), model.transitions.end(),
                         [](const TransitionStrengths& t) { return t.gamma_e > 0.0; })) {
    err << "warning: linewidths are non-zero; branches use the lossless limit and mu(omega_j) "
           "uses gamma_scale = "
        << gamma_scale << '\n';
  }

  const std::vector<double> ks = wavevector_grid(cfg.polariton);
  const BranchSet set = solve_branches(model, ks, gamma_scale);

  std::ostringstream os;
  os << "# units: omega_p\n";
  os << "k,branch,omega,v_p,v_g,re_mu,im_mu,sum_rule_residual,complete\n";
  bool ok = true;
  double worst = 0.0;
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    const OpticalSumRule r = optical_sum_rule_residual(set, ik);
    worst = std::max(worst, std::abs(r.residual));
    if (!r.reliable || std::abs(r.residual) > cfg.tolerances.optical_sum_rule) ok = false;
    for (std::size_t b = 0; b < set.branches.size(); ++b) {
      const DispersionBranch& br = set.branches[b];
      if (std::isnan(br.omega[ik])) continue;
      char line[320];
      std::snprintf(line, sizeof line, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", ks[ik], b,
                    br.omega[ik], br.v_p[ik], br.v_g[ik], br.mu[ik].real(), br.mu[ik].imag(),
                    r.residual, r.reliable ? 1 : 0);
      os << line;
    }
  }
  for (const auto& f : set.failures)
    err << "bracket failure at k=" << f.k << " in (" << f.lo << ", " << f.hi << "): " << f.reason << '\n';

  const fs::path path = dir / "branches.csv";
  write_atomic(path, os.str());
  out << "wrote " << path.string() << " (" << set.branches.size() << " branches, " << ks.size()
      << " wavevectors, max |sum rule residual| = " << num(worst) << ")\n";
  return ok ? kExitPass : kExitCheckFailure;
}

int run_command(std::string_view command, const fs::path& config_path, const RunOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_config(config_path);
    if (command == "respond") return cmd_respond(cfg, options, out, err);
    if (command == "verify") return cmd_verify(cfg, options, out, err);
    if (command == "box") return cmd_box(cfg, options, out, err);
    if (command == "polariton") return cmd_polariton(cfg, options, out, err);
    err << "unknown command '" << command << "'\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace diamag::cli
