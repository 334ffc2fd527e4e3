#include "diamag/multipole.hpp"

#include <cmath>
#include <string>

namespace diamag {

namespace {

// 1/2 [A^{ge}(a, b) B^{eg}(c, d) + A^{eg}(a, b) B^{ge}(c, d)] laid out by `slot`,
// which maps (i, k, m, j) to the four indices (a, b, c, d).
template <typename Slot>
Tensor4d symmetrised_product(const Eigen::Matrix3cd& a_ge, const Eigen::Matrix3cd& a_eg,
                             const Eigen::Matrix3cd& b_ge, const Eigen::Matrix3cd& b_eg,
                             Slot slot) {
  Tensor4d t;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
          const auto [a, b, c, d] = slot(i, k, m, j);
          const Complex v = a_ge(a, b) * b_eg(c, d) + a_eg(a, b) * b_ge(c, d);
          t(i, k, m, j) = 0.5 * v.real();
        }
  return t;
}

struct Idx {
  int a, b, c, d;
};

Tensor4d dipole_octopole(const MomentSet& ms) {
  Tensor4d t;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
          const Complex v = ms.p_ge[i] * ms.prr_eg(j, k, m) + ms.p_eg[i] * ms.prr_ge(j, k, m) +
                            ms.p_ge[j] * ms.prr_eg(i, k, m) + ms.p_eg[j] * ms.prr_ge(i, k, m);
          t(i, k, m, j) = 0.5 * v.real();
        }
  return t;
}

void require_frequency(const MomentSet& ms) {
  if (ms.omega_eg == 0.0) throw std::invalid_argument("transition frequency must be non-zero");
}

}  // namespace

void TransitionStrengths::validate() const {
  if (!(omega_eg > 0.0)) throw std::invalid_argument("transition frequency must be positive");
  if (!(gamma_e >= 0.0)) throw std::invalid_argument("linewidth must be non-negative");
  if (!(d_edip >= 0.0)) throw std::invalid_argument("electric dipole strength must be non-negative");
}

ChannelTensors channel_tensors(const MomentSet& ms) {
  const Eigen::Matrix3cd sym_ge = ms.pr_ge + ms.pr_ge.transpose();
  const Eigen::Matrix3cd sym_eg = ms.pr_eg + ms.pr_eg.transpose();
  // (p_k r_i) - (p_i r_k) stored at (i, k)
  const Eigen::Matrix3cd anti_ge = ms.pr_ge.transpose() - ms.pr_ge;
  const Eigen::Matrix3cd anti_eg = ms.pr_eg.transpose() - ms.pr_eg;

  ChannelTensors c;
  auto ik_jm = [](int i, int k, int m, int j) { return Idx{i, k, j, m}; };
  auto im_jk = [](int i, int k, int m, int j) { return Idx{i, m, j, k}; };
  c.quad = symmetrised_product(sym_ge, sym_eg, ms.pr_ge, ms.pr_eg, ik_jm);
  c.mdip = symmetrised_product(anti_ge, anti_eg, ms.pr_ge, ms.pr_eg, ik_jm);
  c.dia = symmetrised_product(sym_ge, sym_eg, ms.pr_ge, ms.pr_eg, im_jk);
  c.dipoct = dipole_octopole(ms);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int m = 0; m < 3; ++m)
        c.chiral_magnitude = std::max(c.chiral_magnitude, std::abs(ms.p_ge[i] * ms.pr_eg(j, m)));
  return c;
}

TransitionStrengths transition_strengths(const MomentSet& ms, const BoxGeometry& geom,
                                         double gamma_e) {
  require_frequency(ms);
  const double w = ms.omega_eg;
  const double m = geom.mass;
  const ChannelTensors c = channel_tensors(ms);

  TransitionStrengths s;
  s.omega_eg = w;
  s.gamma_e = gamma_e;
  s.d_edip = 2.0 * (ms.p_ge.transpose() * ms.p_eg).value().real() / (3.0 * m * w);
  s.d_quad = -scalar_average(c.quad) / (m * w);
  s.d_mdip = w * scalar_average(c.mdip) / m;
  s.d_dia = -w * scalar_average(c.dia) / m;
  s.d_dipoct = -scalar_average(c.dipoct) / (m * w);
  return s;
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::edip: return "e-dip";
    case Channel::quad: return "quad";
    case Channel::mdip: return "m-dip";
    case Channel::dia: return "dia";
    case Channel::dipoct: return "dip-oct";
    case Channel::chiral: return "chiral";
  }
  return "?";
}

std::set<Channel> classify(const MomentSet& ms, double tolerance) {
  const ChannelTensors c = channel_tensors(ms);
  std::set<Channel> out;
  if (std::abs((ms.p_ge.transpose() * ms.p_eg).value()) > tolerance) out.insert(Channel::edip);
  if (max_abs(c.quad) > tolerance) out.insert(Channel::quad);
  if (max_abs(c.mdip) > tolerance) out.insert(Channel::mdip);
  if (max_abs(c.dia) > tolerance) out.insert(Channel::dia);
  if (max_abs(c.dipoct) > tolerance) out.insert(Channel::dipoct);
  if (c.chiral_magnitude > tolerance) out.insert(Channel::chiral);
  return out;
}

TrkResiduals trk_residuals(const std::vector<MomentSet>& transitions, const GroundTensors& gt,
                           const BoxGeometry& geom) {
  if (transitions.empty()) throw std::invalid_argument("trk_residuals: empty transition list");
  const double m = geom.mass;
  const Complex I{0.0, 1.0};

  Eigen::Matrix3cd rank2 = Eigen::Matrix3cd::Zero();
  Tensor4cd rank4;  // (i, j, k, m)
  rank4.setZero();
  for (const MomentSet& ms : transitions) {
    require_frequency(ms);
    const double scale = 1.0 / (m * ms.omega_eg);
    rank2 += scale * (ms.p_ge * ms.p_eg.transpose() + ms.p_eg * ms.p_ge.transpose());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int n = 0; n < 3; ++n) {
            const Complex fwd = ms.p_ge[i] * (ms.prr_eg(j, k, n) + I * kronecker(j, k) * ms.r_eg[n]);
            const Complex bwd = ms.p_eg[i] * (ms.prr_ge(j, k, n) + I * kronecker(j, k) * ms.r_ge[n]);
            rank4(i, j, k, n) += scale * (fwd + bwd);
          }
  }

  TrkResiduals r;
  for (int i = 0; i < 3; ++i) {
    r.diagonal = std::max(r.diagonal, std::abs(1.0 - rank2(i, i)));
    for (int j = 0; j < 3; ++j) {
      r.rank2 = std::max(r.rank2, std::abs(kronecker(i, j) - rank2(i, j)));
      for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 3; ++n)
          r.rank4 = std::max(r.rank4, std::abs(kronecker(i, j) * gt.rr_gg(k, n) - rank4(i, j, k, n)));
    }
  }
  return r;
}

StaticClosure static_closure(const std::vector<TransitionStrengths>& strengths,
                             const GroundTensors& gt) {
  StaticClosure c;
  for (const auto& s : strengths) c.sum_dia += s.d_dia / (s.omega_eg * s.omega_eg);
  c.ground_value = gt.r2 / 6.0;
  return c;
}

Tensor4cd current_susceptibility(const std::vector<MomentSet>& transitions,
                                 const BoxGeometry& geom, double omega, double gamma_e) {
  Tensor4cd alpha;
  alpha.setZero();
  const double m = geom.mass;
  const Complex z{omega, gamma_e};
  for (const MomentSet& ms : transitions) {
    require_frequency(ms);
    const double w = ms.omega_eg;
    const Complex denom = w * w - z * z;
    const Complex resonant = omega * omega / denom;
    const ChannelTensors c = channel_tensors(ms);
    for (Eigen::Index n = 0; n < 81; ++n) {
      alpha.data()[n] += (-resonant / w * c.quad.data()[n] + w / denom * c.mdip.data()[n] +
                          c.dia.data()[n] / w + resonant / w * c.dipoct.data()[n]) /
                         m;
    }
  }
  return alpha;
}

std::vector<TransitionStrengths> box_strengths(const std::vector<Transition>& transitions,
                                               const BoxGeometry& geom, double gamma_e) {
  std::vector<TransitionStrengths> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) out.push_back(transition_strengths(t.moments, geom, gamma_e));
  return out;
}

}  // namespace diamag
