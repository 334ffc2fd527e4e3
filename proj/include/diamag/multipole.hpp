#pragma once

// Rotational averaging of rank-4 response tensors, transition strengths of the
// multipole channels, and the Thomas-Reiche-Kuhn sum-rule family.

#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "diamag/quantum_box.hpp"
#include "diamag/tensor.hpp"

namespace diamag {

/// Rotationally averaged strengths of one g -> e transition, in omega_p^2.
struct TransitionStrengths {
  double d_edip = 0.0;
  double d_quad = 0.0;
  double d_mdip = 0.0;
  double d_dia = 0.0;
  double d_dipoct = 0.0;
  double omega_eg = 1.0;
  double gamma_e = 0.0;

  /// Throws std::invalid_argument on omega_eg <= 0, gamma_e < 0 or d_edip < 0.
  void validate() const;
};

/// Weights of the isotropic rank-4 averaging operator, acting on the
/// contractions (f_aabb, f_abab, f_abba) and producing coefficients of
/// (d_ik d_mj, d_im d_kj, d_ij d_km).
inline Eigen::Matrix3d iso4_weights() {
  Eigen::Matrix3d w;
  w << 4, -1, -1, -1, 4, -1, -1, -1, 4;
  return w / 30.0;
}

/// The three isotropic rank-4 tensors, index order (i, k, m, j):
/// 0: d_ik d_mj, 1: d_im d_kj, 2: d_ij d_km.
template <typename Scalar = double>
Tensor4<Scalar> isotropic_basis(int which) {
  Tensor4<Scalar> t;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
          double v = 0.0;
          switch (which) {
            case 0: v = kronecker(i, k) * kronecker(m, j); break;
            case 1: v = kronecker(i, m) * kronecker(k, j); break;
            case 2: v = kronecker(i, j) * kronecker(k, m); break;
            default: throw std::invalid_argument("isotropic_basis: index must be 0, 1 or 2");
          }
          t(i, k, m, j) = Scalar(v);
        }
  return t;
}

/// (f_aabb, f_abab, f_abba) for f indexed (i, k, m, j).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> pair_contractions(const Tensor4<Scalar>& f) {
  Eigen::Matrix<Scalar, 3, 1> c = Eigen::Matrix<Scalar, 3, 1>::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      c[0] += f(a, a, b, b);
      c[1] += f(a, b, a, b);
      c[2] += f(a, b, b, a);
    }
  return c;
}

/// Coefficients of f's isotropic part on isotropic_basis(0..2).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> iso4_coefficients(const Tensor4<Scalar>& f) {
  return iso4_weights().template cast<Scalar>() * pair_contractions(f);
}

/// Orientational average of f: the projection onto the isotropic subspace.
template <typename Scalar>
Tensor4<Scalar> iso4_average(const Tensor4<Scalar>& f) {
  const auto c = iso4_coefficients(f);
  Tensor4<Scalar> out;
  out.setZero();
  for (int b = 0; b < 3; ++b) out += isotropic_basis<Scalar>(b) * c[b];
  return out;
}

template <typename Scalar>
Tensor4<Scalar> to_fixed(const Eigen::Tensor<Scalar, 4>& f) {
  for (int d = 0; d < 4; ++d)
    if (f.dimension(d) != 3) throw std::invalid_argument("rank-4 tensor must have shape 3x3x3x3");
  Tensor4<Scalar> out;
  for (Eigen::Index n = 0; n < 81; ++n) out.data()[n] = f.data()[n];
  return out;
}

template <typename Scalar>
Tensor4<Scalar> iso4_average(const Eigen::Tensor<Scalar, 4>& f) {
  return iso4_average(to_fixed(f));
}

/// <<f>> = -(1/30) [4 f_{d n n d} - f_{n d n d} - f_{n n d d}], the scalar
/// that multiplies k^2 A for a transverse probe.
template <typename Scalar>
Scalar scalar_average(const Tensor4<Scalar>& f) {
  Scalar ijkm = Scalar(0), imkj = Scalar(0), ikmj = Scalar(0);
  for (int d = 0; d < 3; ++d)
    for (int n = 0; n < 3; ++n) {
      ijkm += f(d, n, n, d);
      imkj += f(n, d, n, d);
      ikmj += f(n, n, d, d);
    }
  return -(Scalar(4) * ijkm - imkj - ikmj) / Scalar(30);
}

template <typename Scalar>
Scalar scalar_average(const Eigen::Tensor<Scalar, 4>& f) {
  return scalar_average(to_fixed(f));
}

/// Rank-4 products of one transition, each the (e <-> g) symmetrised real part
/// 1/2 [A^{ge} B^{eg} + A^{eg} B^{ge}], index order (i, k, m, j):
///   quad   = [(p_k r_i) + (p_i r_k)] (p_j r_m)
///   mdip   = [(p_k r_i) - (p_i r_k)] (p_j r_m)
///   dia    = [(p_i r_m) + (p_m r_i)] (p_j r_k)
///   dipoct = p_i (p_j r_k r_m) + p_j (p_i r_k r_m)
struct ChannelTensors {
  Tensor4d quad, mdip, dia, dipoct;
  /// Largest |p_i^{ge} (p_j r_m)^{eg}|; reported only, never summed.
  double chiral_magnitude = 0.0;
};

ChannelTensors channel_tensors(const MomentSet& ms);

/// Applies the five strength definitions to one transition. Geometry in
/// omega_p units, so the result is directly in omega_p^2.
TransitionStrengths transition_strengths(const MomentSet& ms, const BoxGeometry& geom,
                                         double gamma_e = 0.0);

enum class Channel { edip, quad, mdip, dia, dipoct, chiral };

std::string_view to_string(Channel c);

/// Channels whose moment products are non-zero (|product| > tolerance).
std::set<Channel> classify(const MomentSet& ms, double tolerance = 0.0);

struct TrkResiduals {
  double rank2 = 0.0;  ///< max |d_ij - (1/m) sum_e [p_i p_j / w_eg - (e<->g)]|
  double rank4 = 0.0;  ///< max |d_ij (r_k r_m)^gg - (1/m) sum_e [...]|
  double diagonal = 0.0;  ///< max_i |1 - rank-2 sum_ii|
};

TrkResiduals trk_residuals(const std::vector<MomentSet>& transitions, const GroundTensors& gt,
                           const BoxGeometry& geom);

/// sum_e d_dia / w_eg^2 and the ground-state value <r^2>/6 it converges to.
struct StaticClosure {
  double sum_dia = 0.0;
  double ground_value = 0.0;
  double relative_error() const { return std::abs(sum_dia - ground_value) / std::abs(ground_value); }
};

StaticClosure static_closure(const std::vector<TransitionStrengths>& strengths,
                             const GroundTensors& gt);

/// Current-susceptibility tensor alpha^tot_{ikmj}(omega) (omega_p^2 units) of
/// a first-principles transition list, using the appendix denominator
/// w_eg^2 - (omega + i gamma)^2. Its scalar average equals chi(omega).
Tensor4cd current_susceptibility(const std::vector<MomentSet>& transitions,
                                 const BoxGeometry& geom, double omega, double gamma_e);

/// Box model strengths for every enumerated transition.
std::vector<TransitionStrengths> box_strengths(const std::vector<Transition>& transitions,
                                               const BoxGeometry& geom, double gamma_e);

}  // namespace diamag
