#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/CXX11/Tensor>

namespace diamag {

using Complex = std::complex<double>;

template <typename Scalar>
using Tensor3 = Eigen::TensorFixedSize<Scalar, Eigen::Sizes<3, 3, 3>>;

template <typename Scalar>
using Tensor4 = Eigen::TensorFixedSize<Scalar, Eigen::Sizes<3, 3, 3, 3>>;

using Tensor3cd = Tensor3<Complex>;
using Tensor4d = Tensor4<double>;
using Tensor4cd = Tensor4<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

inline double kronecker(int a, int b) { return a == b ? 1.0 : 0.0; }

template <typename Scalar>
Tensor4<Scalar> zero_tensor4() {
  Tensor4<Scalar> t;
  t.setZero();
  return t;
}

/// Largest absolute entry; zero for an all-zero tensor.
template <typename Derived>
double max_abs(const Derived& t) {
  double m = 0.0;
  for (Eigen::Index n = 0; n < t.size(); ++n) m = std::max(m, std::abs(t.data()[n]));
  return m;
}

}  // namespace diamag
