#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tpinv/tensor.hpp"

namespace tpinv::fixtures {

// Row-major literal to a dense matrix.
inline Eigen::MatrixXd mat(Eigen::Index rows, Eigen::Index cols, std::vector<double> v) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i * cols + j)];
  }
  return m;
}

inline Eigen::MatrixXd m2(double a, double b, double c, double d) { return mat(2, 2, {a, b, c, d}); }

inline DenseTensor slices(std::vector<Eigen::MatrixXd> s) { return DenseTensor::from_slices(s); }

// Non-commuting 3x3x2 pair.
inline DenseTensor noncomm_a() {
  return slices({mat(3, 3, {1, 2, 3, 0, 0, 0, 0, 0, 0}), mat(3, 3, {1, 2, 1, 0, 2, 0, 3, 1, 0})});
}
inline DenseTensor noncomm_b() {
  return slices({mat(3, 3, {1, 1, 0, 0, 3, 0, 0, 1, 0}), mat(3, 3, {0, 1, 0, 0, 5, 0, 1, 1, 0})});
}
inline DenseTensor noncomm_ab() {
  return slices({mat(3, 3, {2, 22, 0, 0, 10, 0, 0, 8, 0}), mat(3, 3, {4, 22, 0, 0, 6, 0, 3, 6, 0})});
}
inline DenseTensor noncomm_ba() {
  return slices({mat(3, 3, {1, 4, 3, 0, 10, 0, 1, 4, 1}), mat(3, 3, {1, 4, 1, 0, 6, 0, 1, 4, 3})});
}

// Reverse-order counterexample for the Moore-Penrose inverse.
inline DenseTensor ro_a() { return slices({m2(1, 1, 1, 0), m2(0, 1, 1, 0)}); }
inline DenseTensor ro_b() { return slices({m2(1, 0, 0, 1), m2(0, 2, 0, 0)}); }
inline DenseTensor ro_ab() { return slices({m2(1, 1, 1, 2), m2(0, 3, 1, 2)}); }
inline DenseTensor ro_a_pinv() {
  return slices({m2(0.5, 0.25, 0.25, -0.125), m2(-0.5, 0.25, 0.25, -0.125)});
}
inline DenseTensor ro_b_pinv() { return slices({m2(1, 0, 0, 1), m2(0, -2, 0, 0)}); }
inline DenseTensor ro_ab_pinv() {
  return slices({m2(-2.0 / 5, 0.5, 1.0 / 20, -0.125), m2(-3.0 / 5, 0.5, 9.0 / 20, -0.125)});
}
inline DenseTensor ro_b_pinv_a_pinv() {
  return slices({m2(0, 0.5, 0.25, -0.125), m2(-1, 0.5, 0.25, -0.125)});
}

// {1,4} example: A with B = identity.
inline DenseTensor onefour_a() { return slices({m2(1, 3, 0, 0), m2(2, 4, 0, 0), m2(5, 1, 0, 0)}); }
inline DenseTensor onefour_b() { return slices({m2(1, 0, 0, 1), m2(0, 0, 0, 0), m2(0, 0, 0, 0)}); }
inline DenseTensor onefour_a14_reference() {
  return slices({m2(3.0 / 80, 0, 0, -1.0 / 16), m2(-1.0 / 16, 0, 0, 11.0 / 80),
                 m2(7.0 / 80, 0, 0, -1.0 / 80)});
}
inline DenseTensor onefour_b14_reference() { return onefour_b(); }
inline DenseTensor onefour_condition_reference() {
  return slices({m2(-1.0 / 10, 2.0 / 5, 0, 0), m2(9.0 / 20, 1.0 / 20, 0, 0),
                 m2(3.0 / 20, 1.0 / 20, 0, 0)});
}

// {1,3} example.
inline DenseTensor onethree_a() { return slices({m2(2, 0, 0, 0), m2(3, 0, 0, 0), m2(1, 0, 0, 0)}); }
inline DenseTensor onethree_b() { return slices({m2(1, 2, 3, 0), m2(3, 4, 5, 0), m2(5, 6, 6, 0)}); }
inline DenseTensor onethree_a13_reference() {
  return slices({m2(1.0 / 18, 0, 0, 0), m2(-5.0 / 18, 0, 0, 0), m2(7.0 / 18, 0, 0, 0)});
}
inline DenseTensor onethree_b13_reference() {
  return slices({m2(0, -3.0 / 14, -5.0 / 36, 37.0 / 168), m2(0, 3.0 / 14, 7.0 / 36, -5.0 / 24),
                 m2(0, 1.0 / 14, 1.0 / 36, -11.0 / 168)});
}
inline DenseTensor onethree_condition_reference() {
  return slices({m2(105, 44, 0, 0), m2(86, 32, 0, 0), m2(86, 32, 0, 0)});
}

// Transpose / commutation example.
inline DenseTensor tr_a() { return slices({m2(1, 2, 0, 3), m2(1, 4, -2, -1), m2(0, 2, 1, 3)}); }
inline DenseTensor tr_at() { return slices({m2(1, 0, 2, 3), m2(0, 1, 2, 3), m2(1, -2, 4, -1)}); }

// Weighted example.
inline DenseTensor w_a() { return slices({m2(1, 0, 0, 1), m2(4, 2, -1, 1), m2(1, 1, 1, 2)}); }
inline DenseTensor w_m() { return slices({m2(3, 1, 1, 6), m2(1, 1, 2, 5), m2(1, 2, 1, 5)}); }
inline DenseTensor w_n() { return slices({m2(2, 0, 0, 2), m2(1, 0, 0, 1), m2(1, 0, 0, 1)}); }
inline DenseTensor w_m_sqrt_reference() {
  return slices({m2(895.0 / 557, 77.0 / 1098, 77.0 / 1098, 583.0 / 305),
                 m2(131.0 / 494, 77.0 / 1098, 179.0 / 346, 1372.0 / 1349),
                 m2(131.0 / 494, 179.0 / 346, 77.0 / 1098, 1372.0 / 1349)});
}
inline DenseTensor w_result_reference() {
  return slices({m2(3.0 / 26, -11.0 / 26, -4.0 / 13, 6.0 / 13),
                 m2(9.0 / 26, -7.0 / 26, 1.0 / 13, 5.0 / 13),
                 m2(1.0 / 26, -21.0 / 26, 3.0 / 13, 2.0 / 13)});
}
// t-inverse of w_a, the weighted inverse of any invertible operand.
inline DenseTensor w_a_inverse() {
  return slices({m2(1.0 / 6, 7.0 / 24, -1.0 / 3, -7.0 / 12), m2(-1.0 / 6, -1.0 / 24, 1.0 / 3, 5.0 / 12),
                 m2(1.0 / 6, -3.0 / 8, 0, 5.0 / 12)});
}

}  // namespace tpinv::fixtures
