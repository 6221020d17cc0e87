#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace tpinv::ring {

// Element of the commutative ring of length-p real vectors under circulant
// multiplication.
class RingElem {
 public:
  RingElem() = default;
  explicit RingElem(std::vector<double> values);
  RingElem(std::initializer_list<double> values);

  static RingElem zero(std::size_t p);
  static RingElem unity(std::size_t p);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  double norm() const;

  friend RingElem operator+(const RingElem& a, const RingElem& b);
  friend RingElem operator-(const RingElem& a, const RingElem& b);

 private:
  std::vector<double> values_;
};

// DFT coefficients of a ring element with the tolerance used for zero tests.
struct Spectrum {
  std::vector<std::complex<double>> coeffs;
  double tol = 0.0;

  std::size_t size() const noexcept { return coeffs.size(); }
  double max_abs() const;
  // Coefficient k counts as zero when |coeffs[k]| <= tol * max_abs().
  std::vector<bool> support() const;
};

// Default relative zero-support tolerance: p * unit roundoff.
double default_tolerance(std::size_t p);

Eigen::MatrixXd circ_matrix(const RingElem& a);
RingElem ring_mul(const RingElem& a, const RingElem& b);

Spectrum dft(const RingElem& a, std::optional<double> tol = std::nullopt);
RingElem idft(const Spectrum& s);

std::optional<RingElem> bc_inverse(const RingElem& a, const RingElem& b, const RingElem& c,
                                   std::optional<double> tol = std::nullopt);
std::optional<RingElem> annihilator_bc_inverse(const RingElem& a, const RingElem& b,
                                               const RingElem& c,
                                               std::optional<double> tol = std::nullopt);
std::optional<RingElem> left_ann_b_inverse(const RingElem& a, const RingElem& b,
                                           std::optional<double> tol = std::nullopt);
std::optional<RingElem> right_ann_c_inverse(const RingElem& a, const RingElem& c,
                                            std::optional<double> tol = std::nullopt);

RingElem group_inverse(const RingElem& a, std::optional<double> tol = std::nullopt);
// ||a*a*x - a|| / ||a|| for x = group_inverse(a): how well a lies in a^2 R.
double group_membership_residual(const RingElem& a, std::optional<double> tol = std::nullopt);

bool is_zero_divisor(const RingElem& a, std::optional<double> tol = std::nullopt);

}  // namespace tpinv::ring
