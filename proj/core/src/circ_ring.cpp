#include "tpinv/circ_ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/FFT>

#include "format.hpp"
#include "tpinv/error.hpp"

namespace tpinv::ring {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

void require_same_length(const RingElem& a, const RingElem& b) {
  if (a.size() != b.size()) {
    throw ShapeError("ring elements have different lengths (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

// Average each coefficient with its conjugate partner so the spectrum is
// exactly conjugate symmetric; self-partnered coefficients become real.
void symmetrize(std::vector<std::complex<double>>& c) {
  const std::size_t p = c.size();
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t m = (p - k) % p;
    if (m < k) continue;
    if (m == k) {
      c[k] = {c[k].real(), 0.0};
    } else {
      const std::complex<double> avg = 0.5 * (c[k] + std::conj(c[m]));
      c[k] = avg;
      c[m] = std::conj(avg);
    }
  }
}

std::vector<bool> symmetric_support(const Spectrum& s) {
  const std::size_t p = s.size();
  const double threshold = s.tol * s.max_abs();
  std::vector<bool> out(p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t m = (p - k) % p;
    const double mag = 0.5 * (std::abs(s.coeffs[k]) + std::abs(s.coeffs[m]));
    out[k] = mag > threshold;
  }
  return out;
}

RingElem reciprocal_on(const Spectrum& a, const std::vector<bool>& mask) {
  Spectrum y;
  y.tol = a.tol;
  y.coeffs.assign(a.size(), {0.0, 0.0});
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (mask[k]) y.coeffs[k] = 1.0 / a.coeffs[k];
  }
  symmetrize(y.coeffs);
  return idft(y);
}

}  // namespace

RingElem::RingElem(std::vector<double> values) : values_(std::move(values)) {}

RingElem::RingElem(std::initializer_list<double> values) : values_(values) {}

RingElem RingElem::zero(std::size_t p) { return RingElem(std::vector<double>(p, 0.0)); }

RingElem RingElem::unity(std::size_t p) {
  std::vector<double> v(p, 0.0);
  if (p > 0) v[0] = 1.0;
  return RingElem(std::move(v));
}

double RingElem::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

RingElem operator+(const RingElem& a, const RingElem& b) {
  require_same_length(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return RingElem(std::move(v));
}

RingElem operator-(const RingElem& a, const RingElem& b) {
  require_same_length(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return RingElem(std::move(v));
}

double Spectrum::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

std::vector<bool> Spectrum::support() const { return symmetric_support(*this); }

double default_tolerance(std::size_t p) {
  return static_cast<double>(std::max<std::size_t>(p, 1)) * kUnitRoundoff;
}

Eigen::MatrixXd circ_matrix(const RingElem& a) {
  const auto p = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) m(i, j) = a[static_cast<std::size_t>((i - j + p) % p)];
  }
  return m;
}

RingElem ring_mul(const RingElem& a, const RingElem& b) {
  require_same_length(a, b);
  const std::size_t p = a.size();
  std::vector<double> y(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += a[(i + p - j) % p] * b[j];
    y[i] = s;
  }
  return RingElem(std::move(y));
}

Spectrum dft(const RingElem& a, std::optional<double> tol) {
  Spectrum s;
  s.tol = tol.value_or(default_tolerance(a.size()));
  if (s.tol < 0.0) throw DomainError("zero-support tolerance must be nonnegative");
  const std::size_t p = a.size();
  if (p == 0) return s;
  std::vector<std::complex<double>> in(p);
  for (std::size_t i = 0; i < p; ++i) in[i] = {a[i], 0.0};
  s.coeffs.resize(p);
  if (p == 1) {
    s.coeffs = in;  // kissfft faults on length-1 plans
  } else {
    Eigen::FFT<double> fft;
    fft.fwd(s.coeffs.data(), in.data(), static_cast<Eigen::Index>(p));
  }
  symmetrize(s.coeffs);
  return s;
}

RingElem idft(const Spectrum& s) {
  const std::size_t p = s.size();
  if (p == 0) return RingElem();
  std::vector<std::complex<double>> out(p);
  if (p == 1) {
    out = s.coeffs;
  } else {
    Eigen::FFT<double> fft;
    fft.inv(out.data(), s.coeffs.data(), static_cast<Eigen::Index>(p));
  }
  const double limit = std::max(s.tol, 16.0 * kUnitRoundoff) * s.max_abs();
  std::vector<double> v(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(out[i].imag()) > limit) {
      throw NumericalError("inverse DFT has imaginary residual " +
                           detail::short_number(std::abs(out[i].imag())) +
                           "; spectrum is not conjugate symmetric");
    }
    v[i] = out[i].real();
  }
  return RingElem(std::move(v));
}

std::optional<RingElem> bc_inverse(const RingElem& a, const RingElem& b, const RingElem& c,
                                   std::optional<double> tol) {
  require_same_length(a, b);
  require_same_length(a, c);
  const Spectrum sa = dft(a, tol), sb = dft(b, tol), sc = dft(c, tol);
  const auto na = sa.support(), nb = sb.support(), nc = sc.support();
  std::vector<bool> mask(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const bool both_zero = !nb[k] && !nc[k];
    const bool all_live = na[k] && nb[k] && nc[k];
    if (!both_zero && !all_live) return std::nullopt;
    mask[k] = all_live;
  }
  return reciprocal_on(sa, mask);
}

std::optional<RingElem> left_ann_b_inverse(const RingElem& a, const RingElem& b,
                                           std::optional<double> tol) {
  require_same_length(a, b);
  const Spectrum sa = dft(a, tol), sb = dft(b, tol);
  const auto na = sa.support(), nb = sb.support();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (nb[k] && !na[k]) return std::nullopt;
  }
  return reciprocal_on(sa, nb);
}

std::optional<RingElem> right_ann_c_inverse(const RingElem& a, const RingElem& c,
                                            std::optional<double> tol) {
  return left_ann_b_inverse(a, c, tol);
}

std::optional<RingElem> annihilator_bc_inverse(const RingElem& a, const RingElem& b,
                                               const RingElem& c, std::optional<double> tol) {
  require_same_length(a, b);
  require_same_length(a, c);
  const Spectrum sa = dft(a, tol), sb = dft(b, tol), sc = dft(c, tol);
  const auto na = sa.support(), nb = sb.support(), nc = sc.support();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (nb[k] != nc[k]) return std::nullopt;
    if (nb[k] && !na[k]) return std::nullopt;
  }
  return reciprocal_on(sa, nb);
}

RingElem group_inverse(const RingElem& a, std::optional<double> tol) {
  const Spectrum sa = dft(a, tol);
  return reciprocal_on(sa, sa.support());
}

double group_membership_residual(const RingElem& a, std::optional<double> tol) {
  const double na = a.norm();
  if (na == 0.0) return 0.0;
  const RingElem x = group_inverse(a, tol);
  const RingElem r = ring_mul(ring_mul(a, a), x) - a;
  return r.norm() / na;
}

bool is_zero_divisor(const RingElem& a, std::optional<double> tol) {
  if (a.norm() == 0.0) throw DomainError("zero element is not a valid zero-divisor query");
  const auto live = dft(a, tol).support();
  return std::find(live.begin(), live.end(), false) != live.end();
}

}  // namespace tpinv::ring
