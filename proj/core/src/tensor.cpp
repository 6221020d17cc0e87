#include "tpinv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "tpinv/error.hpp"
#include "tpinv/spectral.hpp"

namespace tpinv {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

std::size_t product(const Dims& d, std::size_t from = 0) {
  std::size_t n = 1;
  for (std::size_t i = from; i < d.size(); ++i) n *= d[i];
  return n;
}

std::string dims_string(const Dims& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(d[i]);
  }
  return s + ")";
}

// Trailing dims with trailing ones stripped, so (n,n) and (n,n,1) conform.
Dims effective_trailing(const DenseTensor& a) {
  Dims t = a.trailing_dims();
  while (!t.empty() && t.back() == 1) t.pop_back();
  return t;
}

void require_same_shape(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) {
    throw ShapeError("shape mismatch " + dims_string(a.dims()) + " vs " + dims_string(b.dims()));
  }
}

double residual_ratio(double num, double den) {
  return den <= kUnitRoundoff ? num : num / den;
}

}  // namespace

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw ShapeError("tensor order must be at least 2");
  data_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (dims_.size() < 2) throw ShapeError("tensor order must be at least 2");
  if (data_.size() != product(dims_)) {
    throw ShapeError("data length " + std::to_string(data_.size()) + " does not match dims " +
                     dims_string(dims_));
  }
}

DenseTensor DenseTensor::from_slices(const std::vector<Eigen::MatrixXd>& slices) {
  if (slices.empty()) throw ShapeError("at least one frontal slice is required");
  const auto r = static_cast<std::size_t>(slices[0].rows());
  const auto c = static_cast<std::size_t>(slices[0].cols());
  DenseTensor t({r, c, slices.size()});
  for (std::size_t s = 0; s < slices.size(); ++s) {
    if (static_cast<std::size_t>(slices[s].rows()) != r ||
        static_cast<std::size_t>(slices[s].cols()) != c) {
      throw ShapeError("frontal slices differ in shape");
    }
    t.slice(s) = slices[s];
  }
  return t;
}

DenseTensor DenseTensor::from_slices(std::initializer_list<Eigen::MatrixXd> slices) {
  return from_slices(std::vector<Eigen::MatrixXd>(slices));
}

Dims DenseTensor::trailing_dims() const {
  return dims_.size() > 2 ? Dims(dims_.begin() + 2, dims_.end()) : Dims{};
}

std::size_t DenseTensor::slice_count() const noexcept { return product(dims_, 2); }

double& DenseTensor::operator()(std::size_t i, std::size_t j, std::size_t slice) {
  return data_[i + rows() * (j + cols() * slice)];
}

double DenseTensor::operator()(std::size_t i, std::size_t j, std::size_t slice) const {
  return data_[i + rows() * (j + cols() * slice)];
}

DenseTensor::SliceMap DenseTensor::slice(std::size_t s) {
  const auto r = static_cast<Eigen::Index>(rows()), c = static_cast<Eigen::Index>(cols());
  return SliceMap(data_.data() + s * rows() * cols(), r, c);
}

DenseTensor::ConstSliceMap DenseTensor::slice(std::size_t s) const {
  const auto r = static_cast<Eigen::Index>(rows()), c = static_cast<Eigen::Index>(cols());
  return ConstSliceMap(data_.data() + s * rows() * cols(), r, c);
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double relative_diff(const DenseTensor& a, const DenseTensor& b) {
  return residual_ratio((a - b).norm(), b.norm());
}

DenseTensor unfold(const DenseTensor& a) {
  if (a.order() < 3) throw ShapeError("unfold requires order >= 3");
  const std::size_t np = a.dims().back();
  Dims out = a.dims();
  out.pop_back();
  out[0] = a.rows() * np;
  DenseTensor stack(out);
  // Each entry of slab `s` of `a` moves to row offset s * n1.
  const std::size_t n1 = a.rows();
  const std::size_t slab = a.size() / np;
  for (std::size_t s = 0; s < np; ++s) {
    for (std::size_t q = 0; q < slab; ++q) {
      const std::size_t i = q % n1, rest = q / n1;
      stack.data()[i + s * n1 + out[0] * rest] = a.data()[s * slab + q];
    }
  }
  return stack;
}

DenseTensor fold(const DenseTensor& stack, std::size_t last_dim) {
  if (last_dim == 0 || stack.rows() % last_dim != 0) {
    throw ShapeError("fold: stack height " + std::to_string(stack.rows()) +
                     " is not a multiple of " + std::to_string(last_dim));
  }
  Dims out = stack.dims();
  const std::size_t n1 = stack.rows() / last_dim;
  out[0] = n1;
  out.push_back(last_dim);
  DenseTensor a(out);
  const std::size_t slab = a.size() / last_dim;
  for (std::size_t s = 0; s < last_dim; ++s) {
    for (std::size_t q = 0; q < slab; ++q) {
      const std::size_t i = q % n1, rest = q / n1;
      a.data()[s * slab + q] = stack.data()[i + s * n1 + stack.rows() * rest];
    }
  }
  return a;
}

Eigen::MatrixXd bcirc(const DenseTensor& a) {
  if (a.order() != 3) throw ShapeError("bcirc is defined for order-3 tensors only");
  const auto n1 = static_cast<Eigen::Index>(a.rows());
  const auto n2 = static_cast<Eigen::Index>(a.cols());
  const auto n3 = static_cast<Eigen::Index>(a.dims()[2]);
  Eigen::MatrixXd m(n1 * n3, n2 * n3);
  for (Eigen::Index i = 0; i < n3; ++i) {
    for (Eigen::Index j = 0; j < n3; ++j) {
      m.block(i * n1, j * n2, n1, n2) = a.slice(static_cast<std::size_t>((i - j + n3) % n3));
    }
  }
  return m;
}

DenseTensor tprod(const DenseTensor& a, const DenseTensor& b, unsigned workers) {
  if (a.cols() != b.rows()) {
    throw ShapeError("tprod: inner dimensions differ " + dims_string(a.dims()) + " * " +
                     dims_string(b.dims()));
  }
  if (effective_trailing(a) != effective_trailing(b)) {
    throw ShapeError("tprod: trailing dimensions differ " + dims_string(a.dims()) + " * " +
                     dims_string(b.dims()));
  }
  const auto sa = spectral::to_spectral(a);
  const auto sb = spectral::to_spectral(b);
  auto sc = spectral::block_map(
      sa, sb, [](const spectral::Block& x, const spectral::Block& y) { return spectral::Block(x * y); },
      workers);
  DenseTensor c = spectral::from_spectral(sc);
  // Keep the longer of the two trailing shapes, e.g. (n,n) * (n,n,1).
  Dims d = a.order() >= b.order() ? a.dims() : b.dims();
  d[0] = a.rows();
  d[1] = b.cols();
  return DenseTensor(std::move(d), std::vector<double>(c.data().begin(), c.data().end()));
}

DenseTensor ttranspose(const DenseTensor& a) {
  Dims d = a.dims();
  std::swap(d[0], d[1]);
  DenseTensor t(d);
  const Dims trailing = a.trailing_dims();
  for (std::size_t s = 0; s < a.slice_count(); ++s) {
    t.slice(spectral::conjugate_partner(trailing, s)) = a.slice(s).transpose();
  }
  return t;
}

DenseTensor identity_tensor(std::size_t n, const Dims& trailing) {
  Dims d{n, n};
  d.insert(d.end(), trailing.begin(), trailing.end());
  DenseTensor t(d);
  for (std::size_t i = 0; i < n; ++i) t(i, i, 0) = 1.0;
  return t;
}

DenseTensor zeros_like(const DenseTensor& a) { return DenseTensor(a.dims()); }

bool is_f_diagonal(const DenseTensor& a, double tol) {
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double limit = tol * scale;
  for (std::size_t s = 0; s < a.slice_count(); ++s) {
    const auto m = a.slice(s);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i != j && std::abs(m(i, j)) > limit) return false;
      }
    }
  }
  return true;
}

double asymmetry(const DenseTensor& a) {
  if (a.rows() != a.cols()) throw ShapeError("asymmetry requires square frontal slices");
  return (a - ttranspose(a)).norm();
}

bool is_symmetric(const DenseTensor& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return asymmetry(a) <= tol * a.norm();
}

bool is_spd(const DenseTensor& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0) return false;
  const auto s = spectral::to_spectral(a);
  double lambda_max = 0.0;
  double lambda_min = std::numeric_limits<double>::infinity();
  for (const auto& block : s.blocks()) {
    const double bn = block.norm();
    if ((block - block.adjoint()).norm() > tol * bn) return false;
    if (bn == 0.0) return false;
    const auto eig = spectral::hermitian_eig(block, 1.0);
    lambda_min = std::min(lambda_min, eig.values.minCoeff());
    lambda_max = std::max(lambda_max, eig.values.maxCoeff());
  }
  return lambda_min > tol * lambda_max;
}

double PenroseReport::residual(int k) const noexcept {
  switch (k) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    default: return r4;
  }
}

PenroseReport penrose_residuals(const DenseTensor& a, const DenseTensor& x, double tol,
                                unsigned workers) {
  if (a.rows() != x.cols() || a.cols() != x.rows()) {
    throw ShapeError("penrose_residuals: candidate " + dims_string(x.dims()) +
                     " does not conform to " + dims_string(a.dims()));
  }
  const DenseTensor ax = tprod(a, x, workers);
  const DenseTensor xa = tprod(x, a, workers);
  PenroseReport rep;
  rep.tolerance = tol;
  rep.r1 = residual_ratio((tprod(ax, a, workers) - a).norm(), a.norm());
  rep.r2 = residual_ratio((tprod(xa, x, workers) - x).norm(), x.norm());
  rep.r3 = residual_ratio(asymmetry(ax), ax.norm());
  rep.r4 = residual_ratio(asymmetry(xa), xa.norm());
  for (int k = 0; k < 4; ++k) rep.pass[k] = rep.residual(k + 1) <= tol;
  return rep;
}

}  // namespace tpinv
