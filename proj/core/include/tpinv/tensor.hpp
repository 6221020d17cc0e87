#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tpinv {

using Dims = std::vector<std::size_t>;

// Dense real tensor of order p >= 2. Storage is column-major over
// (n1, n2, n3, ..., np): each frontal slice is a contiguous column-major
// n1 x n2 matrix, and the flattened frontal index (i3 fastest) varies
// slowest. An order-2 tensor behaves as a single frontal slice.
class DenseTensor {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXd>;

  DenseTensor() = default;
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  // Order-3 tensor from its frontal slices; all slices must share a shape.
  static DenseTensor from_slices(const std::vector<Eigen::MatrixXd>& slices);
  static DenseTensor from_slices(std::initializer_list<Eigen::MatrixXd> slices);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t rows() const noexcept { return dims_.empty() ? 0 : dims_[0]; }
  std::size_t cols() const noexcept { return dims_.size() < 2 ? 1 : dims_[1]; }
  // Trailing dimensions n3..np (empty for order 2).
  Dims trailing_dims() const;
  // Number of frontal slices, n3 * ... * np.
  std::size_t slice_count() const noexcept;
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t slice = 0);
  double operator()(std::size_t i, std::size_t j, std::size_t slice = 0) const;

  SliceMap slice(std::size_t s);
  ConstSliceMap slice(std::size_t s) const;

  // Frobenius norm with a fixed summation order.
  double norm() const;

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  DenseTensor& operator*=(double s);

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(DenseTensor a, double s);
DenseTensor operator*(double s, DenseTensor a);

// Largest absolute entrywise difference; shapes must match.
double max_abs_diff(const DenseTensor& a, const DenseTensor& b);
// ||a - b|| / ||b||, or the absolute difference when ||b|| <= unit roundoff.
double relative_diff(const DenseTensor& a, const DenseTensor& b);

// Stacks the np frontal sub-tensors of order p-1 vertically, giving a
// tensor of dims (n1*np, n2, n3, ..., n_{p-1}).
DenseTensor unfold(const DenseTensor& a);
// Inverse of unfold; `last_dim` is np.
DenseTensor fold(const DenseTensor& stack, std::size_t last_dim);

// Block-circulant matrix of an order-3 tensor: block (i, j) is slice (i - j) mod n3.
Eigen::MatrixXd bcirc(const DenseTensor& a);

DenseTensor tprod(const DenseTensor& a, const DenseTensor& b, unsigned workers = 1);
DenseTensor ttranspose(const DenseTensor& a);

DenseTensor identity_tensor(std::size_t n, const Dims& trailing);
DenseTensor zeros_like(const DenseTensor& a);

bool is_f_diagonal(const DenseTensor& a, double tol = 0.0);
bool is_symmetric(const DenseTensor& a, double tol = 1e-10);
bool is_spd(const DenseTensor& a, double tol = 1e-10);

struct PenroseReport {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  double tolerance = 0.0;
  bool pass[4] = {false, false, false, false};

  bool all() const noexcept { return pass[0] && pass[1] && pass[2] && pass[3]; }
  double residual(int k) const noexcept;  // k in 1..4
};

PenroseReport penrose_residuals(const DenseTensor& a, const DenseTensor& x, double tol = 1e-8,
                                unsigned workers = 1);

// ||a - a^T|| with the absolute/relative convention used by the residuals.
double asymmetry(const DenseTensor& a);

}  // namespace tpinv
