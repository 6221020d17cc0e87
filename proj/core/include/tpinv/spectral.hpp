#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tpinv/tensor.hpp"

namespace tpinv::spectral {

using Block = Eigen::MatrixXcd;

// A tensor after FFTs along modes 3..p: one complex n1 x n2 block per
// frequency multi-index (k3, ..., kp), flattened with k3 fastest.
class SpectralTensor {
 public:
  SpectralTensor() = default;
  SpectralTensor(Dims dims, std::vector<Block> blocks);

  const Dims& dims() const noexcept { return dims_; }
  Dims trailing_dims() const;
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const Block& block(std::size_t k) const { return blocks_[k]; }
  Block& block(std::size_t k) { return blocks_[k]; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  // Index of the block holding the conjugate frequency.
  std::size_t partner(std::size_t k) const;
  // Frobenius norm over all blocks.
  double norm() const;

 private:
  Dims dims_;
  std::vector<Block> blocks_;
};

// Flat index of the frequency (-k3, ..., -kp) mod (n3, ..., np).
std::size_t conjugate_partner(const Dims& trailing, std::size_t k);

SpectralTensor to_spectral(const DenseTensor& a);

// Inverse FFTs in descending mode order. An imaginary part up to
// tol * ||S|| is discarded; anything larger raises NumericalError.
DenseTensor from_spectral(const SpectralTensor& s, double tol = 1e-10);

// Overwrite every block above its partner with the partner's conjugate and
// make self-partnered blocks real, so the tensor represents real data.
void mirror_conjugates(SpectralTensor& s);

// max_k ||B_k - conj(B_partner(k))|| / ||S||.
double conjugate_symmetry_defect(const SpectralTensor& s);

// Runtime switch for the per-call symmetry check inside block_map. Enabled
// by default in builds without NDEBUG.
void set_symmetry_checks(bool enabled);
bool symmetry_checks_enabled();

using Kernel = std::function<Block(const Block&)>;
using BinaryKernel = std::function<Block(const Block&, const Block&)>;

// Applies `kernel` to one block of each conjugate pair and mirrors the
// result to the partner, which is valid for conjugation-equivariant kernels.
// Blocks are split across `workers` threads; the output is bitwise
// independent of the worker count. A tpinv::Error thrown by the kernel is
// rethrown with the block index attached.
SpectralTensor block_map(const SpectralTensor& s, const Kernel& kernel, unsigned workers = 1);
SpectralTensor block_map(const SpectralTensor& a, const SpectralTensor& b,
                         const BinaryKernel& kernel, unsigned workers = 1);

// ---- per-block factorizations ------------------------------------------

struct CholeskyFactor {
  // n x r with L * L^H = M. Rows taken in `pivots` order, followed by the
  // remaining rows, form a lower trapezoidal matrix with a real positive
  // diagonal.
  Block L;
  Eigen::Index rank = 0;
  double threshold = 0;               // absolute pivot threshold used
  std::vector<Eigen::Index> pivots;  // row chosen at each elimination step
};

struct HermitianEig {
  Eigen::VectorXd values;  // ascending
  Block vectors;           // unitary, columns match `values`
  int sweeps = 0;
};

struct Svd {
  Block U;                // m x k, k = min(m, n)
  Eigen::VectorXd sigma;  // nonnegative, non-increasing
  Block V;                // n x k
  int sweeps = 0;
};

struct Rref {
  Block R;                           // reduced row echelon form of the input
  Block E;                           // invertible, E * M = R
  std::vector<Eigen::Index> pivots;  // pivot column of each leading row
  double tol = 0;                    // relative pivot tolerance used
};

// Default relative pivot threshold for chol_rank_revealing: 1e3 * n * u.
double default_cholesky_eps(Eigen::Index n);
// Default relative pivot threshold for rref: 1e2 * max(m, n) * u.
double default_rref_tol(Eigen::Index m, Eigen::Index n);

// Rank-revealing Cholesky of a Hermitian PSD matrix with diagonal pivoting.
// Input is symmetrized. With threshold = max(eps * max diag(M), floor),
// elimination stops once the largest remaining pivot is <= threshold; a
// remaining pivot below -threshold raises DomainError. `floor` is an
// absolute level under which a caller treats pivots as zero, e.g. the
// roundoff floor of a whole tensor.
CholeskyFactor chol_rank_revealing(const Block& m, std::optional<double> eps = std::nullopt,
                                   double floor = 0.0);

// Cyclic Jacobi eigensolver. Throws DomainError for non-Hermitian input and
// NumericalError when the sweep cap is reached.
HermitianEig hermitian_eig(const Block& m, double hermitian_tol = 1e-10);

// One-sided Jacobi SVD.
Svd svd(const Block& m);

// Gauss-Jordan elimination with partial pivoting; a candidate pivot counts as
// zero when it is <= tol * max(max |entry| of the original column, scale).
Rref rref(const Block& m, std::optional<double> tol = std::nullopt, double scale = 0.0);

enum class FactorKind { cholesky_rank_revealing, hermitian_eig, svd, rref };

using Factor = std::variant<CholeskyFactor, HermitianEig, Svd, Rref>;

struct BlockFactorization {
  FactorKind kind = FactorKind::svd;
  std::vector<Factor> factors;
  std::vector<Eigen::Index> ranks;
  std::optional<double> tolerance;
};

BlockFactorization factorize(const SpectralTensor& s, FactorKind kind,
                             std::optional<double> tolerance = std::nullopt);

// Relative error of the factor against the block it came from: ||LL^H - M||,
// ||V diag V^H - M||, ||U S V^H - M|| or ||E M - R||, each over ||M||.
double reconstruction_residual(const Block& m, const Factor& f);

}  // namespace tpinv::spectral
