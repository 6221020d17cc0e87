#pragma once

#include <limits>
#include <optional>

#include "tpinv/spectral.hpp"
#include "tpinv/tensor.hpp"

namespace tpinv {

enum class Route { cholesky, svd };

struct InverseOptions {
  Route route = Route::cholesky;
  // Relative rank threshold. The SVD route and inner inverses apply it
  // against a reference taken over all blocks, so rank decisions follow the
  // scale of the whole tensor. The Cholesky route applies it to each Gram
  // block's own diagonal, under a tensor-wide zero floor matching the SVD
  // route. When unset each kernel uses its own default: the Cholesky pivot
  // threshold, 1e2 * max(m, n) * u for singular values, and the rref pivot
  // threshold for inner inverses.
  std::optional<double> rank_tol;
  // Tolerance for Penrose post-checks.
  double residual_tol = 1e-8;
  // Check the Penrose residuals of mp_inverse and throw when they fail.
  bool verify = false;
  // Retry on the SVD route when the Cholesky route fails.
  bool allow_fallback = true;
  // Value of every entry of the free block in inner_inverse; 0 gives a
  // {1,2}-inverse.
  double inner_free_value = 0.0;
  // Relative eigenvalue floor for positive definiteness of weights and
  // square-root inputs.
  double spd_tol = 1e-12;
  unsigned workers = 1;
};

// How N^{-1/2} is formed inside weighted_mp_inverse.
enum class InverseRoot { sqrt_of_inverse, inverse_of_sqrt };

// Symmetric positive definite weights: M acts on the row space of A, N on
// the column space.
class WeightPair {
 public:
  WeightPair(DenseTensor m, DenseTensor n, double spd_tol = 1e-12);
  const DenseTensor& M() const noexcept { return m_; }
  const DenseTensor& N() const noexcept { return n_; }

 private:
  DenseTensor m_, n_;
};

DenseTensor t_inverse(const DenseTensor& a, unsigned workers = 1);
DenseTensor inner_inverse(const DenseTensor& a, const InverseOptions& opts = {});
DenseTensor mp_inverse(const DenseTensor& a, const InverseOptions& opts = {});
DenseTensor one_three_inverse(const DenseTensor& a, const InverseOptions& opts = {});
DenseTensor one_four_inverse(const DenseTensor& a, const InverseOptions& opts = {});
DenseTensor spd_sqrt(const DenseTensor& a, const InverseOptions& opts = {});
DenseTensor weighted_mp_inverse(const DenseTensor& a, const WeightPair& weights,
                                const InverseOptions& opts = {},
                                InverseRoot root = InverseRoot::sqrt_of_inverse);

// r1, r2 as in penrose_residuals; r3, r4 measure the symmetry of M*A*Y and
// N*Y*A.
PenroseReport weighted_residuals(const DenseTensor& a, const DenseTensor& y,
                                 const WeightPair& weights, double tol = 1e-8);

// Externally supplied one-sided inverses, e.g. worked example values.
struct ReverseOrderInputs {
  std::optional<DenseTensor> a13, b13, a14, b14;
};

struct ReverseOrderReport {
  // X*A*B*B^T with X = A^{(1,4)}, and A*Y*B^T*B with Y = A^{(1,3)}.
  DenseTensor cond14, cond13;
  double cond14_asymmetry = 0, cond14_norm = 0;
  double cond13_asymmetry = 0, cond13_norm = 0;
  // Residuals of B^{(1,4)}*A^{(1,4)} and B^{(1,3)}*A^{(1,3)} as inverses of A*B.
  PenroseReport reversed14, reversed13;
  bool reversed14_valid = false;  // conditions (1) and (4)
  bool reversed13_valid = false;  // conditions (1) and (3)
  // Relative gap to the inverse of A*B computed directly.
  double reversed14_gap = 0, reversed13_gap = 0;
  double mp_gap = 0;  // ||(A*B)^+ - B^+ * A^+|| / ||(A*B)^+||
  bool mp_reverse_holds = false;
};

ReverseOrderReport reverse_order_law_check(const DenseTensor& a, const DenseTensor& b,
                                           const InverseOptions& opts = {},
                                           const ReverseOrderInputs& given = {});

struct MpIdentityReport {
  double gram_left = 0;     // (A^T*A)^+ vs A^+ * (A^T)^+
  double gram_right = 0;    // (A*A^T)^+ vs (A^T)^+ * A^+
  double via_left = 0;      // A^+ vs (A^T*A)^+ * A^T
  double via_right = 0;     // A^+ vs A^T * (A*A^T)^+
  double involution = 0;    // (A^+)^+ vs A
  double transpose = 0;     // (A^T)^+ vs (A^+)^T
  // Square frontal slices only; NaN otherwise.
  double normality = std::numeric_limits<double>::quiet_NaN();    // ||A*A^T - A^T*A|| / ||A||^2
  bool normal = false;                                              // normality <= residual_tol
  double commutation = std::numeric_limits<double>::quiet_NaN();  // ||A*A^+ - A^+*A|| / ||A*A^+||
  double partial_isometry = 0;  // ||A*A^T*A - A|| / ||A||
  double transpose_gap = 0;     // ||A^+ - A^T|| / ||A^+||
};

MpIdentityReport mp_identity_suite(const DenseTensor& a, const InverseOptions& opts = {});

// Per-block kernels behind the tensor-level functions.
namespace block_inverse {

using spectral::Block;

// `scale` is an optional common reference magnitude. Rank decisions use the
// larger of it and the block's own magnitude, so tensor-level callers can
// judge every spectral block against the whole tensor: a block that is zero
// up to FFT roundoff then counts as zero.

// Singular values <= rank_tol * max(sigma_max, scale) are dropped.
Block mp_svd(const Block& m, std::optional<double> rank_tol = std::nullopt, double scale = 0.0);
// Pivots of the Gram block M*M^H are judged against its own diagonal with
// `eps` and dropped outright below `floor` (Gram units). Throws
// NumericalError when the Gram factorization breaks down or the inner Gram
// solve is singular.
Block mp_cholesky(const Block& m, std::optional<double> eps = std::nullopt, double floor = 0.0);
Block inner(const Block& m, std::optional<double> tol = std::nullopt, double free_value = 0.0,
            double scale = 0.0);
// Principal square root of a Hermitian positive definite block.
Block sqrt_hpd(const Block& m, double spd_tol = 1e-12);
// Throws DomainError for a singular block.
Block inverse(const Block& m);

}  // namespace block_inverse

}  // namespace tpinv
