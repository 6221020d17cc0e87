#include "tpinv/gen_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "format.hpp"
#include "tpinv/error.hpp"

namespace tpinv {

namespace {

using spectral::Block;
using cplx = std::complex<double>;

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

double ratio(double num, double den) { return den <= kUnitRoundoff ? num : num / den; }

void require_square(const DenseTensor& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(what) + " requires square frontal slices");
  }
}

Dims strip(Dims d) {
  while (!d.empty() && d.back() == 1) d.pop_back();
  return d;
}

void require_weight_shape(const DenseTensor& w, std::size_t n, const DenseTensor& a,
                          const char* name) {
  if (w.rows() != n || w.cols() != n || strip(w.trailing_dims()) != strip(a.trailing_dims())) {
    throw ShapeError(std::string("weight ") + name + " does not conform to the operand");
  }
}

void validate_spd(const DenseTensor& w, const char* name, double tol) {
  if (w.rows() != w.cols()) {
    throw ShapeError(std::string("weight ") + name + " must have square frontal slices");
  }
  const auto s = spectral::to_spectral(w);
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    try {
      (void)block_inverse::sqrt_hpd(s.block(k), tol);
    } catch (const DomainError& e) {
      throw DomainError(std::string("weight ") + name + " is not symmetric positive definite: block " +
                        std::to_string(k) + ": " + e.what());
    }
  }
}

// Reference magnitudes shared by all blocks of a spectral tensor.
double max_block_norm(const spectral::SpectralTensor& s) {
  double v = 0.0;
  for (const auto& b : s.blocks()) v = std::max(v, b.norm());
  return v;
}

double max_entry(const spectral::SpectralTensor& s) {
  double v = 0.0;
  for (const auto& b : s.blocks()) {
    if (b.size()) v = std::max(v, b.cwiseAbs().maxCoeff());
  }
  return v;
}

// Largest diagonal entry over the Gram blocks M*M^H (rows) or M^H*M (cols).
double max_gram_diag(const spectral::SpectralTensor& s, bool rows) {
  double v = 0.0;
  for (const auto& b : s.blocks()) {
    if (b.size() == 0) continue;
    v = std::max(v, rows ? b.rowwise().squaredNorm().maxCoeff() : b.colwise().squaredNorm().maxCoeff());
  }
  return v;
}

// Default relative singular value cutoff of the SVD route.
double svd_rank_tol(std::size_t rows, std::size_t cols) {
  return 1e2 * static_cast<double>(std::max<std::size_t>({rows, cols, 1})) * kUnitRoundoff;
}

spectral::Kernel pinv_kernel(const InverseOptions& opts, const spectral::SpectralTensor& s) {
  const double sigma_ref = max_block_norm(s);
  if (opts.route == Route::svd) {
    return [tol = opts.rank_tol, sigma_ref](const Block& m) {
      return block_inverse::mp_svd(m, tol, sigma_ref);
    };
  }
  // Gram pivots are judged within their block; the tensor-wide zero floor is
  // the SVD route's cutoff squared, so both routes agree on which blocks
  // vanish.
  const double cutoff = svd_rank_tol(s.dims()[0], s.dims()[1]) * sigma_ref;
  return [tol = opts.rank_tol, fallback = opts.allow_fallback, sigma_ref,
          floor = cutoff * cutoff](const Block& m) {
    try {
      return block_inverse::mp_cholesky(m, tol, floor);
    } catch (const NumericalError&) {
      if (!fallback) throw;
      return block_inverse::mp_svd(m, std::nullopt, sigma_ref);
    }
  };
}

Block product(const Block& x, const Block& y) { return x * y; }

}  // namespace

namespace block_inverse {

Block mp_svd(const Block& m, std::optional<double> rank_tol, double scale) {
  const auto f = spectral::svd(m);
  const double t = rank_tol.value_or(svd_rank_tol(static_cast<std::size_t>(m.rows()),
                                                 static_cast<std::size_t>(m.cols())));
  Block x = Block::Zero(m.cols(), m.rows());
  if (f.sigma.size() == 0) return x;
  const double threshold = t * std::max(f.sigma(0), scale);
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (!(f.sigma(i) > threshold)) break;
    x.noalias() += (f.V.col(i) / f.sigma(i)) * f.U.col(i).adjoint();
  }
  return x;
}

Block mp_cholesky(const Block& m, std::optional<double> eps, double floor) {
  const Block g = m * m.adjoint();
  spectral::CholeskyFactor f;
  try {
    f = spectral::chol_rank_revealing(g, eps, floor);
  } catch (const DomainError& e) {
    // g is a Gram matrix, so a negative pivot can only come from rounding.
    throw NumericalError(std::string("Cholesky route broke down: ") + e.what());
  }
  if (f.rank == 0) return Block::Zero(m.cols(), m.rows());
  const Block k = f.L.adjoint() * f.L;
  const Eigen::LLT<Block> llt(k);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky route: inner Gram block is not positive definite");
  }
  const double rcond = llt.rcond();
  if (!(rcond > static_cast<double>(f.rank) * kUnitRoundoff)) {
    throw NumericalError("Cholesky route: inner Gram block is singular (rcond " +
                         detail::short_number(rcond) + ")");
  }
  const Block y = llt.solve(llt.solve(f.L.adjoint()));
  return m.adjoint() * (f.L * y);
}

Block inner(const Block& m, std::optional<double> tol, double free_value, double scale) {
  const auto f = spectral::rref(m, tol, scale);
  const Eigen::Index rows = m.rows(), cols = m.cols();
  const auto r = static_cast<Eigen::Index>(f.pivots.size());
  Block x = Block::Zero(cols, rows);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Eigen::Index i = 0; i < r; ++i) {
    x.row(f.pivots[i]) = f.E.row(i);
    is_pivot[static_cast<std::size_t>(f.pivots[i])] = true;
  }
  if (free_value != 0.0 && r < rows) {
    // Free block filled with `free_value`: every non-pivot row receives the
    // same combination of the trailing rows of E.
    const Eigen::RowVectorXcd tail = free_value * f.E.bottomRows(rows - r).colwise().sum();
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!is_pivot[static_cast<std::size_t>(j)]) x.row(j) = tail;
    }
  }
  return x;
}

Block sqrt_hpd(const Block& m, double spd_tol) {
  if (m.rows() != m.cols()) throw ShapeError("square root requires a square block");
  const auto eig = spectral::hermitian_eig(m);
  if (eig.values.size() == 0) return m;
  const double top = eig.values.cwiseAbs().maxCoeff();
  const double low = eig.values(0);
  if (!(low > spd_tol * top)) {
    throw DomainError("not positive definite (minimum eigenvalue " + detail::short_number(low) + ")");
  }
  const Eigen::VectorXcd root = eig.values.cwiseSqrt().cast<cplx>();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

Block inverse(const Block& m) {
  if (m.rows() != m.cols()) throw ShapeError("inverse requires a square block");
  const Eigen::FullPivLU<Block> lu(m);
  if (!lu.isInvertible()) throw DomainError("block is singular");
  return lu.inverse();
}

}  // namespace block_inverse

WeightPair::WeightPair(DenseTensor m, DenseTensor n, double spd_tol)
    : m_(std::move(m)), n_(std::move(n)) {
  validate_spd(m_, "M", spd_tol);
  validate_spd(n_, "N", spd_tol);
}

DenseTensor t_inverse(const DenseTensor& a, unsigned workers) {
  require_square(a, "t_inverse");
  return spectral::from_spectral(
      spectral::block_map(spectral::to_spectral(a), block_inverse::inverse, workers));
}

DenseTensor inner_inverse(const DenseTensor& a, const InverseOptions& opts) {
  const auto s = spectral::to_spectral(a);
  const double ref = max_entry(s);
  return spectral::from_spectral(spectral::block_map(
      s,
      [&](const Block& m) {
        return block_inverse::inner(m, opts.rank_tol, opts.inner_free_value, ref);
      },
      opts.workers));
}

DenseTensor mp_inverse(const DenseTensor& a, const InverseOptions& opts) {
  const auto s = spectral::to_spectral(a);
  DenseTensor x =
      spectral::from_spectral(spectral::block_map(s, pinv_kernel(opts, s), opts.workers));
  if (!opts.verify) return x;
  if (penrose_residuals(a, x, opts.residual_tol, opts.workers).all()) return x;
  if (opts.route == Route::cholesky && opts.allow_fallback) {
    InverseOptions svd_opts = opts;
    svd_opts.route = Route::svd;
    svd_opts.rank_tol.reset();
    x = spectral::from_spectral(spectral::block_map(s, pinv_kernel(svd_opts, s), opts.workers));
    if (penrose_residuals(a, x, opts.residual_tol, opts.workers).all()) return x;
  }
  throw NumericalError("Moore-Penrose inverse failed its Penrose post-check");
}

DenseTensor one_three_inverse(const DenseTensor& a, const InverseOptions& opts) {
  const auto s = spectral::to_spectral(a);
  const double ref = max_gram_diag(s, false);
  return spectral::from_spectral(spectral::block_map(
      s,
      [&](const Block& m) {
        const Block g = m.adjoint() * m;
        return Block(block_inverse::inner(g, opts.rank_tol, opts.inner_free_value, ref) *
                     m.adjoint());
      },
      opts.workers));
}

DenseTensor one_four_inverse(const DenseTensor& a, const InverseOptions& opts) {
  const auto s = spectral::to_spectral(a);
  const double ref = max_gram_diag(s, true);
  return spectral::from_spectral(spectral::block_map(
      s,
      [&](const Block& m) {
        const Block g = m * m.adjoint();
        return Block(m.adjoint() *
                     block_inverse::inner(g, opts.rank_tol, opts.inner_free_value, ref));
      },
      opts.workers));
}

DenseTensor spd_sqrt(const DenseTensor& a, const InverseOptions& opts) {
  require_square(a, "spd_sqrt");
  return spectral::from_spectral(spectral::block_map(
      spectral::to_spectral(a),
      [tol = opts.spd_tol](const Block& m) { return block_inverse::sqrt_hpd(m, tol); },
      opts.workers));
}

DenseTensor weighted_mp_inverse(const DenseTensor& a, const WeightPair& weights,
                                const InverseOptions& opts, InverseRoot root) {
  require_weight_shape(weights.M(), a.rows(), a, "M");
  require_weight_shape(weights.N(), a.cols(), a, "N");
  const unsigned w = opts.workers;
  const double tol = opts.spd_tol;

  const auto sa = spectral::to_spectral(a);
  const auto m_half = spectral::block_map(
      spectral::to_spectral(weights.M()),
      [tol](const Block& m) { return block_inverse::sqrt_hpd(m, tol); }, w);
  const auto n_neg_half = spectral::block_map(
      spectral::to_spectral(weights.N()),
      [tol, root](const Block& m) {
        if (root == InverseRoot::sqrt_of_inverse) {
          return block_inverse::sqrt_hpd(block_inverse::inverse(m), tol);
        }
        return block_inverse::inverse(block_inverse::sqrt_hpd(m, tol));
      },
      w);

  const auto scaled = spectral::block_map(spectral::block_map(m_half, sa, product, w), n_neg_half,
                                          product, w);
  const auto inner = spectral::block_map(scaled, pinv_kernel(opts, scaled), w);
  const auto y = spectral::block_map(spectral::block_map(n_neg_half, inner, product, w), m_half,
                                     product, w);
  return spectral::from_spectral(y);
}

PenroseReport weighted_residuals(const DenseTensor& a, const DenseTensor& y,
                                 const WeightPair& weights, double tol) {
  PenroseReport rep = penrose_residuals(a, y, tol);
  const DenseTensor may = tprod(weights.M(), tprod(a, y));
  const DenseTensor nya = tprod(weights.N(), tprod(y, a));
  rep.r3 = ratio(asymmetry(may), may.norm());
  rep.r4 = ratio(asymmetry(nya), nya.norm());
  rep.pass[2] = rep.r3 <= tol;
  rep.pass[3] = rep.r4 <= tol;
  return rep;
}

ReverseOrderReport reverse_order_law_check(const DenseTensor& a, const DenseTensor& b,
                                           const InverseOptions& opts,
                                           const ReverseOrderInputs& given) {
  const unsigned w = opts.workers;
  const DenseTensor a14 = given.a14.value_or(one_four_inverse(a, opts));
  const DenseTensor b14 = given.b14.value_or(one_four_inverse(b, opts));
  const DenseTensor a13 = given.a13.value_or(one_three_inverse(a, opts));
  const DenseTensor b13 = given.b13.value_or(one_three_inverse(b, opts));
  const DenseTensor bt = ttranspose(b);
  const DenseTensor ab = tprod(a, b, w);

  ReverseOrderReport rep;
  rep.cond14 = tprod(tprod(tprod(a14, a, w), b, w), bt, w);
  rep.cond13 = tprod(tprod(a, a13, w), tprod(bt, b, w), w);
  rep.cond14_asymmetry = asymmetry(rep.cond14);
  rep.cond14_norm = rep.cond14.norm();
  rep.cond13_asymmetry = asymmetry(rep.cond13);
  rep.cond13_norm = rep.cond13.norm();

  const DenseTensor rev14 = tprod(b14, a14, w);
  const DenseTensor rev13 = tprod(b13, a13, w);
  rep.reversed14 = penrose_residuals(ab, rev14, opts.residual_tol, w);
  rep.reversed13 = penrose_residuals(ab, rev13, opts.residual_tol, w);
  rep.reversed14_valid = rep.reversed14.pass[0] && rep.reversed14.pass[3];
  rep.reversed13_valid = rep.reversed13.pass[0] && rep.reversed13.pass[2];
  rep.reversed14_gap = relative_diff(rev14, one_four_inverse(ab, opts));
  rep.reversed13_gap = relative_diff(rev13, one_three_inverse(ab, opts));

  const DenseTensor abp = mp_inverse(ab, opts);
  const DenseTensor rev = tprod(mp_inverse(b, opts), mp_inverse(a, opts), w);
  rep.mp_gap = relative_diff(rev, abp);
  rep.mp_reverse_holds = rep.mp_gap <= opts.residual_tol;
  return rep;
}

MpIdentityReport mp_identity_suite(const DenseTensor& a, const InverseOptions& opts) {
  const unsigned w = opts.workers;
  const DenseTensor ap = mp_inverse(a, opts);
  const DenseTensor at = ttranspose(a);
  const DenseTensor atp = mp_inverse(at, opts);
  const DenseTensor ata = tprod(at, a, w);
  const DenseTensor aat = tprod(a, at, w);
  const DenseTensor ata_p = mp_inverse(ata, opts);
  const DenseTensor aat_p = mp_inverse(aat, opts);

  MpIdentityReport rep;
  rep.gram_left = relative_diff(tprod(ap, atp, w), ata_p);
  rep.gram_right = relative_diff(tprod(atp, ap, w), aat_p);
  rep.via_left = relative_diff(tprod(ata_p, at, w), ap);
  rep.via_right = relative_diff(tprod(at, aat_p, w), ap);
  rep.involution = relative_diff(mp_inverse(ap, opts), a);
  rep.transpose = relative_diff(atp, ttranspose(ap));

  const double na = a.norm();
  if (a.rows() == a.cols()) {
    rep.normality = ratio((aat - ata).norm(), na * na);
    rep.normal = rep.normality <= opts.residual_tol;
    const DenseTensor left = tprod(a, ap, w);
    rep.commutation = ratio((left - tprod(ap, a, w)).norm(), left.norm());
  }
  rep.partial_isometry = ratio((tprod(aat, a, w) - a).norm(), na);
  rep.transpose_gap = relative_diff(at, ap);
  return rep;
}

}  // namespace tpinv
