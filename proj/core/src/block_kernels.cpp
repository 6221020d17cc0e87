#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "format.hpp"
#include "tpinv/error.hpp"
#include "tpinv/spectral.hpp"

namespace tpinv::spectral {

namespace {

using cplx = std::complex<double>;
using Eigen::Index;

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;
constexpr int kMaxSweeps = 100;

void require_square(const Block& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + " requires a square block, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Two-sided Jacobi rotation G = [[c, s], [-conj(e) s, conj(e) c]] chosen so
// that G^H [[a, b], [conj(b), d]] G is diagonal, with e = b / |b|.
struct Rotation {
  cplx gpp, gpq, gqp, gqq;
};

Rotation jacobi_rotation(double a, cplx b, double d) {
  const double mag = std::abs(b);
  const double tau = (d - a) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx ec = std::conj(b / mag);
  return {cplx(c, 0.0), cplx(s, 0.0), -ec * s, ec * c};
}

// Columns p, q of X become X * G restricted to those columns.
void rotate_columns(Block& x, Index p, Index q, const Rotation& g) {
  for (Index k = 0; k < x.rows(); ++k) {
    const cplx xp = x(k, p), xq = x(k, q);
    x(k, p) = xp * g.gpp + xq * g.gqp;
    x(k, q) = xp * g.gpq + xq * g.gqq;
  }
}

void rotate_rows_adjoint(Block& x, Index p, Index q, const Rotation& g) {
  for (Index k = 0; k < x.cols(); ++k) {
    const cplx xp = x(p, k), xq = x(q, k);
    x(p, k) = std::conj(g.gpp) * xp + std::conj(g.gqp) * xq;
    x(q, k) = std::conj(g.gpq) * xp + std::conj(g.gqq) * xq;
  }
}

double off_diagonal_norm(const Block& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

std::string condition_note(const Eigen::VectorXd& magnitudes) {
  const double hi = magnitudes.size() ? magnitudes.cwiseAbs().maxCoeff() : 0.0;
  const double lo = magnitudes.size() ? magnitudes.cwiseAbs().minCoeff() : 0.0;
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", cond);
  return std::string(" (condition estimate ") + buf + ")";
}

}  // namespace

double default_cholesky_eps(Index n) {
  return 1e3 * static_cast<double>(std::max<Index>(n, 1)) * kUnitRoundoff;
}

double default_rref_tol(Index m, Index n) {
  return 1e2 * static_cast<double>(std::max<Index>({m, n, 1})) * kUnitRoundoff;
}

CholeskyFactor chol_rank_revealing(const Block& m, std::optional<double> eps, double floor) {
  require_square(m, "chol_rank_revealing");
  const Index n = m.rows();
  const double e = eps.value_or(default_cholesky_eps(n));
  if (!(e >= 0.0)) throw DomainError("Cholesky pivot tolerance must be nonnegative");
  Block w = 0.5 * (m + m.adjoint());
  const double max_diag = n ? w.diagonal().real().maxCoeff() : 0.0;
  const double threshold = std::max({e * max_diag, floor, 0.0});

  // Right-looking elimination with diagonal pivoting; w holds the Schur
  // complement in pivoted coordinates.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Block l = Block::Zero(n, n);
  Index r = 0;
  for (; r < n; ++r) {
    Index best = r;
    for (Index i = r + 1; i < n; ++i) {
      if (w(i, i).real() > w(best, best).real()) best = i;
    }
    const double pivot = w(best, best).real();
    if (!(pivot > threshold && pivot > 0.0)) break;
    if (best != r) {
      w.row(r).swap(w.row(best));
      w.col(r).swap(w.col(best));
      l.row(r).swap(l.row(best));
      std::swap(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(best)]);
    }
    const double d = std::sqrt(pivot);
    const Index rest = n - r - 1;
    l(r, r) = cplx(d, 0.0);
    l.col(r).tail(rest) = w.col(r).tail(rest) / d;
    w.bottomRightCorner(rest, rest).noalias() -= l.col(r).tail(rest) * l.col(r).tail(rest).adjoint();
  }
  for (Index i = r; i < n; ++i) {
    const double pivot = w(i, i).real();
    if (pivot < -threshold) {
      throw DomainError("matrix is not positive semidefinite (pivot " + detail::short_number(pivot) +
                        " at column " + std::to_string(perm[static_cast<std::size_t>(i)]) +
                        ", threshold " + detail::short_number(threshold) + ")");
    }
  }

  CholeskyFactor out;
  out.L = Block::Zero(n, r);
  for (Index i = 0; i < n; ++i) out.L.row(perm[static_cast<std::size_t>(i)]) = l.row(i).head(r);
  out.rank = r;
  out.threshold = threshold;
  out.pivots.assign(perm.begin(), perm.begin() + r);
  return out;
}

HermitianEig hermitian_eig(const Block& m, double hermitian_tol) {
  require_square(m, "hermitian_eig");
  const Index n = m.rows();
  const double norm = m.norm();
  if ((m - m.adjoint()).norm() > hermitian_tol * norm) {
    throw DomainError("hermitian_eig: input is not Hermitian");
  }
  Block a = 0.5 * (m + m.adjoint());
  Block v = Block::Identity(n, n);
  const double target = static_cast<double>(std::max<Index>(n, 1)) * kUnitRoundoff * norm;

  int sweep = 0;
  for (;; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    if (sweep == kMaxSweeps) {
      throw NumericalError("hermitian_eig did not converge in " + std::to_string(kMaxSweeps) +
                           " sweeps" + condition_note(a.diagonal().real()));
    }
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const cplx b = a(p, q);
        if (b == cplx(0.0, 0.0)) continue;
        const Rotation g = jacobi_rotation(a(p, p).real(), b, a(q, q).real());
        rotate_columns(a, p, q, g);
        rotate_rows_adjoint(a, p, q, g);
        rotate_columns(v, p, q, g);
        a(p, q) = a(q, p) = cplx(0.0, 0.0);
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

Svd svd(const Block& m) {
  if (m.rows() < m.cols()) {
    Svd t = svd(m.adjoint());
    std::swap(t.U, t.V);
    return t;
  }
  const Index rows = m.rows(), n = m.cols();
  Block u = m;
  Block v = Block::Identity(n, n);
  const double tol = static_cast<double>(std::max<Index>(rows, 1)) * kUnitRoundoff;
  // Columns at roundoff level of the whole matrix are left alone: rotating
  // them against each other can cycle on rounding noise.
  const double negligible = std::pow(kUnitRoundoff * m.norm(), 2);

  int sweep = 0;
  for (;; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double alpha = u.col(p).squaredNorm();
        const double beta = u.col(q).squaredNorm();
        if (std::min(alpha, beta) <= negligible) continue;
        const cplx gamma = u.col(p).dot(u.col(q));
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Rotation r = jacobi_rotation(alpha, gamma, beta);
        rotate_columns(u, p, q, r);
        rotate_columns(v, p, q, r);
      }
    }
    if (!rotated) break;
    if (sweep + 1 == kMaxSweeps) {
      throw NumericalError("svd did not converge in " + std::to_string(kMaxSweeps) + " sweeps" +
                           condition_note(u.colwise().norm().transpose()));
    }
  }

  Eigen::VectorXd norms = u.colwise().norm().transpose();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return norms(i) > norms(j); });
  Svd out;
  out.U = Block::Zero(rows, n);
  out.V.resize(n, n);
  out.sigma.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index j = order[k];
    out.sigma(k) = norms(j);
    if (norms(j) > 0.0) out.U.col(k) = u.col(j) / norms(j);
    out.V.col(k) = v.col(j);
  }
  out.sweeps = sweep;
  return out;
}

Rref rref(const Block& m, std::optional<double> tol, double scale) {
  const Index rows = m.rows(), cols = m.cols();
  const double t = tol.value_or(default_rref_tol(rows, cols));
  if (!(t >= 0.0)) throw DomainError("rref tolerance must be nonnegative");
  Rref out;
  out.tol = t;
  out.R = m;
  out.E = Block::Identity(rows, rows);
  Block& r = out.R;
  Block& e = out.E;

  Index row = 0;
  for (Index col = 0; col < cols && row < rows; ++col) {
    const double threshold = t * std::max(m.col(col).cwiseAbs().maxCoeff(), scale);
    Index piv = row;
    double best = std::abs(r(row, col));
    for (Index i = row + 1; i < rows; ++i) {
      const double mag = std::abs(r(i, col));
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (best == 0.0 || best <= threshold) {
      r.col(col).tail(rows - row).setZero();
      continue;
    }
    if (piv != row) {
      r.row(row).swap(r.row(piv));
      e.row(row).swap(e.row(piv));
    }
    const cplx scale = cplx(1.0, 0.0) / r(row, col);
    r.row(row) *= scale;
    e.row(row) *= scale;
    r(row, col) = cplx(1.0, 0.0);
    for (Index i = 0; i < rows; ++i) {
      if (i == row) continue;
      const cplx f = r(i, col);
      if (f == cplx(0.0, 0.0)) continue;
      r.row(i) -= f * r.row(row);
      e.row(i) -= f * e.row(row);
      r(i, col) = cplx(0.0, 0.0);
    }
    out.pivots.push_back(col);
    ++row;
  }
  return out;
}

BlockFactorization factorize(const SpectralTensor& s, FactorKind kind,
                             std::optional<double> tolerance) {
  BlockFactorization out;
  out.kind = kind;
  out.tolerance = tolerance;
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    const Block& m = s.block(k);
    try {
      switch (kind) {
        case FactorKind::cholesky_rank_revealing: {
          auto f = chol_rank_revealing(m, tolerance);
          out.ranks.push_back(f.rank);
          out.factors.emplace_back(std::move(f));
          break;
        }
        case FactorKind::hermitian_eig: {
          auto f = hermitian_eig(m);
          const double t = tolerance.value_or(default_rref_tol(m.rows(), m.cols()));
          const double top = f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
          out.ranks.push_back((f.values.array().abs() > t * top).count());
          out.factors.emplace_back(std::move(f));
          break;
        }
        case FactorKind::svd: {
          auto f = svd(m);
          const double t = tolerance.value_or(default_rref_tol(m.rows(), m.cols()));
          const double top = f.sigma.size() ? f.sigma(0) : 0.0;
          out.ranks.push_back((f.sigma.array() > t * top).count());
          out.factors.emplace_back(std::move(f));
          break;
        }
        case FactorKind::rref: {
          auto f = rref(m, tolerance);
          out.ranks.push_back(static_cast<Index>(f.pivots.size()));
          out.factors.emplace_back(std::move(f));
          break;
        }
      }
    } catch (Error& err) {
      err.attach_block(k);
      throw;
    }
  }
  return out;
}

double reconstruction_residual(const Block& m, const Factor& f) {
  const double scale = m.norm();
  const double den = scale <= kUnitRoundoff ? 1.0 : scale;
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CholeskyFactor>) {
          return (x.L * x.L.adjoint() - m).norm() / den;
        } else if constexpr (std::is_same_v<T, HermitianEig>) {
          return (x.vectors * x.values.template cast<cplx>().asDiagonal() * x.vectors.adjoint() - m).norm() /
                 den;
        } else if constexpr (std::is_same_v<T, Svd>) {
          return (x.U * x.sigma.template cast<cplx>().asDiagonal() * x.V.adjoint() - m).norm() / den;
        } else {
          return (x.E * m - x.R).norm() / den;
        }
      },
      f);
}

}  // namespace tpinv::spectral
