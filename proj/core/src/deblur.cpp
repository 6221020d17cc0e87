#include "tpinv/deblur.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "tpinv/error.hpp"

namespace tpinv::deblur {

namespace {

void require_model_shape(const DenseTensor& x, const BlurModel& model) {
  if (x.order() != 3 || x.rows() != model.n || x.cols() != model.n || x.dims()[2] != 3) {
    throw ShapeError("image must be " + std::to_string(model.n) + "x" + std::to_string(model.n) +
                     "x3 to match the blur model");
  }
}

}  // namespace

Eigen::MatrixXd gaussian_toeplitz(std::size_t n, double sigma, std::size_t band) {
  if (n == 0) throw DomainError("blur size must be positive");
  if (!(sigma > 0.0)) throw DomainError("blur width sigma must be positive");
  if (band >= n) throw DomainError("blur band must be smaller than the image size");
  const double scale = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  const auto m = static_cast<Eigen::Index>(n);
  const auto b = static_cast<Eigen::Index>(band);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = std::max<Eigen::Index>(0, j - b); i <= std::min(m - 1, j + b); ++i) {
      const double d = static_cast<double>(i - j);
      t(i, j) = scale * std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  return t;
}

Eigen::Matrix3d cross_channel_matrix(double c1, double c2, double c3) {
  if (std::abs(c1 + c2 + c3 - 1.0) > 1e-12) {
    throw DomainError("cross-channel weights must sum to 1");
  }
  Eigen::Matrix3d m;
  m << c1, c3, c2,
       c2, c1, c3,
       c3, c2, c1;
  return m;
}

BlurModel build_blur_model(std::size_t n, double sigma, std::size_t band, const ChannelWeights& c) {
  (void)cross_channel_matrix(c[0], c[1], c[2]);
  BlurModel m;
  m.n = n;
  m.sigma = sigma;
  m.band = band;
  m.c = c;
  m.Av = gaussian_toeplitz(n, sigma, band);
  m.Ah = m.Av;
  m.A = DenseTensor({n, n, 3});
  m.C = DenseTensor({n, n, 3});
  for (std::size_t k = 0; k < 3; ++k) m.A.slice(k) = c[k] * m.Av;
  m.C.slice(0) = m.Ah.transpose();
  return m;
}

DenseTensor gaussian_noise(const Dims& dims, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw DomainError("noise variance must be nonnegative");
  DenseTensor out(dims);
  if (variance == 0.0) return out;
  std::mt19937_64 gen(seed);
  auto uniform = [&gen] {
    // (0, 1]: never zero, so the logarithm below is finite.
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
  };
  const double sd = std::sqrt(variance);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    data[i] = sd * r * std::cos(theta);
    if (i + 1 < data.size()) data[i + 1] = sd * r * std::sin(theta);
  }
  return out;
}

DenseTensor blur(const DenseTensor& x, const BlurModel& model, double noise_var,
                 std::uint64_t seed, unsigned workers) {
  require_model_shape(x, model);
  DenseTensor b = tprod(tprod(model.A, x, workers), model.C, workers);
  if (noise_var > 0.0) b += gaussian_noise(b.dims(), noise_var, seed);
  else if (noise_var < 0.0) throw DomainError("noise variance must be nonnegative");
  return b;
}

Reconstruction prepare_reconstruction(const BlurModel& model, const DeblurOptions& opts) {
  InverseOptions inv = opts.inverse;
  if (opts.truncation) {
    inv.route = Route::svd;
    inv.rank_tol = *opts.truncation;
  }
  Reconstruction r;
  r.A_pinv = mp_inverse(model.A, inv);
  r.C_pinv = mp_inverse(model.C, inv);
  r.penrose_A = penrose_residuals(model.A, r.A_pinv, inv.residual_tol, inv.workers);
  r.penrose_C = penrose_residuals(model.C, r.C_pinv, inv.residual_tol, inv.workers);
  return r;
}

DenseTensor apply_reconstruction(const Reconstruction& r, const DenseTensor& b, unsigned workers) {
  return tprod(tprod(r.A_pinv, b, workers), r.C_pinv, workers);
}

DeblurResult deblur(const DenseTensor& b, const BlurModel& model, const DeblurOptions& opts) {
  require_model_shape(b, model);
  Reconstruction r = prepare_reconstruction(model, opts);
  DeblurResult out{apply_reconstruction(r, b, opts.inverse.workers), r.penrose_A, r.penrose_C};
  return out;
}

double psnr(const DenseTensor& x, const DenseTensor& reference) {
  const double err = (x - reference).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = err * err / static_cast<double>(x.size());
  return 10.0 * std::log10(1.0 / mse);
}

double rel_error(const DenseTensor& x, const DenseTensor& reference) {
  const double den = reference.norm();
  const double err = (x - reference).norm();
  return den == 0.0 ? err : err / den;
}

}  // namespace tpinv::deblur
