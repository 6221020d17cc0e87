#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "tpinv/gen_inverse.hpp"
#include "tpinv/tensor.hpp"

namespace tpinv::deblur {

using ChannelWeights = std::array<double, 3>;

// Symmetric banded Toeplitz matrix with entries
// exp(-(i-j)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)) for |i-j| <= band.
Eigen::MatrixXd gaussian_toeplitz(std::size_t n, double sigma, std::size_t band);

// Circulant 3x3 channel-mixing matrix [[c1,c3,c2],[c2,c1,c3],[c3,c2,c1]].
Eigen::Matrix3d cross_channel_matrix(double c1, double c2, double c3);

// Two-sided colour blur B = A * X * C with A(:,:,k) = c_k * Av and C holding
// Ah^T in its first frontal slice.
struct BlurModel {
  std::size_t n = 0;
  double sigma = 0.0;
  std::size_t band = 0;
  ChannelWeights c{};
  Eigen::MatrixXd Av, Ah;
  DenseTensor A, C;
};

BlurModel build_blur_model(std::size_t n, double sigma, std::size_t band, const ChannelWeights& c);

// Zero-mean Gaussian noise of the given variance. Samples come from
// std::mt19937_64 seeded with `seed`, mapped to (0, 1] with 53-bit
// resolution and paired through the Box-Muller transform, filling entries
// in storage order.
DenseTensor gaussian_noise(const Dims& dims, double variance, std::uint64_t seed);

DenseTensor blur(const DenseTensor& x, const BlurModel& model, double noise_var,
                 std::uint64_t seed, unsigned workers = 1);

struct DeblurOptions {
  DeblurOptions() { inverse.route = Route::svd; }
  InverseOptions inverse;
  // Relative cutoff on spectral singular values of A and C; implies the SVD
  // route. Unset means plain Moore-Penrose inversion.
  std::optional<double> truncation;
};

// Inverses of the blur operators, reusable across many blurred images.
struct Reconstruction {
  DenseTensor A_pinv, C_pinv;
  PenroseReport penrose_A, penrose_C;
};

Reconstruction prepare_reconstruction(const BlurModel& model, const DeblurOptions& opts = {});
DenseTensor apply_reconstruction(const Reconstruction& r, const DenseTensor& b,
                                 unsigned workers = 1);

struct DeblurResult {
  DenseTensor estimate;
  PenroseReport penrose_A, penrose_C;
};

DeblurResult deblur(const DenseTensor& b, const BlurModel& model, const DeblurOptions& opts = {});

// 10 log10(1 / mse) for [0, 1] images; +inf when the images coincide.
double psnr(const DenseTensor& x, const DenseTensor& reference);
// ||x - reference|| / ||reference||.
double rel_error(const DenseTensor& x, const DenseTensor& reference);

}  // namespace tpinv::deblur
