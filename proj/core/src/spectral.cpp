#include "tpinv/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <string>
#include <thread>

#include <unsupported/Eigen/FFT>

#include "tpinv/error.hpp"

namespace tpinv::spectral {

namespace {

using cplx = std::complex<double>;

#ifdef NDEBUG
std::atomic<bool> g_symmetry_checks{false};
#else
std::atomic<bool> g_symmetry_checks{true};
#endif

std::size_t product(const Dims& d) {
  std::size_t n = 1;
  for (auto v : d) n *= v;
  return n;
}

// In-place FFT of every tube along trailing mode `mode` (0-based within
// the trailing dims) of a buffer of `rho` contiguous blocks of `block` entries.
void transform_mode(std::vector<cplx>& buf, std::size_t block, const Dims& trailing,
                    std::size_t mode, bool inverse, Eigen::FFT<double>& fft) {
  const std::size_t len = trailing[mode];
  if (len == 1) return;  // also avoids a kissfft fault on length-1 plans
  std::size_t stride = block;
  for (std::size_t m = 0; m < mode; ++m) stride *= trailing[m];
  const std::size_t outer = buf.size() / (stride * len);
  std::vector<cplx> in(len), out(len);
  const auto n = static_cast<Eigen::Index>(len);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base0 = o * stride * len;
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t base = base0 + i;
      for (std::size_t t = 0; t < len; ++t) in[t] = buf[base + t * stride];
      if (inverse) {
        fft.inv(out.data(), in.data(), n);
      } else {
        fft.fwd(out.data(), in.data(), n);
      }
      for (std::size_t t = 0; t < len; ++t) buf[base + t * stride] = out[t];
    }
  }
}

void check_self_partners(const SpectralTensor& s) {
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    if (s.partner(k) != k) continue;
    const double imag = s.block(k).imag().norm();
    if (imag > 1e-12 * s.block(k).norm()) {
      throw NumericalError("kernel broke conjugate symmetry at self-conjugate block " +
                           std::to_string(k));
    }
  }
}

template <class Compute>
SpectralTensor run_blocks(std::size_t count, const Dims& trailing, Compute&& compute,
                          unsigned workers) {
  std::vector<std::size_t> canonical;
  for (std::size_t k = 0; k < count; ++k) {
    if (k <= conjugate_partner(trailing, k)) canonical.push_back(k);
  }
  std::vector<Block> out(count);
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t k = canonical[i];
      try {
        out[k] = compute(k);
      } catch (Error& e) {
        e.attach_block(k);
        throw;
      }
    }
  };

  const std::size_t n = canonical.size();
  const std::size_t w = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    run_range(0, n);
  } else {
    std::vector<std::exception_ptr> errors(w);
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < w; ++t) {
        const std::size_t lo = n * t / w, hi = n * (t + 1) / w;
        pool.emplace_back([&, t, lo, hi] {
          try {
            run_range(lo, hi);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    // The lowest failing chunk wins, so the reported block is deterministic.
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t k : canonical) {
    const std::size_t m = conjugate_partner(trailing, k);
    if (m != k) out[m] = out[k].conjugate();
  }
  if (count > 0) {
    for (std::size_t k = 1; k < count; ++k) {
      if (out[k].rows() != out[0].rows() || out[k].cols() != out[0].cols()) {
        throw ShapeError("block kernel returned blocks of different shapes");
      }
    }
  }
  Dims dims{count ? static_cast<std::size_t>(out[0].rows()) : 0,
            count ? static_cast<std::size_t>(out[0].cols()) : 0};
  dims.insert(dims.end(), trailing.begin(), trailing.end());
  SpectralTensor result(std::move(dims), std::move(out));
  if (g_symmetry_checks.load(std::memory_order_relaxed)) check_self_partners(result);
  return result;
}

}  // namespace

SpectralTensor::SpectralTensor(Dims dims, std::vector<Block> blocks)
    : dims_(std::move(dims)), blocks_(std::move(blocks)) {
  if (dims_.size() < 2) throw ShapeError("spectral tensor order must be at least 2");
  if (blocks_.size() != product(trailing_dims())) {
    throw ShapeError("spectral tensor block count does not match its trailing dims");
  }
  for (const auto& b : blocks_) {
    if (static_cast<std::size_t>(b.rows()) != dims_[0] ||
        static_cast<std::size_t>(b.cols()) != dims_[1]) {
      throw ShapeError("spectral block shape does not match dims");
    }
  }
}

Dims SpectralTensor::trailing_dims() const {
  return dims_.size() > 2 ? Dims(dims_.begin() + 2, dims_.end()) : Dims{};
}

std::size_t SpectralTensor::partner(std::size_t k) const {
  return conjugate_partner(trailing_dims(), k);
}

double SpectralTensor::norm() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return std::sqrt(s);
}

std::size_t conjugate_partner(const Dims& trailing, std::size_t k) {
  std::size_t out = 0, scale = 1;
  for (std::size_t n : trailing) {
    const std::size_t idx = k % n;
    k /= n;
    out += ((n - idx) % n) * scale;
    scale *= n;
  }
  return out;
}

SpectralTensor to_spectral(const DenseTensor& a) {
  const Dims trailing = a.trailing_dims();
  const std::size_t block = a.rows() * a.cols();
  const std::size_t rho = a.slice_count();
  std::vector<cplx> buf(a.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = {a.data()[i], 0.0};
  Eigen::FFT<double> fft;
  for (std::size_t m = 0; m < trailing.size(); ++m) transform_mode(buf, block, trailing, m, false, fft);

  const auto r = static_cast<Eigen::Index>(a.rows()), c = static_cast<Eigen::Index>(a.cols());
  std::vector<Block> blocks(rho);
  for (std::size_t k = 0; k < rho; ++k) {
    blocks[k] = Eigen::Map<const Block>(buf.data() + k * block, r, c);
  }
  SpectralTensor s(a.dims(), std::move(blocks));
  // The transform of real data is conjugate symmetric; make that exact.
  for (std::size_t k = 0; k < rho; ++k) {
    const std::size_t m = s.partner(k);
    if (m < k) continue;
    if (m == k) {
      s.block(k) = s.block(k).real().cast<cplx>();
    } else {
      Block avg = 0.5 * (s.block(k) + s.block(m).conjugate());
      s.block(m) = avg.conjugate();
      s.block(k) = std::move(avg);
    }
  }
  return s;
}

DenseTensor from_spectral(const SpectralTensor& s, double tol) {
  const Dims trailing = s.trailing_dims();
  const std::size_t block = s.dims()[0] * s.dims()[1];
  std::vector<cplx> buf(block * s.block_count());
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    Eigen::Map<Block>(buf.data() + k * block, s.block(k).rows(), s.block(k).cols()) = s.block(k);
  }
  Eigen::FFT<double> fft;
  for (std::size_t m = trailing.size(); m-- > 0;) transform_mode(buf, block, trailing, m, true, fft);

  double imag_sq = 0.0;
  std::vector<double> data(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    data[i] = buf[i].real();
    imag_sq += buf[i].imag() * buf[i].imag();
  }
  // Parseval: ||S|| = sqrt(rho) * ||real result||, so compare on that scale.
  const double limit = tol * s.norm() / std::sqrt(static_cast<double>(std::max<std::size_t>(s.block_count(), 1)));
  if (std::sqrt(imag_sq) > limit && std::sqrt(imag_sq) > 0.0) {
    throw NumericalError("inverse transform left an imaginary residual of " +
                         std::to_string(std::sqrt(imag_sq)) +
                         "; block set is not conjugate symmetric");
  }
  return DenseTensor(s.dims(), std::move(data));
}

void mirror_conjugates(SpectralTensor& s) {
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    const std::size_t m = s.partner(k);
    if (m == k) {
      s.block(k) = s.block(k).real().cast<cplx>();
    } else if (m > k) {
      s.block(m) = s.block(k).conjugate();
    }
  }
}

double conjugate_symmetry_defect(const SpectralTensor& s) {
  const double scale = s.norm();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < s.block_count(); ++k) {
    worst = std::max(worst, (s.block(k) - s.block(s.partner(k)).conjugate()).norm());
  }
  return worst / scale;
}

void set_symmetry_checks(bool enabled) { g_symmetry_checks.store(enabled); }
bool symmetry_checks_enabled() { return g_symmetry_checks.load(); }

SpectralTensor block_map(const SpectralTensor& s, const Kernel& kernel, unsigned workers) {
  return run_blocks(
      s.block_count(), s.trailing_dims(), [&](std::size_t k) { return kernel(s.block(k)); },
      workers);
}

SpectralTensor block_map(const SpectralTensor& a, const SpectralTensor& b,
                         const BinaryKernel& kernel, unsigned workers) {
  if (a.block_count() != b.block_count()) {
    throw ShapeError("block_map: operands have " + std::to_string(a.block_count()) + " and " +
                     std::to_string(b.block_count()) + " blocks");
  }
  auto stripped = [](Dims d) {
    while (!d.empty() && d.back() == 1) d.pop_back();
    return d;
  };
  if (stripped(a.trailing_dims()) != stripped(b.trailing_dims())) {
    throw ShapeError("block_map: operands have different trailing dimensions");
  }
  const Dims trailing = a.trailing_dims().size() >= b.trailing_dims().size() ? a.trailing_dims()
                                                                               : b.trailing_dims();
  return run_blocks(
      a.block_count(), trailing, [&](std::size_t k) { return kernel(a.block(k), b.block(k)); },
      workers);
}

}  // namespace tpinv::spectral
