#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "tpinv/error.hpp"
#include "tpinv/io.hpp"

namespace tpinv::io {

namespace {

// Header tokenizer that skips whitespace and '#' comments.
class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::string token() {
    skip();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      t += bytes_[pos_++];
    }
    if (t.empty()) throw IoError("PPM: truncated header");
    return t;
  }

  long number() {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw IoError("PPM: expected a number, found '" + t + "'");
    }
    return std::stol(t);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

DenseTensor read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  HeaderReader hdr(bytes);
  const std::string magic = hdr.token();
  if (magic != "P3" && magic != "P6") throw IoError(path + ": not a P3/P6 pixmap");
  const long w = hdr.number(), h = hdr.number(), maxval = hdr.number();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError(path + ": invalid pixmap header");
  }
  const auto uw = static_cast<std::size_t>(w), uh = static_cast<std::size_t>(h);
  DenseTensor img({uh, uw, 3});
  const double scale = 1.0 / static_cast<double>(maxval);

  if (magic == "P3") {
    for (std::size_t i = 0; i < uh; ++i) {
      for (std::size_t j = 0; j < uw; ++j) {
        for (std::size_t c = 0; c < 3; ++c) {
          const long v = hdr.number();
          if (v > maxval) throw IoError(path + ": sample exceeds maxval");
          img(i, j, c) = static_cast<double>(v) * scale;
        }
      }
    }
    return img;
  }

  hdr.advance(1);  // single whitespace byte after maxval
  const std::size_t width = maxval > 255 ? 2 : 1;
  const std::size_t need = uw * uh * 3 * width;
  if (bytes.size() < hdr.pos() + need) throw IoError(path + ": truncated pixel data");
  const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + hdr.pos());
  for (std::size_t i = 0; i < uh; ++i) {
    for (std::size_t j = 0; j < uw; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t k = ((i * uw + j) * 3 + c) * width;
        const unsigned v = width == 2 ? (px[k] << 8u) | px[k + 1] : px[k];
        img(i, j, c) = static_cast<double>(v) * scale;
      }
    }
  }
  return img;
}

void write_ppm(const std::string& path, const DenseTensor& image, bool binary) {
  if (image.order() != 3 || image.dims()[2] != 3) {
    throw ShapeError("PPM export needs an h x w x 3 tensor");
  }
  const std::size_t h = image.rows(), w = image.cols();
  auto quantize = [](double v) {
    const double c = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    return static_cast<unsigned>(std::lround(c * 255.0));
  };
  std::string out = std::string(binary ? "P6" : "P3") + "\n" + std::to_string(w) + " " +
                    std::to_string(h) + "\n255\n";
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        const unsigned q = quantize(image(i, j, c));
        if (binary) {
          out += static_cast<char>(q);
        } else {
          out += std::to_string(q);
          out += (c == 2 ? '\n' : ' ');
        }
      }
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << out;
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace tpinv::io
