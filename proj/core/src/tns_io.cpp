#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tpinv/error.hpp"
#include "tpinv/io.hpp"

namespace tpinv::io {

namespace {

std::size_t parse_extent(const std::string& tok) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw IoError("TNS: invalid dimension '" + tok + "'");
  }
  if (used != tok.size() || v <= 0) throw IoError("TNS: invalid dimension '" + tok + "'");
  return static_cast<std::size_t>(v);
}

double parse_value(const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw IoError("TNS: invalid number '" + tok + "'");
  }
  if (used != tok.size()) throw IoError("TNS: invalid number '" + tok + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DenseTensor parse_tns(std::istream& in) {
  std::string tok;
  if (!(in >> tok) || tok != "TNS") throw IoError("TNS: missing 'TNS' header");
  if (!(in >> tok)) throw IoError("TNS: missing order");
  const std::size_t p = parse_extent(tok);
  if (p < 2) throw IoError("TNS: order must be at least 2");
  Dims dims(p);
  for (auto& d : dims) {
    if (!(in >> tok)) throw IoError("TNS: truncated dimension line");
    d = parse_extent(tok);
  }
  if (p == 2) dims.push_back(1);
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<double> data;
  data.reserve(total);
  while (in >> tok) {
    if (data.size() == total) throw IoError("TNS: more entries than the dimensions allow");
    data.push_back(parse_value(tok));
  }
  if (data.size() != total) {
    throw IoError("TNS: expected " + std::to_string(total) + " entries, found " +
                  std::to_string(data.size()));
  }
  return DenseTensor(std::move(dims), std::move(data));
}

void format_tns(std::ostream& out, const DenseTensor& a) {
  out << "TNS " << a.order() << '\n';
  for (std::size_t i = 0; i < a.order(); ++i) out << (i ? " " : "") << a.dims()[i];
  out << '\n';
  const std::size_t rows = a.rows(), cols = a.cols();
  for (std::size_t s = 0; s < a.slice_count(); ++s) {
    if (s) out << '\n';
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < rows; ++i) out << (i ? " " : "") << format_double(a(i, j, s));
      out << '\n';
    }
  }
}

DenseTensor read_tns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return parse_tns(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_tns(const std::string& path, const DenseTensor& a) {
  std::ostringstream buf;
  format_tns(buf, a);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << buf.str();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace tpinv::io
