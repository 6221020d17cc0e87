#pragma once

#include <iosfwd>
#include <string>

#include "tpinv/tensor.hpp"

namespace tpinv::io {

// Text tensor format:
//   TNS <p>
//   <n1> <n2> ... <np>
//   entries in storage order, one frontal-slice column per line and a
//   blank line between frontal slices, 17 significant digits.
// Readers accept any whitespace layout. Order-2 files load as (n1, n2, 1).
DenseTensor parse_tns(std::istream& in);
void format_tns(std::ostream& out, const DenseTensor& a);
DenseTensor read_tns(const std::string& path);
void write_tns(const std::string& path, const DenseTensor& a);

// Portable pixmap (P3 or P6). Loads into an h x w x 3 tensor with entries
// scaled to [0, 1]; saving clamps to [0, 1] and rounds to 8 bits.
DenseTensor read_ppm(const std::string& path);
void write_ppm(const std::string& path, const DenseTensor& image, bool binary = true);

// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

}  // namespace tpinv::io
