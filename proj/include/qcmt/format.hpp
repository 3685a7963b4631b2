#pragma once

#include <charconv>
#include <complex>
#include <string>
#include <system_error>

namespace qcmt {

/// Shortest round-trip decimal for `x`, locale independent. Negative zero
/// prints as "0".
inline std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline std::string format_complex(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double(z.real());
  std::string out = "(" + format_double(z.real());
  out += z.imag() < 0 ? "-" : "+";
  out += format_double(std::abs(z.imag())) + "i)";
  return out;
}

}  // namespace qcmt
