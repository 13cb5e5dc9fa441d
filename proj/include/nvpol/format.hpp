#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace nvpol::detail {

// 9 significant digits, the canonical rendering for reports and fingerprints
inline std::string format_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// fixed 6 decimals, used for coupling tables
inline std::string format_f6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

// quantize to the 9-significant-digit grid so emitted JSON numbers
// round-trip to exactly what the text reports show
inline double round_g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace nvpol::detail
