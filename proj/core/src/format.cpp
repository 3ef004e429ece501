#include "nrcm/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace nrcm {

std::string fixed12(double value) {
  if (value == 0.0 || std::abs(value) < 5e-13) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", value);
  return buf;
}

std::string exact(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nrcm
