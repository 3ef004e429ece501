#pragma once

#include <string>
#include <string_view>

namespace nrcm {

/// Fixed-point with 12 decimals; negative zero is printed as zero.
std::string fixed12(double value);

/// Shortest text that parses back to exactly `value`.
std::string exact(double value);

/// 64-bit FNV-1a hex digest, used to fingerprint config files.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace nrcm
