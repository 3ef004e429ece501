#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nrcm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: a malformed system, netlist, config file or bounds.
/// Carries every violation found, not only the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  explicit ValidationError(std::string violation);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// A linear system that cannot be solved reliably: an undamped resonance in
/// the mode response, or a lossless loop with unit round-trip gain in a netlist.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double detuning);

  /// Probe detuning (rad/s) at which the singularity was hit; NaN when the
  /// failing system is frequency independent.
  double detuning() const noexcept { return detuning_; }

 private:
  double detuning_;
};

/// Frame transformations that cannot exist (degenerate port frequencies).
class GaugeError : public Error {
 public:
  using Error::Error;
};

}  // namespace nrcm
