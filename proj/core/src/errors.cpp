#include "nrcm/errors.hpp"

#include <limits>

namespace nrcm {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += "; ";
    out += item;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

ValidationError::ValidationError(std::string violation)
    : Error(violation), violations_{std::move(violation)} {}

SingularityError::SingularityError(const std::string& what, double detuning)
    : Error(what), detuning_(detuning) {}

}  // namespace nrcm
