#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace qgc {

// Library-wide error type. Config parsing failures get their own subclass so
// the CLI can map them to a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr long double kPiL = std::numbers::pi_v<long double>;

}  // namespace qgc
