#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace duopath {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEps = 1e-12;

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, sizes fixed at setup time, unsupported modes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File and format problems (WAV parsing, missing data).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Violations of per-frame contracts (out-of-order frames, size drift).
class StreamError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

inline void require_config(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

inline void require_stream(bool cond, const std::string& what) {
  if (!cond) throw StreamError(what);
}

/// Wrap an angle to (-pi, pi].
inline double wrap_phase(double x) {
  // atan2 form is immune to large multiples of 2*pi
  return std::atan2(std::sin(x), std::cos(x));
}

inline double clamp01(double x) {
  if (!(x > 0.0)) return 0.0;  // also catches NaN
  return x > 1.0 ? 1.0 : x;
}

}  // namespace duopath
