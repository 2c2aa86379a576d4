#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace modumech {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

#ifdef MODUMECH_VERSION
inline constexpr const char* version = MODUMECH_VERSION;
#else
inline constexpr const char* version = "0.0.0-dev";
#endif

// Error hierarchy. Physics guards (truncation, flux branch) are kept
// distinct from numeric failures so callers can map them to exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct dimension_error : error {
  using error::error;
};

// Raised when population leaks into the highest retained Fock level of a
// mode beyond the configured tail tolerance.
struct truncation_error : error {
  double tail_mass;
  truncation_error(const std::string& what, double tail)
      : error(what + " (tail mass " + std::to_string(tail) + ")"), tail_mass(tail) {}
};

// Flux outside the cos(pi*phi) > 0 branch of the junction inductance.
struct branch_error : error {
  using error::error;
};

struct convergence_error : error {
  using error::error;
};

struct config_error : error {
  using error::error;
};

}  // namespace modumech
