#pragma once

#include <stdexcept>
#include <string>

namespace relkep {

// Evaluation at or inside the origin guard radius, or |v| >= c.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial state does not carry the energy the operation was told to assume.
struct EnergyMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State lies in the wrong admissibility region (Omega_h vs Sigma_h).
struct RegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// L^2 <= m*beta_hat: no oscillatory Binet solution, orbit overspirals.
struct SpiralRegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientEventsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonMonotoneClockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conic denominator 1 + e*cos(...) is not positive.
struct AsymptoteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace relkep
