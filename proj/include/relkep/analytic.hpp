#pragma once

#include "relkep/errors.hpp"
#include "relkep/model.hpp"

namespace relkep {

// r(theta) = p / (1 + e cos(k (theta - theta0))). Bounded iff 0 <= e < 1.
struct ConicOrbit {
  double k;       // apsidal frequency ratio, in (0, 1] for 0 <= m beta_hat < L^2
  double p;       // semi-latus-like scale
  double e;       // eccentricity-like amplitude
  double theta0;  // phase of perihelion
};

// Closed form for the ell = 4 family: u'' + (1 - m beta_hat/L^2) u = m alpha_hat/L^2.
// Throws SpiralRegimeError when L^2 <= m beta_hat.
ConicOrbit binet_parameters(double alpha_hat, double beta_hat, double L, double m);

// Perihelion advance per radial period: 2 pi (1/k - 1).
double apsidal_precession(double k);

// First-order perturbative estimate for the ell = 5 family:
// 6 pi G^2 M^2 m^2 / (c^2 L^2). Valid in the weak-field regime only.
double precession_schwarzschild_leading(const PhysicalParams& params, double L);

// Throws AsymptoteError when the denominator is not positive.
double orbit_radius(const ConicOrbit& conic, double theta);

// Fit e and theta0 from a concrete state (r, rdot, theta) on the orbit with
// angular momentum L.
ConicOrbit conic_from_state(double alpha_hat, double beta_hat, double L, double m,
                            double r, double rdot, double theta);

}  // namespace relkep
