#include "relkep/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace relkep {

ConicOrbit binet_parameters(double alpha_hat, double beta_hat, double L, double m) {
  const double k2 = 1.0 - m * beta_hat / (L * L);
  if (!(k2 > 0.0))
    throw SpiralRegimeError("binet_parameters: L^2 <= m beta_hat (k^2 = " +
                            std::to_string(k2) + ")");
  const double k = std::sqrt(k2);
  const double p = (L * L - m * beta_hat) / (m * alpha_hat);
  return {k, p, 0.0, 0.0};
}

double apsidal_precession(double k) {
  return 2.0 * std::numbers::pi * (1.0 / k - 1.0);
}

double precession_schwarzschild_leading(const PhysicalParams& params, double L) {
  const double gm = params.G * params.M * params.m;
  return 6.0 * std::numbers::pi * gm * gm / (params.c * params.c * L * L);
}

double orbit_radius(const ConicOrbit& conic, double theta) {
  const double denom = 1.0 + conic.e * std::cos(conic.k * (theta - conic.theta0));
  if (!(denom > 0.0))
    throw AsymptoteError("orbit_radius: conic denominator <= 0");
  return conic.p / denom;
}

ConicOrbit conic_from_state(double alpha_hat, double beta_hat, double L, double m,
                            double r, double rdot, double theta) {
  ConicOrbit conic = binet_parameters(alpha_hat, beta_hat, L, m);
  // u = u_p (1 + e cos(k(theta-theta0))), u' = -rdot m / L.
  const double up = 1.0 / conic.p;
  const double u = 1.0 / r;
  const double du = -rdot * m / L;
  const double a_cos = u - up;            // e u_p cos(k d)
  const double a_sin = -du / conic.k;     // e u_p sin(k d)
  conic.e = std::hypot(a_cos, a_sin) / up;
  conic.theta0 = theta - std::atan2(a_sin, a_cos) / conic.k;
  return conic;
}

}  // namespace relkep
