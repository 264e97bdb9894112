#pragma once

#include <functional>
#include <memory>
#include <span>

#include "relkep/model.hpp"

namespace relkep {

// First-order vector field over a flat state array. Layout: positions in
// y[0..n), velocities or momenta in y[n..2n), optional extra components
// (e.g. a co-integrated clock) after that. All shipped fields are autonomous.
struct FlowField {
  int dim = 0;  // flat state size
  int n = 2;    // spatial dimension
  std::function<void(double t, std::span<const double> y, std::span<double> dy)> eval;
  std::function<bool(std::span<const double> y)> in_domain;
};

inline Vec load_vec(std::span<const double> y, int n, int offset) {
  return n == 2 ? Vec(y[offset], y[offset + 1])
                : Vec(y[offset], y[offset + 1], y[offset + 2]);
}

inline void store_vec(std::span<double> y, int offset, const Vec& v) {
  for (int i = 0; i < v.dim(); ++i) y[offset + i] = v[i];
}

// State (x, p), p = m gamma xdot:  xdot = p/(m sqrt(1+|p|^2/(mc)^2)),
// pdot = grad V(x). Keeps |xdot| < c by construction.
FlowField relativistic_field(const PhysicalParams& p,
                             std::shared_ptr<const Potential> V, int n = 2,
                             double r_min = kDefaultRMin);

// State (z, z'):  m z'' = grad Z_h(z).
FlowField transformed_field(const PhysicalParams& p, double h,
                            std::shared_ptr<const Potential> V, int n = 2,
                            double r_min = kDefaultRMin);

// State (x, xdot):  m x'' = -alpha_hat x/|x|^3 - beta_hat x/|x|^ell.
FlowField central_force_field(const CentralForceCoeffs& coeffs,
                              const PhysicalParams& p, int n = 2,
                              double r_min = kDefaultRMin);

FlowField classical_kepler_field(const PhysicalParams& p, int n = 2,
                                 double r_min = kDefaultRMin);

}  // namespace relkep
