#include "relkep/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace relkep {

namespace {

std::function<bool(std::span<const double>)> radius_guard(int n, double r_min) {
  return [n, r_min](std::span<const double> y) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += y[i] * y[i];
    return r2 >= r_min * r_min;
  };
}

}  // namespace

FlowField relativistic_field(const PhysicalParams& p,
                             std::shared_ptr<const Potential> V, int n,
                             double r_min) {
  p.validate();
  FlowField f;
  f.n = n;
  f.dim = 2 * n;
  f.in_domain = radius_guard(n, r_min);
  f.eval = [p, V, n](double, std::span<const double> y, std::span<double> dy) {
    const Vec x = load_vec(y, n, 0);
    const Vec mom = load_vec(y, n, n);
    store_vec(dy, 0, velocity_from_momentum(mom, p));
    store_vec(dy, n, V->gradient(x));
  };
  return f;
}

FlowField transformed_field(const PhysicalParams& p, double h,
                            std::shared_ptr<const Potential> V, int n,
                            double r_min) {
  p.validate();
  auto Z = std::make_shared<TransformedPotential>(std::move(V), h, p);
  FlowField f;
  f.n = n;
  f.dim = 2 * n;
  f.in_domain = radius_guard(n, r_min);
  const double inv_m = 1.0 / p.m;
  f.eval = [Z, n, inv_m](double, std::span<const double> y, std::span<double> dy) {
    const Vec z = load_vec(y, n, 0);
    for (int i = 0; i < n; ++i) dy[i] = y[n + i];
    store_vec(dy, n, inv_m * Z->gradient(z));
  };
  return f;
}

FlowField central_force_field(const CentralForceCoeffs& coeffs,
                              const PhysicalParams& p, int n, double r_min) {
  p.validate();
  if (coeffs.ell != 4 && coeffs.ell != 5)
    throw std::invalid_argument("central_force_field: ell must be 4 or 5");
  FlowField f;
  f.n = n;
  f.dim = 2 * n;
  f.in_domain = radius_guard(n, r_min);
  const double inv_m = 1.0 / p.m;
  f.eval = [coeffs, n, inv_m, r_min](double, std::span<const double> y,
                                     std::span<double> dy) {
    const Vec x = load_vec(y, n, 0);
    const double r = x.norm();
    if (!(r >= r_min))
      throw DomainError("central_force_field: inside origin guard");
    const double r3 = r * r * r;
    double coef = coeffs.alpha_hat / r3;
    coef += coeffs.ell == 4 ? coeffs.beta_hat / (r3 * r)
                            : coeffs.beta_hat / (r3 * r * r);
    for (int i = 0; i < n; ++i) {
      dy[i] = y[n + i];
      dy[n + i] = -coef * inv_m * x[i];
    }
  };
  return f;
}

FlowField classical_kepler_field(const PhysicalParams& p, int n, double r_min) {
  return central_force_field({4, p.alpha(), 0.0}, p, n, r_min);
}

}  // namespace relkep
