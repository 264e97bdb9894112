#include "relkep/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relkep {

void PhysicalParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                  " must be positive and finite");
  };
  check(m, "m");
  check(c, "c");
  check(G, "G");
  check(M, "M");
}

namespace {

double guarded_radius(const Vec& x, double r_min) {
  const double r = x.norm();
  if (!(r >= r_min))
    throw DomainError("potential evaluated inside origin guard, r = " +
                      std::to_string(r));
  return r;
}

}  // namespace

double KeplerPotential::value(const Vec& x) const {
  return alpha_ / guarded_radius(x, r_min_);
}

Vec KeplerPotential::gradient(const Vec& x) const {
  const double r = guarded_radius(x, r_min_);
  return (-alpha_ / (r * r * r)) * x;
}

double TransformedPotential::value(const Vec& x) const {
  const double v = base_->value(x);
  const double w = v + h_;
  return v + w * w / (2.0 * mc2_);
}

Vec TransformedPotential::gradient(const Vec& x) const {
  const double v = base_->value(x);
  return (1.0 + (v + h_) / mc2_) * base_->gradient(x);
}

CentralForcePotential::CentralForcePotential(const CentralForceCoeffs& coeffs,
                                             double r_min)
    : ell_(coeffs.ell),
      alpha_hat_(coeffs.alpha_hat),
      beta_hat_(coeffs.beta_hat),
      r_min_(r_min) {
  if (ell_ != 4 && ell_ != 5)
    throw std::invalid_argument("CentralForcePotential: ell must be 4 or 5");
}

double CentralForcePotential::value(const Vec& x) const {
  const double r = guarded_radius(x, r_min_);
  const int k = ell_ - 3;
  return alpha_hat_ / r + beta_hat_ / (k * std::pow(r, k));
}

Vec CentralForcePotential::gradient(const Vec& x) const {
  const double r = guarded_radius(x, r_min_);
  const double r3 = r * r * r;
  const double coef =
      alpha_hat_ / r3 + (ell_ == 4 ? beta_hat_ / (r3 * r) : beta_hat_ / (r3 * r * r));
  return -coef * x;
}

PotentialSample kepler_potential(const Vec& x, const PhysicalParams& p,
                                 double r_min) {
  KeplerPotential V(p.alpha(), r_min);
  return {V.value(x), V.gradient(x)};
}

PotentialSample transformed_potential(const Potential& V, const Vec& x, double h,
                                      const PhysicalParams& p) {
  const double v = V.value(x);
  const double w = v + h;
  const double mc2 = p.mc2();
  return {v + w * w / (2.0 * mc2), (1.0 + w / mc2) * V.gradient(x)};
}

PotentialSample transformed_potential(const Vec& x, double h,
                                      const PhysicalParams& p, double r_min) {
  KeplerPotential V(p.alpha(), r_min);
  return transformed_potential(V, x, h, p);
}

CentralForceCoeffs coefficients_for(CoeffFamily family, double h, double L,
                                    const PhysicalParams& p) {
  p.validate();
  const double alpha = p.alpha();
  const double mc2 = p.mc2();
  const double c2 = p.c * p.c;
  CentralForceCoeffs out{4, 0.0, 0.0};
  switch (family) {
    case CoeffFamily::Schwarzschild:
      out = {5, alpha, 3.0 * p.G * p.M * L * L / mc2};
      break;
    case CoeffFamily::LeviCivita:
      out = {4, alpha * (1.0 + 4.0 * h / mc2), 6.0 * p.G * p.G * p.M * p.M * p.m / c2};
      break;
    case CoeffFamily::SpecialRelativity:
      out = {4, alpha * (1.0 + h / mc2), p.G * p.G * p.M * p.M * p.m / c2};
      break;
  }
  if (!(out.alpha_hat > 0.0))
    throw std::invalid_argument(
        "coefficients_for: alpha_hat <= 0 (energy too negative, effective "
        "attraction flips sign)");
  return out;
}

double gamma_from_velocity(const Vec& v, const PhysicalParams& p) {
  const double beta2 = v.norm2() / (p.c * p.c);
  if (!(beta2 < 1.0))
    throw DomainError("gamma_from_velocity: |v| >= c");
  return 1.0 / std::sqrt(1.0 - beta2);
}

double gamma_from_momentum(const Vec& mom, const PhysicalParams& p) {
  const double mc = p.m * p.c;
  return std::sqrt(1.0 + mom.norm2() / (mc * mc));
}

double gamma_of(const PhaseState& s, const PhysicalParams& p) {
  return s.momentum_rep ? gamma_from_momentum(s.v, p)
                        : gamma_from_velocity(s.v, p);
}

Vec momentum_from_velocity(const Vec& v, const PhysicalParams& p) {
  return (p.m * gamma_from_velocity(v, p)) * v;
}

Vec velocity_from_momentum(const Vec& mom, const PhysicalParams& p) {
  return (1.0 / (p.m * gamma_from_momentum(mom, p))) * mom;
}

double relativistic_energy(const PhaseState& s, const PhysicalParams& p,
                           const Potential& V) {
  return p.mc2() * (gamma_of(s, p) - 1.0) - V.value(s.x);
}

double classical_energy(const PhaseState& s, const PhysicalParams& p,
                        const Potential& Z) {
  return 0.5 * p.m * s.v.norm2() - Z.value(s.x);
}

double angular_momentum(const PhaseState& s, const PhysicalParams& p,
                        bool relativistic) {
  if (s.momentum_rep) {
    // x ^ p is already the relativistic angular momentum.
    return relativistic ? cross_z(s.x, s.v)
                        : p.m * cross_z(s.x, velocity_from_momentum(s.v, p));
  }
  const double factor = relativistic ? p.m * gamma_from_velocity(s.v, p) : p.m;
  return factor * cross_z(s.x, s.v);
}

Vec angular_momentum3(const PhaseState& s, const PhysicalParams& p,
                      bool relativistic) {
  if (s.momentum_rep) {
    return relativistic ? cross(s.x, s.v)
                        : p.m * cross(s.x, velocity_from_momentum(s.v, p));
  }
  const double factor = relativistic ? p.m * gamma_from_velocity(s.v, p) : p.m;
  return factor * cross(s.x, s.v);
}

Region classify_region(const Vec& x, double h, const PhysicalParams& p,
                       const Potential& V) {
  const double w = V.value(x) + h;
  if (w >= 0.0) return Region::OmegaH;
  if (w + 2.0 * p.mc2() <= 0.0) return Region::SigmaH;
  return Region::Forbidden;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::OmegaH: return "omega_h";
    case Region::SigmaH: return "sigma_h";
    case Region::Forbidden: return "forbidden";
  }
  return "?";
}

}  // namespace relkep
