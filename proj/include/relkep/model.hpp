#pragma once

#include <memory>

#include "relkep/errors.hpp"
#include "relkep/vec.hpp"

namespace relkep {

inline constexpr double kDefaultRMin = 1e-8;

// Scaled units G = M = m = c = 1 by default; alpha is always derived.
struct PhysicalParams {
  double m = 1.0;  // test body mass
  double c = 1.0;  // speed of light
  double G = 1.0;  // gravitational constant
  double M = 1.0;  // central mass

  double alpha() const { return G * M * m; }
  double mc2() const { return m * c * c; }
  void validate() const;  // throws std::invalid_argument on a nonpositive field
};

struct PhaseState {
  double t = 0.0;
  Vec x;
  Vec v;  // velocity, or momentum when momentum_rep is set
  bool momentum_rep = false;
};

// Sign convention: the motion equations read m x'' = grad V, so the Kepler
// potential is V(x) = alpha/|x| > 0 with gradient -alpha x/|x|^3.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
};

struct PotentialSample {
  double value;
  Vec gradient;
};

class KeplerPotential final : public Potential {
 public:
  explicit KeplerPotential(double alpha, double r_min = kDefaultRMin)
      : alpha_(alpha), r_min_(r_min) {}
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double r_min() const { return r_min_; }

 private:
  double alpha_;
  double r_min_;
};

// Z_h = V + (V+h)^2/(2 m c^2). The additive constant h^2/(2 m c^2) coming
// from expanding the square is part of the value; it does not enter the
// gradient, which is grad V * (1 + (V+h)/(m c^2)).
class TransformedPotential final : public Potential {
 public:
  TransformedPotential(std::shared_ptr<const Potential> base, double h,
                       const PhysicalParams& p)
      : base_(std::move(base)), h_(h), mc2_(p.mc2()) {}
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double h() const { return h_; }

 private:
  std::shared_ptr<const Potential> base_;
  double h_;
  double mc2_;
};

// m x'' = -alpha_hat x/|x|^3 - beta_hat x/|x|^ell, ell in {4, 5}.
struct CentralForceCoeffs {
  int ell;
  double alpha_hat;
  double beta_hat;
};

// Potential whose gradient is the generalized central force: value
// alpha_hat/r + beta_hat/((ell-3) r^(ell-3)), so that m x'' = grad U.
class CentralForcePotential final : public Potential {
 public:
  explicit CentralForcePotential(const CentralForceCoeffs& coeffs,
                                 double r_min = kDefaultRMin);
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;

 private:
  int ell_;
  double alpha_hat_;
  double beta_hat_;
  double r_min_;
};

PotentialSample kepler_potential(const Vec& x, const PhysicalParams& p,
                                 double r_min = kDefaultRMin);
PotentialSample transformed_potential(const Potential& V, const Vec& x, double h,
                                      const PhysicalParams& p);
PotentialSample transformed_potential(const Vec& x, double h,
                                      const PhysicalParams& p,
                                      double r_min = kDefaultRMin);

enum class CoeffFamily { Schwarzschild, LeviCivita, SpecialRelativity };

// L is only consulted for the Schwarzschild family (frozen from the run's
// initial condition). Throws std::invalid_argument when alpha_hat <= 0.
CentralForceCoeffs coefficients_for(CoeffFamily family, double h, double L,
                                    const PhysicalParams& p);

double gamma_from_velocity(const Vec& v, const PhysicalParams& p);
double gamma_from_momentum(const Vec& mom, const PhysicalParams& p);
double gamma_of(const PhaseState& s, const PhysicalParams& p);

Vec momentum_from_velocity(const Vec& v, const PhysicalParams& p);
Vec velocity_from_momentum(const Vec& mom, const PhysicalParams& p);

// m c^2 (gamma - 1) - V(x); constant along solutions of the relativistic flow.
double relativistic_energy(const PhaseState& s, const PhysicalParams& p,
                           const Potential& V);
// (m/2)|z'|^2 - Z(z); constant along solutions of m z'' = grad Z.
double classical_energy(const PhaseState& s, const PhysicalParams& p,
                        const Potential& Z);

// Scalar (z-component) for planar states. Classical: m x ^ v;
// relativistic: x ^ p = m gamma x ^ v.
double angular_momentum(const PhaseState& s, const PhysicalParams& p,
                        bool relativistic);
Vec angular_momentum3(const PhaseState& s, const PhysicalParams& p,
                      bool relativistic);

enum class Region { OmegaH, SigmaH, Forbidden };

// OmegaH: V+h >= 0.  SigmaH: V+h+2mc^2 <= 0.  Forbidden: strictly between.
Region classify_region(const Vec& x, double h, const PhysicalParams& p,
                       const Potential& V);
const char* region_name(Region r);

struct ForceModel {
  enum class Kind { ClassicalKepler, RelativisticKepler, TransformedZh, CentralForce };
  Kind kind = Kind::ClassicalKepler;
  double h = 0.0;                          // TransformedZh
  CentralForceCoeffs coeffs{4, 1.0, 0.0};  // CentralForce
};

}  // namespace relkep
