#pragma once

#include <memory>
#include <vector>

#include "relkep/integrate.hpp"

namespace relkep {

// Trajectory of an augmented system whose last state component is the
// companion time variable: zeta(t) along relativistic runs, t(s) along
// transformed runs. The clock starts at 0 and is strictly increasing on
// Omega_h runs.
struct ClockedTrajectory {
  Trajectory base;  // layout (x | p or z' | clock), dim 2n+1
  RunReport report;
  int n = 2;
  double h = 0.0;
  PhysicalParams params;
  std::shared_ptr<const Potential> potential;

  size_t size() const { return base.samples.size(); }
  double clock(size_t i) const { return base.samples[i].y[2 * static_cast<size_t>(n)]; }
  double clock_rate(size_t i) const { return base.samples[i].dy[2 * static_cast<size_t>(n)]; }
  double clock_end() const { return clock(size() - 1); }
};

// A trajectory resampled in the companion parameter: s for forward
// transports, t for backward ones.
struct TransportedTrajectory {
  std::vector<double> param;
  std::vector<Vec> pos;
  std::vector<Vec> vel;
};

struct EquivalenceTolerances {
  double position = 1e-5;
  double energy = 1e-8;   // relative to the local energy scale
  double clock = 1e-8;    // relative to the run length
};

struct EquivalenceReport {
  double sup_position_gap = 0.0;
  double energy_gap = 0.0;
  double residual_norm = 0.0;      // relative to the local force scale
  double clock_roundtrip_gap = 0.0;
  double t_span = 0.0;
  double s_span = 0.0;
  bool pass = false;
  EquivalenceTolerances tol;
};

// Relativistic run (x, p) with the co-integrated clock
// zeta' = m c^2 / (V(x) + h + m c^2). Requires the initial state to carry
// relativistic energy h to 1e-10 relative (EnergyMismatchError otherwise)
// and to start in Omega_h.
ClockedTrajectory integrate_with_forward_clock(const PhysicalParams& params,
                                               std::shared_ptr<const Potential> V,
                                               double h, const Vec& x0,
                                               const Vec& p0, double t1,
                                               const IntegratorConfig& cfg);

// Transformed run (z, z') under m z'' = grad Z_h with the physical time
// co-integrated via dt/ds = (V(z) + h + m c^2)/(m c^2) >= 1 on Omega_h.
// Requires classical energy h at s = 0 and z0 in Omega_h; Sigma_h starts are
// rejected with RegionError (use sigma_branch_check).
ClockedTrajectory integrate_with_inverse_clock(const PhysicalParams& params,
                                               std::shared_ptr<const Potential> V,
                                               double h, const Vec& z0,
                                               const Vec& z0p, double s1,
                                               const IntegratorConfig& cfg);

// Resample a relativistic clocked run on a uniform s-grid by inverting the
// clock (monotone cubic interpolation); velocities are mapped by
// z' = xdot (V + h + m c^2)/(m c^2).
TransportedTrajectory transport_forward(const ClockedTrajectory& clocked,
                                        int grid_points = 2048);

// Mirror map for transformed runs: x = z at matching clock value,
// xdot = z' m c^2/(V + h + m c^2); mapped speeds are < c on Omega_h.
TransportedTrajectory transport_backward(const ClockedTrajectory& clocked,
                                         int grid_points = 2048);

// Full bidirectional check: relativistic run + clock, forward transport,
// independent transformed integration from the matched initial condition,
// gap metrics and clock round trip.
EquivalenceReport verify_equivalence(const PhysicalParams& params,
                                     std::shared_ptr<const Potential> V, double h,
                                     const Vec& x0, const Vec& p0, double t1,
                                     const IntegratorConfig& cfg,
                                     const EquivalenceTolerances& tol = {},
                                     int grid_points = 2048);

struct SigmaBranchReport {
  double expected_energy = 0.0;  // h + 2 m c^2
  double max_energy_gap = 0.0;
  double s_span = 0.0;
  bool pass = false;
};

// Experimental Sigma_h branch: transformed solutions with energy h supported
// in {V + h + 2 m c^2 <= 0} are transported with the magnitude clock rate
// m c^2/|V + h + m c^2|; the mapped states carry the reflected-branch
// relativistic energy m c^2 (1 - gamma) - V, which is checked against
// h + 2 m c^2.
SigmaBranchReport sigma_branch_check(const PhysicalParams& params,
                                     std::shared_ptr<const Potential> V, double h,
                                     const Vec& z0, const Vec& z0p, double s1,
                                     const IntegratorConfig& cfg,
                                     double tolerance = 1e-6);

}  // namespace relkep
