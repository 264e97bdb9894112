#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relkep/dynamics.hpp"
#include "relkep/model.hpp"

namespace relkep {

enum class StepMethod { RK4Fixed, DP45Adaptive };

struct IntegratorConfig {
  StepMethod method = StepMethod::DP45Adaptive;
  double dt = 1e-3;      // fixed step (RK4)
  double rtol = 1e-10;   // adaptive relative tolerance, must be in (0, 1e-3]
  double atol = 1e-12;
  long max_steps = 10'000'000;
  double r_min = kDefaultRMin;
  // Called after each accepted step; returning true ends the run.
  std::function<bool(double t, std::span<const double> y)> stop;
  void validate() const;  // throws std::invalid_argument
};

enum class RunStatus {
  Ok,
  MaxStepsExceeded,
  StepUnderflow,   // dt < 1e-14 * span
  DomainExit,      // |x| fell below r_min
  Stopped,         // stop callback fired
};
const char* run_status_name(RunStatus s);

struct Sample {
  double t;
  std::vector<double> y;
  std::vector<double> dy;  // field.eval at (t, y)
};

struct SampleDiag {
  double energy = 0.0;
  double angular_momentum = 0.0;
  double gamma = 0.0;  // NaN where not applicable
  Region region = Region::OmegaH;
};

struct PerihelionEvent {
  double t;
  double angle;   // atan2 at the event
  double radius;
};

struct Trajectory {
  int n = 2;                    // spatial dimension
  bool momentum_rep = false;
  std::vector<Sample> samples;  // strictly increasing t
  std::vector<SampleDiag> diag; // optional, parallel to samples when filled
  std::vector<PerihelionEvent> events;

  double t0() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
  // Index i with samples[i].t <= t <= samples[i+1].t.
  size_t segment_for(double t) const;
  // Cubic Hermite evaluation on the stored (state, derivative) pairs.
  std::vector<double> state_at(double t) const;
  std::vector<double> derivative_at(double t) const;
};

struct RunReport {
  RunStatus status = RunStatus::Ok;
  long steps_taken = 0;
  long steps_rejected = 0;
  double energy_drift_rel = 0.0;  // max over samples of |Q-Q0|/max(1,|Q0|)
  double angular_momentum_drift_rel = 0.0;
  size_t n_events = 0;
  std::optional<double> precession_rad_per_orbit;
  std::string detail;  // last valid state info on abnormal termination
};

struct IntegrationResult {
  Trajectory trajectory;
  RunReport report;
};

// Single classical RK4 update. Throws DomainError if any stage leaves the
// field's domain.
std::vector<double> rk4_step(const FlowField& field, double t,
                             std::span<const double> y, double dt);

IntegrationResult integrate(const FlowField& field, std::vector<double> y0,
                            double t0, double t1, const IntegratorConfig& cfg);

// Upward zero crossings of the radial velocity x.xdot, refined by bisection
// on the Hermite interpolant. Planar trajectories only.
std::vector<PerihelionEvent> detect_perihelion(const Trajectory& traj,
                                               double time_tol_rel = 1e-10);

struct PrecessionEstimate {
  double mean;    // radians per orbit beyond 2 pi
  double stddev;
  size_t n_gaps;
};

// Mean and stddev of successive perihelion angle gaps minus 2 pi. Throws
// InsufficientEventsError for fewer than 3 events.
PrecessionEstimate precession_estimate(const std::vector<PerihelionEvent>& events);

// Per-sample diagnostics context. Fills Trajectory::diag and the drift
// fields of the report.
struct DiagContext {
  PhysicalParams params;
  std::shared_ptr<const Potential> potential;  // V or Z depending on kind
  ForceModel::Kind kind = ForceModel::Kind::ClassicalKepler;
  double h = 0.0;  // region classification reference (relativistic/transformed)
};

void attach_diagnostics(Trajectory& traj, const DiagContext& ctx,
                        RunReport& report);

}  // namespace relkep
