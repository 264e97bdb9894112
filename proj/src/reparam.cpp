#include "relkep/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relkep {

namespace {

constexpr double kEnergyPreTol = 1e-10;

void require_energy(double actual, double expected, const char* what) {
  if (std::abs(actual - expected) > kEnergyPreTol * std::max(1.0, std::abs(expected))) {
    std::ostringstream os;
    os << what << ": initial state carries energy " << actual
       << ", expected " << expected;
    throw EnergyMismatchError(os.str());
  }
}

FlowField augment_with_clock(FlowField base,
                             std::function<double(const Vec&)> rate) {
  FlowField f = base;
  f.dim = base.dim + 1;
  const int n = base.n;
  f.eval = [base, rate, n](double t, std::span<const double> y,
                           std::span<double> dy) {
    base.eval(t, y.first(static_cast<size_t>(base.dim)),
              dy.first(static_cast<size_t>(base.dim)));
    dy[static_cast<size_t>(2 * n)] = rate(load_vec(y, n, 0));
  };
  f.in_domain = [base](std::span<const double> y) {
    return !base.in_domain || base.in_domain(y.first(static_cast<size_t>(base.dim)));
  };
  return f;
}

// Interpolated base state at the parameter value where the clock column
// equals `target`; also reports the base parameter reached.
struct ClockInverse {
  std::vector<double> state;
  double base_param;
};

ClockInverse state_at_clock(const ClockedTrajectory& ct, double target) {
  const size_t m = ct.size();
  const size_t ci = 2 * static_cast<size_t>(ct.n);
  if (m < 2) throw std::invalid_argument("state_at_clock: trajectory too short");
  // Ties are tolerated: deep in a collapse the clock rate can be so small
  // that increments fall below the resolution of the accumulated clock value.
  for (size_t i = 0; i + 1 < m; ++i)
    if (ct.clock(i + 1) < ct.clock(i))
      throw NonMonotoneClockError("clock column is decreasing");
  target = std::clamp(target, ct.clock(0), ct.clock(m - 1));

  // Bracket in the clock column.
  size_t lo = 0, hi = m - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    (ct.clock(mid) <= target ? lo : hi) = mid;
  }
  const Sample& a = ct.base.samples[lo];
  const Sample& b = ct.base.samples[hi];

  // Invert the clock on the segment with Hermite data: the derivative of the
  // base parameter w.r.t. the clock is 1/clock_rate at both endpoints.
  const double ca = a.y[ci], cb = b.y[ci];
  const double dc = cb - ca;
  if (!(dc > 0.0)) return {ct.base.state_at(a.t), a.t};  // clock plateau
  const double u = (target - ca) / dc;
  const double da = dc / a.dy[ci];  // d param/d clock scaled to the segment
  const double db = dc / b.dy[ci];
  const double u2 = u * u, u3 = u2 * u;
  const double tq = (2 * u3 - 3 * u2 + 1) * a.t + (u3 - 2 * u2 + u) * da +
                    (-2 * u3 + 3 * u2) * b.t + (u3 - u2) * db;
  const double t = std::clamp(tq, a.t, b.t);
  return {ct.base.state_at(t), t};
}

double clock_factor(const ClockedTrajectory& ct, const Vec& x) {
  return (ct.potential->value(x) + ct.h + ct.params.mc2()) / ct.params.mc2();
}

}  // namespace

ClockedTrajectory integrate_with_forward_clock(const PhysicalParams& params,
                                               std::shared_ptr<const Potential> V,
                                               double h, const Vec& x0,
                                               const Vec& p0, double t1,
                                               const IntegratorConfig& cfg) {
  params.validate();
  PhaseState st{0.0, x0, p0, true};
  require_energy(relativistic_energy(st, params, *V), h,
                 "integrate_with_forward_clock");
  const int n = x0.dim();
  const double mc2 = params.mc2();
  auto rate = [V, h, mc2](const Vec& x) {
    return mc2 / (V->value(x) + h + mc2);
  };
  FlowField f = augment_with_clock(
      relativistic_field(params, V, n, cfg.r_min), rate);

  std::vector<double> y0(static_cast<size_t>(f.dim), 0.0);
  store_vec(y0, 0, x0);
  store_vec(y0, n, p0);
  auto res = integrate(f, std::move(y0), 0.0, t1, cfg);

  ClockedTrajectory out;
  out.base = std::move(res.trajectory);
  out.report = std::move(res.report);
  out.n = n;
  out.h = h;
  out.params = params;
  out.potential = std::move(V);
  return out;
}

ClockedTrajectory integrate_with_inverse_clock(const PhysicalParams& params,
                                               std::shared_ptr<const Potential> V,
                                               double h, const Vec& z0,
                                               const Vec& z0p, double s1,
                                               const IntegratorConfig& cfg) {
  params.validate();
  const Region region = classify_region(z0, h, params, *V);
  if (region != Region::OmegaH)
    throw RegionError(std::string("integrate_with_inverse_clock: z0 is in ") +
                      region_name(region) +
                      (region == Region::SigmaH ? "; use sigma_branch_check" : ""));
  TransformedPotential Z(V, h, params);
  PhaseState st{0.0, z0, z0p, false};
  require_energy(classical_energy(st, params, Z), h,
                 "integrate_with_inverse_clock");

  const int n = z0.dim();
  const double mc2 = params.mc2();
  auto rate = [V, h, mc2](const Vec& z) {
    return (V->value(z) + h + mc2) / mc2;
  };
  FlowField f = augment_with_clock(
      transformed_field(params, h, V, n, cfg.r_min), rate);

  std::vector<double> y0(static_cast<size_t>(f.dim), 0.0);
  store_vec(y0, 0, z0);
  store_vec(y0, n, z0p);
  auto res = integrate(f, std::move(y0), 0.0, s1, cfg);

  ClockedTrajectory out;
  out.base = std::move(res.trajectory);
  out.report = std::move(res.report);
  out.n = n;
  out.h = h;
  out.params = params;
  out.potential = std::move(V);
  return out;
}

TransportedTrajectory transport_forward(const ClockedTrajectory& clocked,
                                        int grid_points) {
  const int n = clocked.n;
  const double S = clocked.clock_end();
  TransportedTrajectory out;
  out.param.reserve(static_cast<size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) {
    const double s = S * static_cast<double>(k) / (grid_points - 1);
    auto inv = state_at_clock(clocked, s);
    const Vec x = load_vec(inv.state, n, 0);
    const Vec p = load_vec(inv.state, n, n);
    const Vec v = velocity_from_momentum(p, clocked.params);
    out.param.push_back(s);
    out.pos.push_back(x);
    out.vel.push_back(clock_factor(clocked, x) * v);
  }
  return out;
}

TransportedTrajectory transport_backward(const ClockedTrajectory& clocked,
                                         int grid_points) {
  const int n = clocked.n;
  const double T = clocked.clock_end();
  TransportedTrajectory out;
  out.param.reserve(static_cast<size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) {
    const double t = T * static_cast<double>(k) / (grid_points - 1);
    auto inv = state_at_clock(clocked, t);
    const Vec z = load_vec(inv.state, n, 0);
    const Vec zp = load_vec(inv.state, n, n);
    out.param.push_back(t);
    out.pos.push_back(z);
    out.vel.push_back((1.0 / clock_factor(clocked, z)) * zp);
  }
  return out;
}

EquivalenceReport verify_equivalence(const PhysicalParams& params,
                                     std::shared_ptr<const Potential> V, double h,
                                     const Vec& x0, const Vec& p0, double t1,
                                     const IntegratorConfig& cfg,
                                     const EquivalenceTolerances& tol,
                                     int grid_points) {
  EquivalenceReport rep;
  rep.tol = tol;

  auto fwd = integrate_with_forward_clock(params, V, h, x0, p0, t1, cfg);
  if (fwd.size() < 2)
    throw std::runtime_error("verify_equivalence: relativistic run produced no steps");
  rep.t_span = fwd.base.t_end();
  rep.s_span = fwd.clock_end();

  auto transported = transport_forward(fwd, grid_points);

  // Matched initial condition from the velocity map at t = 0.
  const Vec v0 = velocity_from_momentum(p0, params);
  const Vec z0p = clock_factor(fwd, x0) * v0;
  IntegratorConfig zcfg = cfg;
  zcfg.stop = nullptr;
  auto zrun = integrate_with_inverse_clock(params, V, h, x0, z0p, rep.s_span, zcfg);

  TransformedPotential Z(V, h, params);
  const double mc2 = params.mc2();
  const int n = fwd.n;

  for (size_t k = 0; k < transported.param.size(); ++k) {
    const double s = transported.param[k];
    const Vec z = transported.pos[k];
    const Vec zp = transported.vel[k];

    if (s <= zrun.base.t_end()) {
      const auto zy = zrun.base.state_at(s);
      double gap2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = z[i] - zy[static_cast<size_t>(i)];
        gap2 += d * d;
      }
      rep.sup_position_gap = std::max(rep.sup_position_gap, std::sqrt(gap2));
    }

    const double kinetic = 0.5 * params.m * zp.norm2();
    const double zval = Z.value(z);
    const double lambda = kinetic - zval;
    const double scale = std::max(1.0, kinetic + std::abs(zval));
    rep.energy_gap = std::max(rep.energy_gap, std::abs(lambda - h) / scale);
  }

  // ODE residual of the transported curve by centered second differences.
  const double ds = transported.param[1] - transported.param[0];
  for (size_t k = 1; k + 1 < transported.pos.size(); ++k) {
    const Vec& zm = transported.pos[k - 1];
    const Vec& zc = transported.pos[k];
    const Vec& zpl = transported.pos[k + 1];
    const Vec accel = (1.0 / (ds * ds)) * (zpl - 2.0 * zc + zm);
    const Vec force = (1.0 / params.m) * Z.gradient(zc);
    const double scale = std::max(1.0, force.norm());
    rep.residual_norm = std::max(rep.residual_norm, (accel - force).norm() / scale);
  }

  // Clock round trip: eta(zeta(t)) == t through the transformed run's clock.
  const size_t ci = 2 * static_cast<size_t>(n);
  for (size_t i = 0; i < fwd.size(); ++i) {
    const double s = fwd.clock(i);
    if (s > zrun.base.t_end()) break;
    const auto zy = zrun.base.state_at(s);
    const double t_back = zy[ci];
    rep.clock_roundtrip_gap = std::max(
        rep.clock_roundtrip_gap,
        std::abs(t_back - fwd.base.samples[i].t) / std::max(rep.t_span, 1e-300));
  }
  (void)mc2;

  rep.pass = rep.sup_position_gap < tol.position && rep.energy_gap < tol.energy &&
             rep.clock_roundtrip_gap < tol.clock;
  return rep;
}

SigmaBranchReport sigma_branch_check(const PhysicalParams& params,
                                     std::shared_ptr<const Potential> V, double h,
                                     const Vec& z0, const Vec& z0p, double s1,
                                     const IntegratorConfig& cfg,
                                     double tolerance) {
  params.validate();
  const Region region = classify_region(z0, h, params, *V);
  if (region != Region::SigmaH)
    throw RegionError(std::string("sigma_branch_check: z0 is in ") +
                      region_name(region) + ", expected sigma_h");
  TransformedPotential Z(V, h, params);
  PhaseState st{0.0, z0, z0p, false};
  require_energy(classical_energy(st, params, Z), h, "sigma_branch_check");

  const int n = z0.dim();
  const double mc2 = params.mc2();
  auto rate = [V, h, mc2](const Vec& z) {
    return std::abs(V->value(z) + h + mc2) / mc2;
  };
  FlowField f = augment_with_clock(
      transformed_field(params, h, V, n, cfg.r_min), rate);

  std::vector<double> y0(static_cast<size_t>(f.dim), 0.0);
  store_vec(y0, 0, z0);
  store_vec(y0, n, z0p);
  auto res = integrate(f, std::move(y0), 0.0, s1, cfg);

  SigmaBranchReport rep;
  rep.expected_energy = h + 2.0 * mc2;
  rep.s_span = res.trajectory.t_end();

  for (const Sample& s : res.trajectory.samples) {
    const Vec z = load_vec(s.y, n, 0);
    const Vec zp = load_vec(s.y, n, n);
    const double vval = V->value(z);
    if (!(vval + h + 2.0 * mc2 <= 1e-9))
      throw RegionError("sigma_branch_check: trajectory left sigma_h");
    const Vec xdot = (mc2 / std::abs(vval + h + mc2)) * zp;
    // On Sigma_h the Lorentz root continues on the reflected branch, so the
    // conserved quantity is m c^2 (1 - gamma) - V.
    const double gamma = gamma_from_velocity(xdot, params);
    const double energy = mc2 * (1.0 - gamma) - vval;
    rep.max_energy_gap =
        std::max(rep.max_energy_gap, std::abs(energy - rep.expected_energy));
  }
  rep.pass = rep.max_energy_gap < tolerance;
  return rep;
}

}  // namespace relkep
