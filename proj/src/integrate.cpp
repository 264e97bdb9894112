#include "relkep/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace relkep {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
  if (!(rtol > 0.0 && rtol <= 1e-3))
    throw std::invalid_argument("IntegratorConfig: rtol must be in (0, 1e-3]");
  if (!(atol > 0.0)) throw std::invalid_argument("IntegratorConfig: atol must be > 0");
  if (max_steps < 1) throw std::invalid_argument("IntegratorConfig: max_steps must be >= 1");
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::MaxStepsExceeded: return "max_steps_exceeded";
    case RunStatus::StepUnderflow: return "step_underflow";
    case RunStatus::DomainExit: return "domain_exit";
    case RunStatus::Stopped: return "stopped";
  }
  return "?";
}

namespace {

void check_domain(const FlowField& field, std::span<const double> y) {
  if (field.in_domain && !field.in_domain(y))
    throw DomainError("state left the field domain");
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b(5th) - b(4th), for the embedded error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

struct Dp45Step {
  std::vector<double> y_new;
  std::vector<double> f_new;  // FSAL stage
  double err;                 // scaled error norm
};

Dp45Step dp45_try_step(const FlowField& field, double t,
                       const std::vector<double>& y,
                       const std::vector<double>& f1, double dt, double rtol,
                       double atol) {
  const size_t d = y.size();
  std::vector<double> k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), tmp(d);

  auto stage = [&](double frac, std::vector<double>& out,
                   auto&&... coeff_and_k) {
    auto add = [&](double c, const std::vector<double>& k) {
      for (size_t i = 0; i < d; ++i) tmp[i] += c * k[i];
    };
    for (size_t i = 0; i < d; ++i) tmp[i] = 0.0;
    (add(coeff_and_k.first, *coeff_and_k.second), ...);
    for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + dt * tmp[i];
    check_domain(field, tmp);
    field.eval(t + frac * dt, tmp, out);
  };
  using P = std::pair<double, const std::vector<double>*>;
  stage(c2, k2, P{a21, &f1});
  stage(c3, k3, P{a31, &f1}, P{a32, &k2});
  stage(c4, k4, P{a41, &f1}, P{a42, &k2}, P{a43, &k3});
  stage(c5, k5, P{a51, &f1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4});
  stage(1.0, k6, P{a61, &f1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5});

  Dp45Step out;
  out.y_new.resize(d);
  for (size_t i = 0; i < d; ++i)
    out.y_new[i] = y[i] + dt * (b1 * f1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
  check_domain(field, out.y_new);
  out.f_new.resize(d);
  field.eval(t + dt, out.y_new, out.f_new);

  double err2 = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double e = dt * (e1 * f1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * out.f_new[i]);
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y_new[i]));
    err2 += (e / sc) * (e / sc);
  }
  out.err = std::sqrt(err2 / static_cast<double>(d));
  return out;
}

double initial_step(const FlowField& field, double t0,
                    const std::vector<double>& y0,
                    const std::vector<double>& f0, double span, double rtol,
                    double atol) {
  double ynorm = 0.0, fnorm = 0.0;
  for (size_t i = 0; i < y0.size(); ++i) {
    ynorm = std::max(ynorm, std::abs(y0[i]));
    fnorm = std::max(fnorm, std::abs(f0[i]));
  }
  double h = fnorm > 0.0 ? 0.01 * (atol + rtol * ynorm) / (rtol * fnorm + atol)
                         : 1e-6 * span;
  h = std::clamp(h, 1e-12 * span, 1e-2 * span);
  (void)t0;
  (void)field;
  return h;
}

// Cubic Hermite basis on [0, 1].
void hermite_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = 2 * u3 - 3 * u2 + 1;
  w[1] = u3 - 2 * u2 + u;
  w[2] = -2 * u3 + 3 * u2;
  w[3] = u3 - u2;
}

void hermite_dweights(double u, double w[4]) {
  const double u2 = u * u;
  w[0] = 6 * u2 - 6 * u;
  w[1] = 3 * u2 - 4 * u + 1;
  w[2] = -6 * u2 + 6 * u;
  w[3] = 3 * u2 - 2 * u;
}

}  // namespace

size_t Trajectory::segment_for(double t) const {
  if (samples.size() < 2 || t < t0() || t > t_end())
    throw std::out_of_range("Trajectory: time outside sampled range");
  auto it = std::upper_bound(
      samples.begin(), samples.end(), t,
      [](double tv, const Sample& s) { return tv < s.t; });
  size_t i = static_cast<size_t>(std::distance(samples.begin(), it));
  if (i > 0) --i;
  if (i >= samples.size() - 1) i = samples.size() - 2;
  return i;
}

std::vector<double> Trajectory::state_at(double t) const {
  const size_t i = segment_for(t);
  const Sample& a = samples[i];
  const Sample& b = samples[i + 1];
  const double dt = b.t - a.t;
  const double u = (t - a.t) / dt;
  double w[4];
  hermite_weights(u, w);
  std::vector<double> out(a.y.size());
  for (size_t j = 0; j < out.size(); ++j)
    out[j] = w[0] * a.y[j] + w[1] * dt * a.dy[j] + w[2] * b.y[j] +
             w[3] * dt * b.dy[j];
  return out;
}

std::vector<double> Trajectory::derivative_at(double t) const {
  const size_t i = segment_for(t);
  const Sample& a = samples[i];
  const Sample& b = samples[i + 1];
  const double dt = b.t - a.t;
  const double u = (t - a.t) / dt;
  double w[4];
  hermite_dweights(u, w);
  std::vector<double> out(a.y.size());
  for (size_t j = 0; j < out.size(); ++j)
    out[j] = (w[0] * a.y[j] + w[2] * b.y[j]) / dt + w[1] * a.dy[j] +
             w[3] * b.dy[j];
  return out;
}

std::vector<double> rk4_step(const FlowField& field, double t,
                             std::span<const double> y, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  const size_t d = y.size();
  check_domain(field, y);
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  field.eval(t, y, k1);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  check_domain(field, tmp);
  field.eval(t + 0.5 * dt, tmp, k2);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  check_domain(field, tmp);
  field.eval(t + 0.5 * dt, tmp, k3);
  for (size_t i = 0; i < d; ++i) tmp[i] = y[i] + dt * k3[i];
  check_domain(field, tmp);
  field.eval(t + dt, tmp, k4);
  std::vector<double> out(d);
  for (size_t i = 0; i < d; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  check_domain(field, out);
  return out;
}

IntegrationResult integrate(const FlowField& field, std::vector<double> y0,
                            double t0, double t1, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must be > t0");
  if (static_cast<int>(y0.size()) != field.dim)
    throw std::invalid_argument("integrate: state size does not match field");

  IntegrationResult res;
  Trajectory& traj = res.trajectory;
  RunReport& rep = res.report;
  traj.n = field.n;

  const double span = t1 - t0;
  double t = t0;

  std::vector<double> f(y0.size());
  try {
    check_domain(field, y0);
    field.eval(t, y0, f);
  } catch (const DomainError& e) {
    rep.status = RunStatus::DomainExit;
    rep.detail = e.what();
    return res;
  }
  traj.samples.push_back({t, y0, f});

  auto abort_with = [&](RunStatus st, const std::string& msg) {
    rep.status = st;
    std::ostringstream os;
    os << msg << " at t = " << t;
    rep.detail = os.str();
  };

  if (cfg.method == StepMethod::RK4Fixed) {
    while (t < t1) {
      if (rep.steps_taken >= cfg.max_steps) {
        abort_with(RunStatus::MaxStepsExceeded, "fixed-step budget exhausted");
        return res;
      }
      const double dt = std::min(cfg.dt, t1 - t);
      std::vector<double> y_new;
      try {
        y_new = rk4_step(field, t, y0, dt);
      } catch (const DomainError& e) {
        abort_with(RunStatus::DomainExit, e.what());
        return res;
      }
      t += dt;
      y0 = std::move(y_new);
      field.eval(t, y0, f);
      traj.samples.push_back({t, y0, f});
      ++rep.steps_taken;
      if (cfg.stop && cfg.stop(t, y0)) {
        rep.status = RunStatus::Stopped;
        return res;
      }
    }
    return res;
  }

  // DP45 with FSAL and standard err^(-1/5) control.
  double dt = initial_step(field, t, y0, f, span, cfg.rtol, cfg.atol);
  const double dt_floor = 1e-14 * span;
  while (t < t1) {
    if (rep.steps_taken + rep.steps_rejected >= cfg.max_steps) {
      abort_with(RunStatus::MaxStepsExceeded, "step budget exhausted");
      return res;
    }
    dt = std::min(dt, t1 - t);
    if (dt < dt_floor) {
      abort_with(RunStatus::StepUnderflow, "step size collapsed");
      return res;
    }
    Dp45Step step;
    try {
      step = dp45_try_step(field, t, y0, f, dt, cfg.rtol, cfg.atol);
    } catch (const DomainError& e) {
      // Retry with a smaller step in case a stage overshot the guard; give up
      // once the step underflows.
      dt *= 0.2;
      if (dt < dt_floor) {
        abort_with(RunStatus::DomainExit, e.what());
        return res;
      }
      ++rep.steps_rejected;
      continue;
    }
    const double err = std::max(step.err, 1e-16);
    if (step.err <= 1.0) {
      t += dt;
      y0 = std::move(step.y_new);
      f = std::move(step.f_new);
      traj.samples.push_back({t, y0, f});
      ++rep.steps_taken;
      if (cfg.stop && cfg.stop(t, y0)) {
        rep.status = RunStatus::Stopped;
        return res;
      }
    } else {
      ++rep.steps_rejected;
    }
    dt *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  }
  return res;
}

std::vector<PerihelionEvent> detect_perihelion(const Trajectory& traj,
                                               double time_tol_rel) {
  if (traj.n != 2)
    throw std::invalid_argument("detect_perihelion: planar trajectories only");
  std::vector<PerihelionEvent> events;
  if (traj.samples.size() < 2) return events;

  auto radial_vel = [&](const std::vector<double>& y,
                        const std::vector<double>& dy) {
    // x . xdot; dy holds the position derivative regardless of representation.
    return y[0] * dy[0] + y[1] * dy[1];
  };

  const double span = traj.t_end() - traj.t0();
  const double ttol = time_tol_rel * span;

  for (size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const Sample& a = traj.samples[i];
    const Sample& b = traj.samples[i + 1];
    const double ga = radial_vel(a.y, a.dy);
    const double gb = radial_vel(b.y, b.dy);
    // Chatter guard for (near-)circular orbits: require a genuine sign change.
    const double scale = 1e-12 * std::hypot(a.y[0], a.y[1]) *
                         std::hypot(a.dy[0], a.dy[1]);
    if (!(ga < -scale && gb > scale)) continue;

    double lo = a.t, hi = b.t;
    while (hi - lo > ttol) {
      const double mid = 0.5 * (lo + hi);
      const auto y = traj.state_at(mid);
      const auto dy = traj.derivative_at(mid);
      (radial_vel(y, dy) < 0.0 ? lo : hi) = mid;
    }
    const double te = 0.5 * (lo + hi);
    const auto y = traj.state_at(te);
    events.push_back({te, std::atan2(y[1], y[0]), std::hypot(y[0], y[1])});
  }
  return events;
}

PrecessionEstimate precession_estimate(const std::vector<PerihelionEvent>& events) {
  if (events.size() < 3)
    throw InsufficientEventsError(
        "precession_estimate: need at least 3 perihelion events, got " +
        std::to_string(events.size()));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> gaps;
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    double d = events[i + 1].angle - events[i].angle;
    // Angle advance per radial period is 2 pi + gap; fold to (-pi, pi].
    d = std::remainder(d, two_pi);
    gaps.push_back(d);
  }
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size());
  return {mean, std::sqrt(var), gaps.size()};
}

void attach_diagnostics(Trajectory& traj, const DiagContext& ctx,
                        RunReport& rep) {
  traj.diag.clear();
  traj.diag.reserve(traj.samples.size());
  const bool relativistic = ctx.kind == ForceModel::Kind::RelativisticKepler;
  traj.momentum_rep = relativistic;

  for (const Sample& s : traj.samples) {
    PhaseState st;
    st.t = s.t;
    st.x = load_vec(s.y, traj.n, 0);
    st.v = load_vec(s.y, traj.n, traj.n);
    st.momentum_rep = relativistic;

    SampleDiag d;
    d.angular_momentum = angular_momentum(st, ctx.params, relativistic);
    switch (ctx.kind) {
      case ForceModel::Kind::RelativisticKepler:
        d.gamma = gamma_of(st, ctx.params);
        d.energy = relativistic_energy(st, ctx.params, *ctx.potential);
        d.region = classify_region(st.x, ctx.h, ctx.params, *ctx.potential);
        break;
      case ForceModel::Kind::TransformedZh: {
        TransformedPotential Z(ctx.potential, ctx.h, ctx.params);
        d.gamma = std::numeric_limits<double>::quiet_NaN();
        d.energy = classical_energy(st, ctx.params, Z);
        d.region = classify_region(st.x, ctx.h, ctx.params, *ctx.potential);
        break;
      }
      default:
        d.gamma = std::numeric_limits<double>::quiet_NaN();
        d.energy = 0.5 * ctx.params.m * st.v.norm2() - ctx.potential->value(st.x);
        d.region = Region::OmegaH;
        break;
    }
    traj.diag.push_back(d);
  }

  if (!traj.diag.empty()) {
    const double e0 = traj.diag.front().energy;
    const double l0 = traj.diag.front().angular_momentum;
    double de = 0.0, dl = 0.0;
    for (const SampleDiag& d : traj.diag) {
      de = std::max(de, std::abs(d.energy - e0));
      dl = std::max(dl, std::abs(d.angular_momentum - l0));
    }
    rep.energy_drift_rel = de / std::max(1.0, std::abs(e0));
    rep.angular_momentum_drift_rel = dl / std::max(1.0, std::abs(l0));
  }
}

}  // namespace relkep
