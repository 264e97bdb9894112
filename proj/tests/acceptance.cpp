// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit on any
// failure. All runs use scaled units unless stated otherwise.

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "relkep/analytic.hpp"
#include "relkep/integrate.hpp"
#include "relkep/reparam.hpp"

using namespace relkep;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s (%s)\n", idx, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++failures;
}

template <class Fn>
void guarded(int idx, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(idx, false, std::string("exception: ") + e.what());
  }
}

// Apsis radius of the relativistic Kepler orbit with energy h and angular
// momentum L (m = c = alpha = 1): root of r sqrt(gamma^2 - 1) = L with the
// on-shell gamma = V + h + 1.
double apsis_radius(double h, double L, double lo, double hi) {
  auto g = [&](double r) {
    const double gamma = 1.0 / r + h + 1.0;
    return r * std::sqrt(gamma * gamma - 1.0) - L;
  };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<Vec, Vec> tangential_start(double r, double h) {
  const double gamma = 1.0 / r + h + 1.0;
  return {Vec(r, 0.0), Vec(0.0, std::sqrt(gamma * gamma - 1.0))};
}

IntegratorConfig cfg_at(double rtol, double atol) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = atol;
  return cfg;
}

// Stop once the polar angle has accumulated the requested number of
// revolutions (in either sense).
void stop_after_revolutions(IntegratorConfig& cfg, double revs) {
  auto acc = std::make_shared<double>(0.0);
  auto prev = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  cfg.stop = [acc, prev, revs](double, std::span<const double> y) {
    const double th = std::atan2(y[1], y[0]);
    if (std::isfinite(*prev)) *acc += std::remainder(th - *prev, two_pi);
    *prev = th;
    return std::abs(*acc) >= revs * two_pi;
  };
}

const PhysicalParams unit_params{};

// Criterion 1: forward equivalence for the (h = -0.3, L = 0.9) orbit over
// 5 revolutions at rtol 1e-10: sup position gap < 1e-5 and transported
// classical energy equal to h within 1e-8 of the local energy scale.
void criterion_1() {
  auto V = std::make_shared<KeplerPotential>(1.0, 1e-9);
  const double h = -0.3, L = 0.9;
  const double r0 = apsis_radius(h, L, 2.0, 3.3);
  auto [x0, p0] = tangential_start(r0, h);
  IntegratorConfig cfg = cfg_at(1e-10, 1e-12);
  cfg.r_min = 1e-9;
  stop_after_revolutions(cfg, 5.0);
  auto rep = verify_equivalence(unit_params, V, h, x0, p0, 500.0, cfg);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sup gap %.3g, energy gap %.3g, t span %.3g, s span %.3g",
                rep.sup_position_gap, rep.energy_gap, rep.t_span, rep.s_span);
  report(1, rep.sup_position_gap < 1e-5 && rep.energy_gap < 1e-8, buf);
}

// Criterion 2: backward transport reproduces relativistic energy h and the
// Lorentz identity 1 - |xdot|^2/c^2 = (mc^2/(V+h+mc^2))^2 within 1e-8.
void criterion_2() {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r0 = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r0, h);
  const Vec v0 = velocity_from_momentum(p0, unit_params);
  const double factor = V->value(x0) + h + 1.0;
  auto zrun = integrate_with_inverse_clock(unit_params, V, h, x0, factor * v0,
                                           40.0, cfg_at(1e-12, 1e-14));
  auto tb = transport_backward(zrun, 2048);
  double max_energy = 0.0, max_identity = 0.0;
  for (size_t k = 0; k < tb.param.size(); ++k) {
    PhaseState st{tb.param[k], tb.pos[k], tb.vel[k], false};
    max_energy = std::max(max_energy,
                          std::abs(relativistic_energy(st, unit_params, *V) - h));
    const double denom = V->value(tb.pos[k]) + h + 1.0;
    max_identity = std::max(
        max_identity,
        std::abs(1.0 - tb.vel[k].norm2() - 1.0 / (denom * denom)));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max energy gap %.3g, max identity gap %.3g",
                max_energy, max_identity);
  report(2, max_energy < 1e-8 && max_identity < 1e-8, buf);
}

// Criterion 3: clock round trip |eta(zeta(t)) - t| < 1e-8 T and zeta strictly
// increasing with rate in (0, 1].
void criterion_3() {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r0 = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r0, h);
  auto fwd = integrate_with_forward_clock(unit_params, V, h, x0, p0, 50.0,
                                          cfg_at(1e-12, 1e-14));
  bool monotone = fwd.report.status == RunStatus::Ok;
  for (size_t i = 0; i < fwd.size() && monotone; ++i) {
    if (!(fwd.clock_rate(i) > 0.0 && fwd.clock_rate(i) <= 1.0 + 1e-14))
      monotone = false;
    if (i > 0 && !(fwd.clock(i) > fwd.clock(i - 1))) monotone = false;
  }
  auto rep = verify_equivalence(unit_params, V, h, x0, p0, 50.0,
                                cfg_at(1e-12, 1e-14));
  char buf[120];
  std::snprintf(buf, sizeof buf, "round-trip gap %.3g of T, rates monotone: %s",
                rep.clock_roundtrip_gap, monotone ? "yes" : "no");
  report(3, monotone && rep.clock_roundtrip_gap < 1e-8, buf);
}

// Criterion 4: transformed field for Kepler V equals the ell = 4 central
// force with (alpha(1+h/mc^2), G^2 M^2 m/c^2) to machine precision at 1e4
// random states.
void criterion_4() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> radius(0.2, 8.0);
  std::uniform_real_distribution<double> angle(0.0, two_pi);
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  std::uniform_real_distribution<double> energy(-0.5, 0.9);
  double worst = 0.0;
  for (int block = 0; block < 100; ++block) {
    const double h = energy(rng);
    auto ft = transformed_field(unit_params, h, std::make_shared<KeplerPotential>(1.0));
    auto fc = central_force_field(
        coefficients_for(CoeffFamily::SpecialRelativity, h, 0.0, unit_params),
        unit_params);
    for (int i = 0; i < 100; ++i) {
      const double r = radius(rng), th = angle(rng);
      std::vector<double> y{r * std::cos(th), r * std::sin(th), vel(rng), vel(rng)};
      std::vector<double> a(4), b(4);
      ft.eval(0.0, y, a);
      fc.eval(0.0, y, b);
      for (int k = 0; k < 4; ++k)
        worst = std::max(worst, std::abs(a[k] - b[k]) /
                                    std::max(1.0, std::abs(b[k])));
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "max relative deviation %.3g at 1e4 states", worst);
  report(4, worst < 1e-13, buf);
}

// Criterion 5: measured perihelion advance for m beta_hat / L^2 = 0.19 equals
// 2 pi (1/0.9 - 1) within 0.1% over 10 orbits.
void criterion_5() {
  const double beta_hat = 0.19, L = 1.0, ecc = 0.4;
  const ConicOrbit conic = binet_parameters(1.0, beta_hat, L, 1.0);
  const double r0 = conic.p / (1.0 + ecc);
  auto field = central_force_field({4, 1.0, beta_hat}, unit_params);
  auto res = integrate(field, {r0, 0.0, 0.0, L / r0}, 0.0, 85.0,
                       cfg_at(1e-12, 1e-14));
  auto events = detect_perihelion(res.trajectory);
  if (events.size() < 11) {
    report(5, false, "fewer than 11 perihelion events over the run");
    return;
  }
  events.resize(11);  // exactly 10 orbit-to-orbit gaps
  auto est = precession_estimate(events);
  const double expected = apsidal_precession(conic.k);
  const double rel = std::abs(est.mean - expected) / expected;
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "measured %.7f vs 0.6981317 rad/orbit, relative error %.3g",
                est.mean, rel);
  report(5, rel < 1e-3, buf);
}

// Criterion 6: at c = 1e3, h = 0, L = 1, measured Levi-Civita / SR precession
// in [5.88, 6.12] and measured Schwarzschild precession within 1% of
// 6 pi G^2 M^2 m^2/(c^2 L^2).
void criterion_6() {
  PhysicalParams params;
  params.c = 1e3;
  const double L = 1.0, ecc = 0.3;
  auto measure = [&](CoeffFamily family) {
    const CentralForceCoeffs coeffs = coefficients_for(family, 0.0, L, params);
    const double scale = L * L / (params.m * coeffs.alpha_hat);
    const double r0 = scale / (1.0 + ecc);
    const double a = scale / (1.0 - ecc * ecc);
    const double period = two_pi * std::sqrt(a * a * a * params.m / coeffs.alpha_hat);
    auto field = central_force_field(coeffs, params);
    auto res = integrate(field, {r0, 0.0, 0.0, L / (params.m * r0)}, 0.0,
                         8.6 * period, cfg_at(1e-12, 1e-14));
    auto events = detect_perihelion(res.trajectory);
    return precession_estimate(events).mean;
  };
  const double sr = measure(CoeffFamily::SpecialRelativity);
  const double lc = measure(CoeffFamily::LeviCivita);
  const double sw = measure(CoeffFamily::Schwarzschild);
  const double ratio = lc / sr;
  const double sw_expected = precession_schwarzschild_leading(params, L);
  const double sw_rel = std::abs(sw - sw_expected) / sw_expected;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "LC/SR ratio %.4f, Schwarzschild %.4g vs %.4g (rel err %.3g)",
                ratio, sw, sw_expected, sw_rel);
  report(6, ratio >= 5.88 && ratio <= 6.12 && sw_rel < 0.01, buf);
}

// Criterion 7: relativistic energy and angular momentum drift < 1e-8 over
// 100 orbits at rtol 1e-10, with V + h >= -1e-9 at every sample.
void criterion_7() {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r0 = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r0, h);
  IntegratorConfig cfg = cfg_at(1e-10, 1e-12);
  stop_after_revolutions(cfg, 100.0);
  auto field = relativistic_field(unit_params, V);
  auto res = integrate(field, {x0[0], x0[1], p0[0], p0[1]}, 0.0, 10000.0, cfg);
  if (res.report.status != RunStatus::Stopped) {
    report(7, false, std::string("run ended with status ") +
                         run_status_name(res.report.status));
    return;
  }
  DiagContext ctx{unit_params, V, ForceModel::Kind::RelativisticKepler, h};
  attach_diagnostics(res.trajectory, ctx, res.report);
  double min_confinement = 0.0;
  for (const Sample& s : res.trajectory.samples) {
    min_confinement =
        std::min(min_confinement, V->value(Vec(s.y[0], s.y[1])) + h);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "energy drift %.3g, L drift %.3g, min(V+h) %.3g over %ld steps",
                res.report.energy_drift_rel,
                res.report.angular_momentum_drift_rel, min_confinement,
                res.report.steps_taken);
  report(7,
         res.report.energy_drift_rel < 1e-8 &&
             res.report.angular_momentum_drift_rel < 1e-8 &&
             min_confinement >= -1e-9,
         buf);
}

// Criterion 8: a transformed-system solution supported in Sigma_h (h = -3)
// transports to a relativistic solution with energy h + 2mc^2 = -1 within 1e-6.
void criterion_8() {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const Vec z0(2.0, 0.0);
  const Vec z0p(0.0, std::sqrt(1.25));  // classical energy -3 against Z_{-3}
  auto rep = sigma_branch_check(unit_params, V, -3.0, z0, z0p, 3.0,
                                cfg_at(1e-12, 1e-14));
  char buf[120];
  std::snprintf(buf, sizeof buf, "expected energy %.6f, max gap %.3g",
                rep.expected_energy, rep.max_energy_gap);
  report(8, rep.pass && std::abs(rep.expected_energy + 1.0) < 1e-12 &&
                rep.max_energy_gap < 1e-6,
         buf);
}

// Criterion 9: analytic grad Z_h vs central finite differences < 1e-6
// relative, and RK4 shows order >= 3.9 on the Kepler problem.
void criterion_9() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> radius(0.2, 10.0);
  std::uniform_real_distribution<double> angle(0.0, two_pi);
  std::uniform_real_distribution<double> energy(-0.5, 0.5);
  double worst_fd = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const double r = radius(rng), th = angle(rng), h = energy(rng);
    const Vec x(r * std::cos(th), r * std::sin(th));
    const Vec grad = transformed_potential(x, h, unit_params).gradient;
    const double step = 1e-5 * r;
    for (int i = 0; i < 2; ++i) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd = (transformed_potential(xp, h, unit_params).value -
                         transformed_potential(xm, h, unit_params).value) /
                        (2.0 * step);
      worst_fd = std::max(worst_fd, std::abs(fd - grad[i]) /
                                        std::max(1.0, std::abs(grad[i])));
    }
  }

  auto field = classical_kepler_field(unit_params);
  auto err_with = [&](long steps) {
    std::vector<double> y{1.0, 0.0, 0.0, 1.0};
    const double dt = two_pi / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) y = rk4_step(field, 0.0, y, dt);
    return std::hypot(y[0] - 1.0, y[1]);
  };
  const double order = std::log2(err_with(400) / err_with(800));
  char buf[120];
  std::snprintf(buf, sizeof buf, "max FD gap %.3g, RK4 observed order %.3f",
                worst_fd, order);
  report(9, worst_fd < 1e-6 && order >= 3.9, buf);
}

}  // namespace

int main() {
  guarded(1, criterion_1);
  guarded(2, criterion_2);
  guarded(3, criterion_3);
  guarded(4, criterion_4);
  guarded(5, criterion_5);
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  guarded(9, criterion_9);
  if (failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
