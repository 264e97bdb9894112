#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "relkep/reparam.hpp"

using namespace relkep;

namespace {

const PhysicalParams unit_params{};
constexpr double two_pi = 2.0 * std::numbers::pi;

struct ConstPotential final : Potential {
  double v;
  explicit ConstPotential(double val) : v(val) {}
  double value(const Vec&) const override { return v; }
  Vec gradient(const Vec& x) const override { return Vec::zero(x.dim()); }
};

IntegratorConfig tight(double rtol = 1e-12, double atol = 1e-14) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = atol;
  return cfg;
}

// Apsis radius for the relativistic Kepler orbit with energy h and angular
// momentum L (m = c = alpha = 1): solves r sqrt(gamma^2 - 1) = L with the
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

// Tangential initial condition with exact energy h at radius r.
std::pair<Vec, Vec> tangential_start(double r, double h) {
  const double gamma = 1.0 / r + h + 1.0;
  const Vec x0(r, 0.0);
  const Vec p0(0.0, std::sqrt(gamma * gamma - 1.0));
  return {x0, p0};
}

}  // namespace

TEST_CASE("forward clock with a constant potential") {
  // Rate 1/(V + h + 1) is constant: zeta(3) = 2 for V = 0.5, h = 0.
  auto V = std::make_shared<ConstPotential>(0.5);
  const double gamma = 1.5;  // V + h + 1
  const double speed = std::sqrt(1.0 - 1.0 / (gamma * gamma));
  const Vec p0(gamma * speed, 0.0);
  auto run = integrate_with_forward_clock(unit_params, V, 0.0, Vec(1, 0), p0,
                                          3.0, tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  CHECK(run.clock_end() == doctest::Approx(2.0).epsilon(1e-10));
  for (size_t i = 0; i < run.size(); ++i)
    CHECK(run.clock_rate(i) == doctest::Approx(1.0 / 1.5));
}

TEST_CASE("forward clock rate is 1 on the zero-velocity boundary") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.5;
  const double r = 2.0;  // V(r) + h = 0
  auto run = integrate_with_forward_clock(unit_params, V, h, Vec(r, 0),
                                          Vec(0, 0), 1e-4, tight());
  CHECK(run.clock_rate(0) == doctest::Approx(1.0));
}

TEST_CASE("forward clock is strictly increasing with rate in (0, 1]") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  auto run = integrate_with_forward_clock(unit_params, V, h, x0, p0, 30.0, tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  for (size_t i = 0; i < run.size(); ++i) {
    CHECK(run.clock_rate(i) > 0.0);
    CHECK(run.clock_rate(i) <= 1.0 + 1e-14);
    if (i > 0) CHECK(run.clock(i) > run.clock(i - 1));
  }
}

TEST_CASE("forward clock rejects an energy mismatch") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  CHECK_THROWS_AS(integrate_with_forward_clock(unit_params, V, h + 0.1, x0, p0,
                                               10.0, tight()),
                  EnergyMismatchError);
}

TEST_CASE("inverse clock with a constant potential") {
  // t(s) = 1.5 s, the inverse of the forward example.
  auto V = std::make_shared<ConstPotential>(0.5);
  const Vec z0(1, 0);
  const Vec z0p(std::sqrt(1.25), 0.0);  // classical energy 0 against Z_0
  auto run = integrate_with_inverse_clock(unit_params, V, 0.0, z0, z0p, 2.0,
                                          tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  CHECK(run.clock_end() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("inverse clock rate is at least 1 and time increases") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  const Vec v0 = velocity_from_momentum(p0, unit_params);
  const double factor = V->value(x0) + h + 1.0;
  auto run = integrate_with_inverse_clock(unit_params, V, h, x0, factor * v0,
                                          20.0, tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  for (size_t i = 0; i < run.size(); ++i) {
    CHECK(run.clock_rate(i) >= 1.0 - 1e-14);
    if (i > 0) CHECK(run.clock(i) > run.clock(i - 1));
  }
}

TEST_CASE("inverse clock routes sigma states away") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  // r = 2, h = -3: V + h + 2 = -0.5 <= 0, so z0 lies in Sigma_h.
  const Vec z0(2, 0);
  const Vec z0p(0.0, std::sqrt(1.25));
  CHECK_THROWS_AS(integrate_with_inverse_clock(unit_params, V, -3.0, z0, z0p,
                                               1.0, tight()),
                  RegionError);
}

TEST_CASE("transport of a circular orbit rescales time and speed") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  // Circular relativistic orbit at r = 2: v^2 gamma = 1/2.
  double lo = 0.1, hi = 0.9;
  auto bal = [](double v) { return v * v / std::sqrt(1.0 - v * v) - 0.5; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bal(lo) * bal(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double v = 0.5 * (lo + hi);
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  const double h = gamma - 1.0 - 0.5;
  auto run = integrate_with_forward_clock(unit_params, V, h, Vec(2, 0),
                                          Vec(0, gamma * v), 20.0, tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  auto tf = transport_forward(run, 512);
  for (size_t k = 0; k < tf.param.size(); ++k) {
    CHECK(tf.pos[k].norm() == doctest::Approx(2.0).epsilon(1e-9));
    // Speeds scale by V + h + 1 = gamma.
    CHECK(tf.vel[k].norm() == doctest::Approx(gamma * v).epsilon(1e-8));
  }
}

TEST_CASE("transported curve carries classical energy h") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  auto run = integrate_with_forward_clock(unit_params, V, h, x0, p0, 40.0, tight());
  REQUIRE(run.report.status == RunStatus::Ok);
  auto tf = transport_forward(run, 1024);
  TransformedPotential Z(V, h, unit_params);
  for (size_t k = 0; k < tf.param.size(); ++k) {
    const double lambda = 0.5 * tf.vel[k].norm2() - Z.value(tf.pos[k]);
    CHECK(std::abs(lambda - h) < 1e-8);
  }
}

TEST_CASE("backward transport satisfies the Lorentz identity and energy") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  const Vec v0 = velocity_from_momentum(p0, unit_params);
  const double factor = V->value(x0) + h + 1.0;
  auto zrun = integrate_with_inverse_clock(unit_params, V, h, x0, factor * v0,
                                           25.0, tight());
  REQUIRE(zrun.report.status == RunStatus::Ok);
  auto tb = transport_backward(zrun, 1024);
  for (size_t k = 0; k < tb.param.size(); ++k) {
    const double speed2 = tb.vel[k].norm2();
    CHECK(speed2 < 1.0);
    const double denom = V->value(tb.pos[k]) + h + 1.0;
    CHECK(std::abs(1.0 - speed2 - 1.0 / (denom * denom)) < 1e-8);
    PhaseState st{tb.param[k], tb.pos[k], tb.vel[k], false};
    CHECK(std::abs(relativistic_energy(st, unit_params, *V) - h) < 1e-8);
  }
}

TEST_CASE("round trip reproduces the original positions") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  auto fwd = integrate_with_forward_clock(unit_params, V, h, x0, p0, 30.0, tight());
  REQUIRE(fwd.report.status == RunStatus::Ok);

  const Vec v0 = velocity_from_momentum(p0, unit_params);
  const double factor = V->value(x0) + h + 1.0;
  auto zrun = integrate_with_inverse_clock(unit_params, V, h, x0, factor * v0,
                                           fwd.clock_end(), tight());
  REQUIRE(zrun.report.status == RunStatus::Ok);
  auto tb = transport_backward(zrun, 512);
  double sup = 0.0;
  for (size_t k = 0; k < tb.param.size(); ++k) {
    const double t = tb.param[k];
    if (t > fwd.base.t_end()) break;
    const auto y = fwd.base.state_at(t);
    sup = std::max(sup, (tb.pos[k] - Vec(y[0], y[1])).norm());
  }
  CHECK(sup < 1e-8);
}

TEST_CASE("verify_equivalence on a bounded eccentric orbit") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -0.2, L = 1.5;
  const double r_peri = apsis_radius(h, L, 1.0, 1.2);
  auto [x0, p0] = tangential_start(r_peri, h);
  auto rep = verify_equivalence(unit_params, V, h, x0, p0, 60.0, tight());
  CHECK(rep.sup_position_gap < 1e-6);
  CHECK(rep.energy_gap < 1e-8);
  CHECK(rep.clock_roundtrip_gap < 1e-8);
  CHECK(rep.pass);

  CHECK_THROWS_AS(
      verify_equivalence(unit_params, V, h - 0.1, x0, p0, 10.0, tight()),
      EnergyMismatchError);
}

TEST_CASE("sigma branch admissibility and energy value") {
  auto V = std::make_shared<KeplerPotential>(1.0);
  const double h = -3.0;
  // r = 2: Z_h + h = 0.625 >= 0, |z'|^2 = 1.25 is admissible.
  TransformedPotential Z(V, h, unit_params);
  const Vec z0(2, 0);
  CHECK(Z.value(z0) + h == doctest::Approx(0.625));
  const Vec z0p(0.0, std::sqrt(1.25));
  auto rep = sigma_branch_check(unit_params, V, h, z0, z0p, 3.0, tight());
  CHECK(rep.expected_energy == doctest::Approx(-1.0));
  CHECK(rep.max_energy_gap < 1e-6);
  CHECK(rep.pass);

  // Omega_h input is rejected.
  const Vec in_omega(0.25, 0.0);
  CHECK_THROWS_AS(sigma_branch_check(unit_params, V, h, in_omega, Vec(0, 0),
                                     1.0, tight()),
                  RegionError);
}
