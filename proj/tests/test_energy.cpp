#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "eflab/energy.hpp"
#include "oracles.hpp"

using namespace eflab;

namespace {
const Params kP52 = compute_params(5, 2.0, 1.0, 1.0, 1.0);
const Params kP52d = compute_params(5, 2.0, 1.0, 1.0, 0.0);

FowlerState state(double w1, double dw1, double w2, double dw2) {
  FowlerState s;
  s.y = Eigen::Vector4d(w1, dw1, w2, dw2);
  return s;
}
}  // namespace

TEST_CASE("psi hand values") {
  CHECK(psi(state(0, 0, 0, 0), kP52) == 0.0);
  CHECK(psi(state(1, 0, 1, 0), kP52) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK(psi(state(2, 0, 0, 0), kP52) == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("a_kl values and psi consistency at equilibria") {
  KLRoot diag;
  diag.k = diag.l = 0.5;
  CHECK(a_kl(diag, kP52) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  KLRoot axis;
  axis.k = 1.0;
  axis.l = 0.0;
  CHECK(a_kl(axis, kP52) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  oracle::SplitMix rng{17};
  for (int trial = 0; trial < 20; ++trial) {
    const auto [n, p] = oracle::random_admitted_np(rng);
    const Params pa = compute_params(n, p, rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                     rng.uniform(0.05, 2.0));
    for (const auto& r : solve_kl(pa, 80).roots) {
      const double at_eq = psi(state(r.k * pa.C0, 0, r.l * pa.C0, 0), pa);
      CHECK(std::abs(at_eq + a_kl(r, pa)) <= 1e-12 * (1.0 + a_kl(r, pa)));
    }
  }
}

TEST_CASE("energy_E is constant on the explicit singular solution") {
  for (double r : {1e-3, 0.1, 1.0, 42.0, 1e3}) {
    const double u = kP52.C0 * std::pow(r, -kP52.delta);
    const double du = -kP52.delta * kP52.C0 * std::pow(r, -kP52.delta - 1.0);
    const double e = energy_E(r, u, du, 0.0, 0.0, kP52d);
    CHECK(e == doctest::Approx(-4.0 / 3.0 * kP52d.sphere_area).epsilon(1e-11));
  }
  CHECK(energy_E(1.0, 0, 0, 0, 0, kP52) == 0.0);
  CHECK_THROWS_AS(energy_E(-1.0, 1, 0, 1, 0, kP52), std::domain_error);
}

TEST_CASE("energy_E scaling identity") {
  oracle::SplitMix rng{19};
  for (int trial = 0; trial < 50; ++trial) {
    const auto [n, p] = oracle::random_admitted_np(rng);
    const Params pa = compute_params(n, p, rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                     rng.uniform(0.05, 2.0));
    const double r = rng.uniform(0.2, 3.0);
    const double lambda = rng.uniform(0.3, 3.0);
    const double u = rng.uniform(0.1, 2.0), v = rng.uniform(0.1, 2.0);
    const double du = rng.uniform(-1.0, 0.0), dv = rng.uniform(-1.0, 0.0);
    // u^lambda(r) = lambda^delta u(lambda r) evaluated against E(lambda r)
    const double ld = std::pow(lambda, pa.delta);
    const double lhs = energy_E(r, ld * u, ld * lambda * du, ld * v, ld * lambda * dv, pa);
    const double rhs_val = energy_E(lambda * r, u, du, v, dv, pa);
    CHECK(std::abs(lhs - rhs_val) <= 1e-12 * (1.0 + std::abs(rhs_val)));
  }
}

TEST_CASE("audit of a constant-equilibrium trajectory") {
  const RootSet rs = solve_kl(kP52);
  const auto eqs = equilibria(kP52, rs);
  FowlerState eq;
  eq.y = Eigen::Vector4d(1, 0, 1, 0);
  const Trajectory traj = integrate(eq, 30.0, kP52, System::standard, {}, eqs);
  const EnergyAudit a = audit(traj, kP52, rs);
  CHECK(a.identity_residual_max <= 1e-10);
  CHECK(a.monotone_violation_max <= 1e-12);
  REQUIRE(a.limit_pos_inf.has_value());
  REQUIRE(a.limit_neg_inf.has_value());
  CHECK(*a.limit_pos_inf == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(*a.limit_neg_inf == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(a.classification == EnergyAudit::Classification::minus_A_kl);
  CHECK(a.matched_root == 1);  // the (.5, .5) root
}

TEST_CASE("audit of the scalar connecting orbit") {
  const RootSet rs = solve_kl(kP52d);
  const Trajectory traj = shoot(kP52d, rs, 1.0, 0.0, 1e-4, 80.0);
  const EnergyAudit a = audit(traj, kP52d, rs);
  REQUIRE(a.limit_neg_inf.has_value());
  REQUIRE(a.limit_pos_inf.has_value());
  CHECK(std::abs(*a.limit_neg_inf) <= 1e-6);
  CHECK(*a.limit_pos_inf == doctest::Approx(-4.0 / 3.0).epsilon(1e-8));
  CHECK(a.classification == EnergyAudit::Classification::minus_A_kl);
  CHECK(rs.roots[a.matched_root].k == doctest::Approx(1.0));
  CHECK(rs.roots[a.matched_root].l == doctest::Approx(0.0));
  CHECK(a.monotone_violation_max <= 1e-10);
}

TEST_CASE("monotonicity and identity on random trajectories") {
  oracle::SplitMix rng{29};
  const RootSet rs = solve_kl(kP52);
  for (int trial = 0; trial < 25; ++trial) {
    FowlerState s0;
    s0.y = Eigen::Vector4d(rng.uniform(0.05, 1.5), rng.uniform(-0.5, 0.5),
                           rng.uniform(0.05, 1.5), rng.uniform(-0.5, 0.5));
    const Trajectory traj = integrate(s0, 20.0, kP52, System::standard);
    const EnergyAudit a = audit(traj, kP52, rs);
    CHECK(a.monotone_violation_max <= 1e-6);
    CHECK(a.identity_residual_max <= 1e-6);
  }
}

TEST_CASE("audit rejects kelvin trajectories and vice versa") {
  const RootSet rs = solve_kl(kP52);
  FowlerState s0;
  s0.y = Eigen::Vector4d(0.5, 0, 0.5, 0);
  const Trajectory traj = integrate(s0, 5.0, kP52, System::standard);
  CHECK_THROWS_AS(audit_kelvin(traj, kP52, rs), std::domain_error);
  Trajectory fake = traj;
  fake.system = System::kelvin;
  CHECK_THROWS_AS(audit(fake, kP52, rs), std::domain_error);
}

TEST_CASE("pohozaev constancy at the critical exponent") {
  const Params pc = compute_params(4, 3.0, 1.0, 1.0, 1.0);
  FowlerState eq;
  eq.y = Eigen::Vector4d(0.5, 0, 0.5, 0);
  const Trajectory traj = integrate(eq, 20.0, pc, System::standard);
  CHECK(pohozaev_check(traj, pc) <= 1e-8);

  oracle::SplitMix rng{31};
  for (int trial = 0; trial < 5; ++trial) {
    FowlerState s0;
    s0.y = Eigen::Vector4d(rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3),
                           rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3));
    const Trajectory t = integrate(s0, 20.0, pc, System::standard);
    CHECK(pohozaev_check(t, pc) <= 1e-8);
  }

  FowlerState s0;
  s0.y = Eigen::Vector4d(1, 0, 1, 0);
  const Trajectory sub = integrate(s0, 5.0, kP52, System::standard);
  CHECK_THROWS_AS(pohozaev_check(sub, kP52), std::domain_error);
}
