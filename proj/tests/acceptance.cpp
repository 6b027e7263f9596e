// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Criterion 12 drives the CLI binary named by $EFLAB_BIN.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eflab/energy.hpp"
#include "eflab/fowler.hpp"
#include "eflab/params.hpp"
#include "eflab/roots.hpp"
#include "eflab/transforms.hpp"
#include "oracles.hpp"

using namespace eflab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << "  " << name;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << '\n';
  if (!ok) ++g_failures;
}

Trajectory slice(const Trajectory& traj, double a, double b) {
  Trajectory out = traj;
  out.samples.clear();
  for (const auto& s : traj.samples)
    if (s.t >= a && s.t <= b) out.samples.push_back(s);
  return out;
}

// ---- criteria ------------------------------------------------------------

void criterion_1() {
  const std::vector<std::pair<int, std::vector<double>>> grid = {
      {3, {4.0, 4.6}}, {4, {2.4, 2.8}}, {5, {1.9, 2.2}}, {6, {1.6, 1.9}}};
  const std::vector<std::array<double, 3>> triples = {
      {1, 1, 1}, {1, 2, 0.5}, {0.7, 1.3, 2}, {2, 0.5, 1.2}, {1.5, 1.5, 0.3}};
  double worst_rhs = 0.0, worst_psi = 0.0;
  for (const auto& [n, ps] : grid) {
    for (double p : ps) {
      for (const auto& [m1, m2, b] : triples) {
        const Params pa = compute_params(n, p, m1, m2, b);
        for (const auto& r : solve_kl(pa, 150).roots) {
          FowlerState eq;
          eq.y = Eigen::Vector4d(r.k * pa.C0, 0, r.l * pa.C0, 0);
          worst_rhs = std::max(worst_rhs,
                               rhs(eq.y, pa, System::standard).lpNorm<Eigen::Infinity>());
          worst_psi = std::max(worst_psi, std::abs(psi(eq, pa) + a_kl(r, pa)));
        }
      }
    }
  }
  report(1, "constant-solution exactness", worst_rhs <= 1e-12 && worst_psi <= 1e-10,
         "rhs " + sci(worst_rhs) + ", psi " + sci(worst_psi));
}

void criterion_2() {
  oracle::SplitMix rng{101};
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [n, p] = oracle::random_admitted_np(rng);
    const Params pa = compute_params(n, p, rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0),
                                     rng.uniform(0.0, 3.0));
    ok = ok && std::abs(pa.delta + pa.delta0 - (n - 2.0)) <= 1e-13 &&
         std::abs(pa.tau0 + pa.tau) <= 1e-13 && std::abs(pa.sigma0 - pa.sigma) <= 1e-13 &&
         std::abs(std::pow(pa.C0, p - 1.0) - pa.sigma) <= 1e-13 * pa.sigma;
  }
  report(2, "coefficient identities", ok);
}

void criterion_3() {
  oracle::SplitMix rng{103};
  IntegratorOptions opts;  // tol 1e-10 default
  double worst_mono = 0.0, worst_ident = 0.0;
  for (const Params& pa : {compute_params(5, 2.0, 1.0, 1.0, 1.0),
                           compute_params(4, 2.5, 0.8, 1.2, 0.6)}) {
    const RootSet rs = solve_kl(pa, 100);
    for (int trial = 0; trial < 100; ++trial) {
      FowlerState s0;
      s0.y = Eigen::Vector4d(rng.uniform(0.05, 1.5), rng.uniform(-0.5, 0.5),
                             rng.uniform(0.05, 1.5), rng.uniform(-0.5, 0.5));
      const Trajectory traj = integrate(s0, 20.0, pa, System::standard, opts);
      const EnergyAudit a = audit(traj, pa, rs);
      worst_mono = std::max(worst_mono, a.monotone_violation_max);
      worst_ident = std::max(worst_ident, a.identity_residual_max);
    }
  }
  report(3, "monotonicity audit", worst_mono <= 1e-6 && worst_ident <= 1e-6,
         "violation " + sci(worst_mono) + ", identity " +
             sci(worst_ident));
}

void criterion_4() {
  const Params pc = compute_params(4, 3.0, 1.0, 1.0, 1.0);
  oracle::SplitMix rng{104};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    FowlerState s0;
    s0.y = Eigen::Vector4d(rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3),
                           rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3));
    const Trajectory traj = integrate(s0, 20.0, pc, System::standard);
    worst = std::max(worst, pohozaev_check(traj, pc));
  }
  report(4, "critical constancy", worst <= 1e-8, "max deviation " + sci(worst));
}

void criterion_5() {
  const Params pa = compute_params(5, 2.0, 1.0, 1.0, 1.0);
  oracle::SplitMix rng{105};
  double worst_res = 0.0, worst_inv = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    FowlerState s0;
    s0.y = Eigen::Vector4d(rng.uniform(0.2, 1.2), rng.uniform(-0.3, 0.3),
                           rng.uniform(0.2, 1.2), rng.uniform(-0.3, 0.3));
    const Trajectory traj = integrate(s0, 15.0, pa, System::standard);
    const Trajectory rev = kelvin_reverse(traj, pa);
    worst_res = std::max(worst_res, reversal_residual(traj, rev, pa));
    const Trajectory back = kelvin_reverse(rev, pa);
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
      worst_inv = std::max(worst_inv, (back.samples[i].y - traj.samples[i].y)
                                          .lpNorm<Eigen::Infinity>() +
                                          std::abs(back.samples[i].t - traj.samples[i].t));
  }
  report(5, "kelvin time-reversal", worst_res <= 1e-10 && worst_inv <= 1e-13,
         "residual " + sci(worst_res));
}

void criterion_6() {
  const Params pa = compute_params(5, 2.0, 1.0, 1.0, 0.0);
  const RootSet rs = solve_kl(pa, 150);
  const Trajectory traj = shoot(pa, rs, 1.0, 0.0, 1e-4, 80.0);
  const bool converged = traj.status == TrajStatus::converged_to_equilibrium;
  const bool limit_ok = converged && std::abs(traj.samples.back().w1() - 2.0) <= 1e-6;

  const FowlerState a = dense_eval(traj, pa, 0.1);
  const FowlerState b = dense_eval(traj, pa, 0.6);
  const double slope = (std::log(b.w1()) - std::log(a.w1())) / 0.5;
  const bool slope_ok = std::abs(slope - pa.delta0) <= 0.01 * pa.delta0;

  const Eigen::Vector4d ref =
      oracle::rk4_fixed(traj.samples.front().y, 0.0, 10.0, 1e-5, pa);
  const double oracle_diff =
      (dense_eval(traj, pa, 10.0).y - ref).lpNorm<Eigen::Infinity>();
  report(6, "scalar-oracle shooting", limit_ok && slope_ok && oracle_diff <= 1e-7,
         "slope " + sci(slope) + ", oracle diff " + sci(oracle_diff));
}

void criterion_7() {
  struct Run {
    Params pa;
    double a1, a2;
  };
  const std::vector<Run> runs = {
      {compute_params(5, 2.0, 1.0, 1.0, 0.0), 1.0, 0.0},
      {compute_params(5, 2.0, 1.0, 1.0, 1.0), 1.0, 1.0},
      {compute_params(5, 2.0, 1.0, 2.0, 0.5), 1.0, 1.0},
      {compute_params(4, 2.5, 1.0, 1.0, 0.8), 1.0, 1.0},
  };
  bool ok = true;
  std::string detail;
  for (const auto& run : runs) {
    const RootSet rs = solve_kl(run.pa, 150);
    const Trajectory traj = shoot(run.pa, rs, run.a1, run.a2, 1e-4, 120.0);
    if (traj.status != TrajStatus::converged_to_equilibrium) continue;
    const EnergyAudit a = audit(traj, run.pa, rs);
    if (!a.limit_neg_inf || std::abs(*a.limit_neg_inf) > 1e-6) ok = false;
    if (!a.limit_pos_inf) {
      ok = false;
      continue;
    }
    bool in_set = std::abs(*a.limit_pos_inf) <= 1e-6;
    for (const auto& r : rs.roots)
      if (std::abs(*a.limit_pos_inf + r.A_kl) <= 1e-6) in_set = true;
    if (!in_set) {
      ok = false;
      detail += "limit " + sci(*a.limit_pos_inf) + " outside set; ";
    }
  }
  report(7, "limit set of shooting runs", ok, detail);
}

void criterion_8() {
  oracle::SplitMix rng{108};
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const auto [n, p] = oracle::random_admitted_np(rng);
    const Params pa = compute_params(n, p, rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5),
                                     rng.uniform(0.05, 2.5));
    const RootSet rs = solve_kl(pa);
    const auto expected = oracle::grid_scan_roots(pa);
    std::vector<KLRoot> interior;
    for (const auto& r : rs.roots)
      if (r.branch == KLRoot::Branch::both_positive) interior.push_back(r);
    if (interior.size() != expected.size() || !rs.warnings.empty()) {
      ok = false;
      detail = "trial " + std::to_string(trial) + ": count " +
               std::to_string(interior.size()) + " vs " + std::to_string(expected.size()) +
               ", warnings " + std::to_string(rs.warnings.size());
      break;
    }
    for (std::size_t i = 0; i < interior.size(); ++i)
      if (std::abs(interior[i].k - expected[i].k) > 1e-8 ||
          std::abs(interior[i].l - expected[i].l) > 1e-8)
        ok = false;
  }
  report(8, "root-solver oracle equivalence", ok, detail);
}

void criterion_9() {
  IntegratorOptions opts;
  opts.tol = {1e-12, 1e-12};
  bool ok = true;
  std::string detail;
  int which = 0;
  for (const Params& pa : {compute_params(5, 2.0, 1.0, 1.0, 0.0),
                           compute_params(5, 2.0, 1.0, 1.0, 1.0)}) {
    const RootSet rs = solve_kl(pa, 150);
    const Trajectory traj =
        shoot(pa, rs, 1.0, which == 0 ? 0.0 : 1.0, 1e-4, 80.0, opts);
    const Trajectory window = slice(traj, 10.0, 10.0 + 6.0 * std::log(10.0));
    const double res400 = pde_residual(to_radial(window, pa, 400), pa);
    const double res800 = pde_residual(to_radial(window, pa, 800), pa);
    if (res400 > 1e-4 || res400 / res800 < 3.0) ok = false;
    detail += "res400 " + sci(res400) + ", ratio " +
              sci(res400 / res800) + "; ";
    ++which;
  }
  report(9, "pde residual of reconstructed profiles", ok, detail);
}

void criterion_10() {
  bool ok = true;
  for (int n : {4, 5, 6}) {
    const double p = n == 4 ? 2.5 : (n == 5 ? 2.0 : 1.8);
    const Params pa = compute_params(n, p, 1.0, 1.3, 0.7);
    for (auto& eq : equilibria(pa, solve_kl(pa, 100))) {
      if (eq.kind != EquilibriumInfo::Kind::semi_trivial) continue;
      const auto lin = linearize(eq, pa, System::standard);
      if (!lin.non_lipschitz) ok = false;
    }
  }
  const Params p3 = compute_params(3, 4.0, 1.0, 1.3, 0.7);
  for (auto& eq : equilibria(p3, solve_kl(p3, 100))) {
    if (eq.kind != EquilibriumInfo::Kind::semi_trivial) continue;
    const auto lin = linearize(eq, p3, System::standard);
    if (lin.non_lipschitz || lin.eigenvalues.size() != 4) ok = false;
  }
  report(10, "non-lipschitz dimension dichotomy", ok);
}

void criterion_11() {
  bool ok = true;
  for (const Params& pa : {compute_params(5, 2.0, 1.0, 1.0, 0.0),
                           compute_params(5, 2.0, 1.0, 1.0, 1.0)}) {
    const RootSet rs = solve_kl(pa, 150);
    const Trajectory traj =
        shoot(pa, rs, 1.0, pa.beta == 0.0 ? 0.0 : 1.0, 1e-4, 80.0);
    if (traj.status != TrajStatus::converged_to_equilibrium) ok = false;
    for (const auto& s : traj.samples) {
      if (s.w1() > 0.0 && !(s.dw1() > -pa.delta * s.w1())) ok = false;
      if (s.w2() > 0.0 && !(s.dw2() > -pa.delta * s.w2())) ok = false;
    }
    const RadialProfile prof = to_radial(traj, pa, 300);
    for (std::size_t j = 0; j < prof.r.size(); ++j) {
      if (prof.u[j] > 0.0 && !(prof.du[j] < 0.0)) ok = false;
      if (prof.v[j] > 0.0 && !(prof.dv[j] < 0.0)) ok = false;
    }
  }
  report(11, "velocity lower bound and strict radial decay", ok);
}

std::string read_stripped(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("wall_time_ms") != std::string::npos) continue;
    out << line << '\n';
  }
  return out.str();
}

void criterion_12() {
  const char* bin = std::getenv("EFLAB_BIN");
  if (!bin) {
    report(12, "determinism of CLI artifacts", false, "EFLAB_BIN not set");
    return;
  }
  const fs::path base = fs::temp_directory_path() / "eflab_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"problem":{"n":5,"p":2.0,"mu1":1.0,"mu2":1.0,"beta":1.0},)"
        << R"("numerics":{"t_end":60.0},"direction":[1.0,1.0],"seed":7})" << '\n';
  }
  bool ok = true;
  std::string detail;
  for (const std::string cmd : {"params", "roots", "shoot"}) {
    for (const std::string tag : {"a", "b"}) {
      // Same relative --out from two working directories, so the artifacts
      // (including the resolved config echoed into the manifest) are
      // legitimately byte-comparable.
      const fs::path wd = base / (cmd + "_" + tag);
      fs::create_directories(wd);
      const std::string invocation = "cd " + wd.string() + " && " + std::string(bin) +
                                     " " + cmd + " --config " + cfg.string() +
                                     " --out out >/dev/null 2>&1";
      if (std::system(invocation.c_str()) != 0) {
        ok = false;
        detail = cmd + " failed";
      }
    }
    if (!ok) break;
    for (const auto& entry : fs::directory_iterator(base / (cmd + "_a") / "out")) {
      const fs::path other = base / (cmd + "_b") / "out" / entry.path().filename();
      if (read_stripped(entry.path()) != read_stripped(other)) {
        ok = false;
        detail = entry.path().filename().string() + " differs";
      }
    }
  }
  report(12, "determinism of CLI artifacts", ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
            << (g_failures == 0 ? "" : std::to_string(g_failures)) << '\n';
  return g_failures == 0 ? 0 : 1;
}
