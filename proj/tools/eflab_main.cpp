// Scenario runner: parses a JSON config, orchestrates the core modules and
// emits deterministic CSV/JSON artifacts plus a run manifest.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eflab/energy.hpp"
#include "eflab/fowler.hpp"
#include "eflab/params.hpp"
#include "eflab/roots.hpp"
#include "eflab/transforms.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace eflab;

namespace {

constexpr const char* kVersion = "0.1.0";

// Counter-based generator: every random draw is splitmix64(seed, counter),
// recorded in the manifest for reproducibility.
struct SplitMix {
  std::uint64_t seed;
  std::uint64_t counter = 0;
  double uniform() {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (++counter);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return (z >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw std::domain_error("config: unknown key '" + key + "' in " + where);
  }
}

struct Config {
  int n = 5;
  double p = 2.0, mu1 = 1.0, mu2 = 1.0, beta = 1.0;
  // t_end covers the slow equilibrium approach: spiral decay rates around 1/2
  // need t of order 60-70 before the convergence detector fires at 1e-9.
  double abs_tol = 1e-10, rel_tol = 1e-10, t_end = 80.0, epsilon = 1e-4, cap = 1e3;
  int grid_n = 200, profile_points = 400, count = 20;
  std::vector<double> initial;    // 4 entries when present
  std::vector<double> direction;  // 2 entries when present
  json sweep;                     // object of parameter -> list
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::string command;
};

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::domain_error(std::string("config: ") + e.what());
  }
  check_keys(j, {"problem", "numerics", "initial", "direction", "sweep", "seed",
                 "output_dir", "command", "count"},
             "top level");
  Config c;
  if (j.contains("problem")) {
    const auto& p = j["problem"];
    check_keys(p, {"n", "p", "mu1", "mu2", "beta"}, "problem");
    if (p.contains("n")) c.n = p["n"].get<int>();
    if (p.contains("p")) c.p = p["p"].get<double>();
    if (p.contains("mu1")) c.mu1 = p["mu1"].get<double>();
    if (p.contains("mu2")) c.mu2 = p["mu2"].get<double>();
    if (p.contains("beta")) c.beta = p["beta"].get<double>();
  }
  if (j.contains("numerics")) {
    const auto& n = j["numerics"];
    check_keys(n, {"abs_tol", "rel_tol", "t_end", "epsilon", "grid_n",
                   "profile_points", "cap"},
               "numerics");
    if (n.contains("abs_tol")) c.abs_tol = n["abs_tol"].get<double>();
    if (n.contains("rel_tol")) c.rel_tol = n["rel_tol"].get<double>();
    if (n.contains("t_end")) c.t_end = n["t_end"].get<double>();
    if (n.contains("epsilon")) c.epsilon = n["epsilon"].get<double>();
    if (n.contains("grid_n")) c.grid_n = n["grid_n"].get<int>();
    if (n.contains("profile_points")) c.profile_points = n["profile_points"].get<int>();
    if (n.contains("cap")) c.cap = n["cap"].get<double>();
  }
  if (j.contains("initial")) {
    c.initial = j["initial"].get<std::vector<double>>();
    if (c.initial.size() != 4)
      throw std::domain_error("config: initial must have 4 entries [w1, dw1, w2, dw2]");
  }
  if (j.contains("direction")) {
    c.direction = j["direction"].get<std::vector<double>>();
    if (c.direction.size() != 2)
      throw std::domain_error("config: direction must have 2 entries [a1, a2]");
  }
  if (j.contains("sweep")) {
    c.sweep = j["sweep"];
    check_keys(c.sweep, {"n", "p", "mu1", "mu2", "beta"}, "sweep");
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("count")) c.count = j["count"].get<int>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("command")) c.command = j["command"].get<std::string>();
  return c;
}

json resolved_config(const Config& c, const std::string& command) {
  json j;
  j["problem"] = {{"n", c.n}, {"p", c.p}, {"mu1", c.mu1}, {"mu2", c.mu2}, {"beta", c.beta}};
  j["numerics"] = {{"abs_tol", c.abs_tol}, {"rel_tol", c.rel_tol}, {"t_end", c.t_end},
                   {"epsilon", c.epsilon}, {"grid_n", c.grid_n},
                   {"profile_points", c.profile_points}, {"cap", c.cap}};
  if (!c.initial.empty()) j["initial"] = c.initial;
  if (!c.direction.empty()) j["direction"] = c.direction;
  if (!c.sweep.empty()) j["sweep"] = c.sweep;
  j["seed"] = c.seed;
  j["count"] = c.count;
  j["output_dir"] = c.output_dir;
  j["command"] = command;
  return j;
}

struct ArtifactWriter {
  fs::path dir;
  std::vector<fs::path> written;

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir);
    fs::path p = dir / name;
    written.push_back(p);
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  }
  void remove_all_written() {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

const char* status_name(TrajStatus s) {
  switch (s) {
    case TrajStatus::reached_t_end: return "reached_t_end";
    case TrajStatus::converged_to_equilibrium: return "converged_to_equilibrium";
    case TrajStatus::left_positive_cone: return "left_positive_cone";
    case TrajStatus::unbounded: return "unbounded";
    case TrajStatus::step_failure: return "step_failure";
  }
  return "?";
}

const char* branch_name(KLRoot::Branch b) {
  switch (b) {
    case KLRoot::Branch::both_positive: return "both_positive";
    case KLRoot::Branch::k_axis: return "k_axis";
    case KLRoot::Branch::l_axis: return "l_axis";
  }
  return "?";
}

void write_trajectory_csv(ArtifactWriter& w, int id, const Trajectory& traj,
                          const Params& pa) {
  auto out = w.open("trajectory_" + std::to_string(id) + ".csv");
  out << "t,w1,dw1,w2,dw2,psi\n";
  for (const auto& s : traj.samples) {
    out << fmt17(s.t) << ',' << fmt17(s.w1()) << ',' << fmt17(s.dw1()) << ','
        << fmt17(s.w2()) << ',' << fmt17(s.dw2()) << ','
        << fmt17(psi(s, pa, traj.system)) << '\n';
  }
}

void write_profile_csv(ArtifactWriter& w, int id, const RadialProfile& prof) {
  auto out = w.open("profile_" + std::to_string(id) + ".csv");
  out << "r,u,du,v,dv\n";
  for (std::size_t j = 0; j < prof.r.size(); ++j) {
    out << fmt17(prof.r[j]) << ',' << fmt17(prof.u[j]) << ',' << fmt17(prof.du[j])
        << ',' << fmt17(prof.v[j]) << ',' << fmt17(prof.dv[j]) << '\n';
  }
}

json audit_to_json(const EnergyAudit& a, const RootSet& roots) {
  json j;
  j["identity_residual_max"] = a.identity_residual_max;
  j["monotone_violation_max"] = a.monotone_violation_max;
  if (a.limit_neg_inf) j["limit_neg_inf"] = *a.limit_neg_inf;
  if (a.limit_pos_inf) j["limit_pos_inf"] = *a.limit_pos_inf;
  switch (a.classification) {
    case EnergyAudit::Classification::zero: j["classification"] = "zero"; break;
    case EnergyAudit::Classification::minus_A_kl: j["classification"] = "minus_A_kl"; break;
    case EnergyAudit::Classification::unresolved: j["classification"] = "unresolved"; break;
  }
  if (a.matched_root >= 0) {
    const auto& r = roots.roots[a.matched_root];
    j["matched_root"] = {{"k", r.k}, {"l", r.l}, {"A_kl", r.A_kl}};
  }
  if (!a.tied_candidates.empty()) j["tied_candidates"] = a.tied_candidates;
  j["psi_first"] = a.psi_samples.front().second;
  j["psi_last"] = a.psi_samples.back().second;
  return j;
}

std::string classification_name(const EnergyAudit& a) {
  switch (a.classification) {
    case EnergyAudit::Classification::zero: return "zero";
    case EnergyAudit::Classification::minus_A_kl: return "minus_A_kl";
    case EnergyAudit::Classification::unresolved: return "unresolved";
  }
  return "?";
}

int run_impl(const std::string& command, const Config& c, ArtifactWriter& w) {
  const auto t_start = std::chrono::steady_clock::now();
  json summary;
  std::vector<std::string> warnings;

  const Params pa = compute_params(c.n, c.p, c.mu1, c.mu2, c.beta);
  IntegratorOptions iopts;
  iopts.tol = {c.abs_tol, c.rel_tol};
  iopts.cap = c.cap;

  const auto roots_with_warnings = [&]() {
    RootSet rs = solve_kl(pa, c.grid_n);
    for (const auto& rw : rs.warnings)
      warnings.push_back("unconverged low-residual cell near (k, l) = (" +
                         fmt17(rw.k) + ", " + fmt17(rw.l) + "), residual " +
                         fmt17(rw.residual));
    return rs;
  };

  if (command == "params") {
    auto out = w.open("params.json");
    json j;
    j["n"] = pa.n;
    j["p"] = pa.p;
    j["q"] = pa.q;
    j["delta"] = pa.delta;
    j["tau"] = pa.tau;
    j["sigma"] = pa.sigma;
    j["C0"] = pa.C0;
    j["alpha"] = pa.alpha;
    j["delta0"] = pa.delta0;
    j["tau0"] = pa.tau0;
    j["sigma0"] = pa.sigma0;
    j["sphere_area"] = pa.sphere_area;
    j["mu1"] = pa.mu1;
    j["mu2"] = pa.mu2;
    j["beta"] = pa.beta;
    j["is_critical"] = pa.is_critical;
    out << j.dump(2) << '\n';
  } else if (command == "roots") {
    RootSet rs = roots_with_warnings();
    auto out = w.open("roots.csv");
    out << "k,l,branch,residual,A_kl\n";
    for (const auto& r : rs.roots)
      out << fmt17(r.k) << ',' << fmt17(r.l) << ',' << branch_name(r.branch) << ','
          << fmt17(r.residual) << ',' << fmt17(r.A_kl) << '\n';
    summary["root_count"] = rs.roots.size();
  } else if (command == "simulate" || command == "energy_audit") {
    if (c.initial.empty()) throw std::domain_error(command + " requires 'initial'");
    RootSet rs = roots_with_warnings();
    const auto eqs = equilibria(pa, rs);
    FowlerState s0;
    s0.y = Eigen::Vector4d(c.initial[0], c.initial[1], c.initial[2], c.initial[3]);
    Trajectory traj = integrate(s0, c.t_end, pa, System::standard, iopts, eqs);
    write_trajectory_csv(w, 0, traj, pa);
    EnergyAudit a = audit(traj, pa, rs);
    auto out = w.open("audit_0.json");
    out << audit_to_json(a, rs).dump(2) << '\n';
    summary["status"] = status_name(traj.status);
    summary["classification"] = classification_name(a);
  } else if (command == "shoot") {
    if (c.direction.empty()) throw std::domain_error("shoot requires 'direction'");
    RootSet rs = roots_with_warnings();
    Trajectory traj =
        shoot(pa, rs, c.direction[0], c.direction[1], c.epsilon, c.t_end, iopts);
    write_trajectory_csv(w, 0, traj, pa);
    EnergyAudit a = audit(traj, pa, rs);
    auto out = w.open("audit_0.json");
    out << audit_to_json(a, rs).dump(2) << '\n';
    summary["status"] = status_name(traj.status);
    summary["equilibrium_id"] = traj.equilibrium_id;
    summary["classification"] = classification_name(a);
  } else if (command == "kelvin_check") {
    if (c.initial.empty()) throw std::domain_error("kelvin_check requires 'initial'");
    FowlerState s0;
    s0.y = Eigen::Vector4d(c.initial[0], c.initial[1], c.initial[2], c.initial[3]);
    Trajectory traj = integrate(s0, c.t_end, pa, System::standard, iopts);
    Trajectory rev = kelvin_reverse(traj, pa);
    Trajectory back = kelvin_reverse(rev, pa);
    double round_trip = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
      round_trip = std::max(round_trip, (traj.samples[i].y - back.samples[i].y)
                                            .lpNorm<Eigen::Infinity>());
    write_trajectory_csv(w, 0, traj, pa);
    write_trajectory_csv(w, 1, rev, pa);
    summary["reversal_residual"] = reversal_residual(traj, rev, pa);
    summary["double_reversal_max_diff"] = round_trip;
  } else if (command == "profile") {
    RootSet rs = roots_with_warnings();
    Trajectory traj;
    if (!c.direction.empty()) {
      traj = shoot(pa, rs, c.direction[0], c.direction[1], c.epsilon, c.t_end, iopts);
    } else if (!c.initial.empty()) {
      FowlerState s0;
      s0.y = Eigen::Vector4d(c.initial[0], c.initial[1], c.initial[2], c.initial[3]);
      traj = integrate(s0, c.t_end, pa, System::standard, iopts);
    } else {
      throw std::domain_error("profile requires 'direction' or 'initial'");
    }
    RadialProfile prof = to_radial(traj, pa, c.profile_points);
    write_profile_csv(w, 0, prof);
    summary["pde_residual"] = pde_residual(prof, pa);
    if (prof.r.back() / prof.r.front() >= 4.0) {
      double worst = 0.0;
      for (const auto& [r, ratio] : harnack_ratio(prof)) worst = std::max(worst, ratio);
      summary["harnack_max_ratio"] = worst;
    }
  } else if (command == "critical_check") {
    if (!pa.is_critical)
      throw std::domain_error("critical_check requires the critical exponent, tau = 0");
    SplitMix rng{c.seed};
    double worst = 0.0;
    for (int i = 0; i < c.count; ++i) {
      FowlerState s0;
      s0.y = Eigen::Vector4d(rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3),
                             rng.uniform(0.3, 1.2), rng.uniform(-0.3, 0.3));
      Trajectory traj = integrate(s0, c.t_end, pa, System::standard, iopts);
      worst = std::max(worst, pohozaev_check(traj, pa));
    }
    summary["pohozaev_max_deviation"] = worst;
    summary["states_checked"] = c.count;
  } else if (command == "sweep") {
    const auto axis = [&](const char* name, double fallback) {
      std::vector<double> vals;
      if (c.sweep.contains(name)) vals = c.sweep[name].get<std::vector<double>>();
      else vals.push_back(fallback);
      return vals;
    };
    const auto ns = axis("n", c.n);
    const auto ps = axis("p", c.p);
    const auto mu1s = axis("mu1", c.mu1);
    const auto mu2s = axis("mu2", c.mu2);
    const auto betas = axis("beta", c.beta);
    const std::size_t cells = ns.size() * ps.size() * mu1s.size() * mu2s.size() * betas.size();
    if (cells > 1000000) throw std::domain_error("sweep exceeds 1e6 cells");
    auto out = w.open("sweep.csv");
    out << "cell,n,p,mu1,mu2,beta,root_count,classification,monotone_violation_max,error\n";
    std::size_t cell = 0;
    bool empty = c.sweep.empty();
    for (double nv : ns) for (double pv : ps) for (double m1 : mu1s)
    for (double m2 : mu2s) for (double bv : betas) {
      if (empty) break;
      out << cell << ',' << fmt17(nv) << ',' << fmt17(pv) << ',' << fmt17(m1) << ','
          << fmt17(m2) << ',' << fmt17(bv) << ',';
      try {
        const Params cp = compute_params(static_cast<int>(nv), pv, m1, m2, bv);
        RootSet rs = solve_kl(cp, std::min(c.grid_n, 100));
        Trajectory traj = shoot(cp, rs, 1.0, 1.0, c.epsilon, c.t_end, iopts);
        EnergyAudit a = audit(traj, cp, rs);
        out << rs.roots.size() << ',' << classification_name(a) << ','
            << fmt17(a.monotone_violation_max) << ",\n";
      } catch (const std::exception& e) {
        out << "0,,," << '"' << e.what() << '"' << '\n';
      }
      ++cell;
    }
    summary["cells"] = cell;
  } else {
    throw std::domain_error("unknown command '" + command + "'");
  }

  const auto t_stop = std::chrono::steady_clock::now();
  json manifest;
  manifest["tool_version"] = kVersion;
  manifest["command"] = command;
  manifest["resolved_config"] = resolved_config(c, command);
  manifest["seed"] = c.seed;
  manifest["generator"] = "splitmix64";
  manifest["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(t_stop - t_start).count();
  manifest["summary"] = summary;
  manifest["warnings"] = warnings;
  auto out = w.open("manifest.json");
  out << manifest.dump(2) << '\n';
  return 0;
}

// Partial outputs are removed when a command fails midway.
int run(const std::string& command, const Config& c) {
  ArtifactWriter w{fs::path(c.output_dir), {}};
  try {
    return run_impl(command, c, w);
  } catch (...) {
    w.remove_all_written();
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the coupled subcritical Lane-Emden "
               "system in Fowler coordinates"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::int64_t seed = -1;
  for (const char* name : {"params", "roots", "simulate", "shoot", "energy_audit",
                           "kelvin_check", "profile", "sweep", "critical_check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path)->required();
    sub->add_option("--out", out_dir);
    sub->add_option("--seed", seed);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  ArtifactWriter cleanup{{}, {}};
  try {
    Config c = parse_config(config_path);
    if (!c.command.empty() && c.command != command)
      throw std::domain_error("config names command '" + c.command +
                              "' but CLI invoked '" + command + "'");
    if (!out_dir.empty()) c.output_dir = out_dir;
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    return run(command, c);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
