#include "eflab/transforms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace eflab {

RadialProfile to_radial(const Trajectory& traj, const Params& pa, int n_points) {
  if (traj.system != System::standard)
    throw std::domain_error("to_radial: requires a standard-system trajectory");
  if (traj.status == TrajStatus::left_positive_cone)
    throw std::domain_error("to_radial: trajectory left the positive cone");

  std::vector<FowlerState> states;
  if (n_points > 0) {
    const double t0 = traj.samples.front().t;
    const double t1 = traj.samples.back().t;
    states.reserve(n_points);
    for (int j = 0; j < n_points; ++j) {
      const double t = t0 + (t1 - t0) * j / (n_points - 1);
      states.push_back(dense_eval(traj, pa, t));
    }
  } else {
    states = traj.samples;
  }

  RadialProfile prof;
  prof.r.reserve(states.size());
  // Increasing r means decreasing t.
  for (auto it = states.rbegin(); it != states.rend(); ++it) {
    const double t = it->t;
    const double r = std::exp(-t);
    const double ed = std::exp(pa.delta * t);
    prof.r.push_back(r);
    prof.u.push_back(ed * it->w1());
    prof.v.push_back(ed * it->w2());
    prof.du.push_back(-std::exp((pa.delta + 1.0) * t) * (pa.delta * it->w1() + it->dw1()));
    prof.dv.push_back(-std::exp((pa.delta + 1.0) * t) * (pa.delta * it->w2() + it->dw2()));
  }
  return prof;
}

double pde_residual(const RadialProfile& prof, const Params& pa) {
  const std::size_t m = prof.r.size();
  if (m < 3) throw std::domain_error("pde_residual: fewer than 3 grid points");
  const double h = std::log(prof.r[1] / prof.r[0]);
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double hj = std::log(prof.r[j + 1] / prof.r[j]);
    if (std::abs(hj - h) > 1e-8 * std::abs(h))
      throw std::domain_error("pde_residual: grid is not log-uniform");
  }
  if (std::log(10.0) / h < 5.0)
    throw std::domain_error("pde_residual: fewer than 5 grid points per decade");

  const auto component_max = [&](const std::vector<double>& u,
                                 const std::vector<double>& v, double mu) {
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      if (u[j] <= 0.0 || u[j - 1] <= 0.0 || u[j + 1] <= 0.0) continue;
      const double phi_m = std::log(u[j - 1]);
      const double phi_0 = std::log(u[j]);
      const double phi_p = std::log(u[j + 1]);
      const double phis = (phi_p - phi_m) / (2.0 * h);
      const double phiss = (phi_p - 2.0 * phi_0 + phi_m) / (h * h);
      const double r = prof.r[j];
      const double lap = u[j] / (r * r) * (phiss + phis * phis + (pa.n - 2.0) * phis);
      const double forcing = mu * std::pow(u[j], pa.p) +
                             pa.beta * std::pow(u[j], pa.q) * std::pow(v[j], pa.q + 1.0);
      worst = std::max(worst, std::abs(lap + forcing) / (forcing + 1e-300));
    }
    return worst;
  };
  return std::max(component_max(prof.u, prof.v, pa.mu1),
                  component_max(prof.v, prof.u, pa.mu2));
}

Trajectory kelvin_reverse(const Trajectory& traj, const Params&) {
  Trajectory out;
  out.status = traj.status;
  out.tol = traj.tol;
  out.system = traj.system == System::standard ? System::kelvin : System::standard;
  out.samples.reserve(traj.samples.size());
  for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
    FowlerState s;
    s.t = -it->t;
    s.y = it->y;
    s.y[1] = -s.y[1];
    s.y[3] = -s.y[3];
    out.samples.push_back(s);
  }
  return out;
}

double reversal_residual(const Trajectory& original, const Trajectory& reversed,
                         const Params& pa) {
  if (original.samples.size() != reversed.samples.size())
    throw std::domain_error("reversal_residual: sample counts differ");
  const std::size_t m = original.samples.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& so = original.samples[i];
    const auto& sr = reversed.samples[m - 1 - i];
    const Eigen::Vector4d fo = rhs(so.y, pa, original.system);
    const Eigen::Vector4d fr = rhs(sr.y, pa, reversed.system);
    // Acceleration is even under time reversal; velocities flip sign.
    worst = std::max({worst, std::abs(fr[1] - fo[1]), std::abs(fr[3] - fo[3]),
                      std::abs(fr[0] + fo[0]), std::abs(fr[2] + fo[2])});
  }
  return worst;
}

Trajectory scale_translate(const Trajectory& traj, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("scale_translate: lambda must be positive");
  Trajectory out = traj;
  const double shift = std::log(lambda);
  for (auto& s : out.samples) s.t -= shift;
  if (out.cone_exit_bracket) {
    out.cone_exit_bracket->first -= shift;
    out.cone_exit_bracket->second -= shift;
  }
  return out;
}

std::vector<std::pair<double, double>> harnack_ratio(const RadialProfile& prof) {
  if (prof.r.empty() || prof.r.back() / prof.r.front() < 4.0)
    throw std::domain_error("harnack_ratio: profile must span at least 2 dyadic annuli");
  std::vector<std::pair<double, double>> out;
  double lo = prof.r.front();
  while (lo < prof.r.back() * (1.0 - 1e-12)) {
    const double hi = 2.0 * lo;
    // Closed annulus [lo, 2 lo]; a grid point on the seam counts for both.
    double sup = -1.0, inf = std::numeric_limits<double>::infinity();
    int count = 0;
    for (std::size_t j = 0; j < prof.r.size(); ++j) {
      if (prof.r[j] < lo * (1.0 - 1e-12) || prof.r[j] > hi * (1.0 + 1e-12)) continue;
      const double s = prof.u[j] + prof.v[j];
      sup = std::max(sup, s);
      inf = std::min(inf, s);
      ++count;
    }
    if (count >= 4) {
      const double ratio =
          inf > 0.0 ? sup / inf : std::numeric_limits<double>::infinity();
      out.emplace_back(lo, ratio);
    }
    lo = hi;
  }
  return out;
}

}  // namespace eflab
