#include "eflab/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace eflab {

namespace {

EnergyAudit audit_impl(const Trajectory& traj, const Params& pa, const RootSet& roots,
                       const AuditOptions& opts) {
  const bool standard = traj.system == System::standard;
  const double tau = standard ? pa.tau : pa.tau0;

  EnergyAudit a;
  a.psi_samples.reserve(traj.samples.size());
  for (const auto& s : traj.samples) a.psi_samples.emplace_back(s.t, psi(s, pa, traj.system));

  // Identity residual |Psi' + tau (w1'^2 + w2'^2)| with Psi' from a central
  // difference of Psi on the dense output, not from the sample sequence.
  for (std::size_t j = 1; j + 1 < traj.samples.size(); ++j) {
    const double t = traj.samples[j].t;
    const double dt_prev = t - traj.samples[j - 1].t;
    const double dt_next = traj.samples[j + 1].t - t;
    // Floor the step: bisection-refined samples can make min(dt) tiny, and a
    // step below ~1e-6 lets roundoff in Psi dominate the difference quotient.
    const double h = std::max(1e-6, 1e-4 * std::min(dt_prev, dt_next));
    if (t - h < traj.samples.front().t || t + h > traj.samples.back().t) continue;
    // Fractional powers make Psi only finitely smooth at the cone boundary
    // (e.g. (w1 w2)^{q+1} with q < 1), so the difference quotient is audited
    // at interior-cone nodes only.
    if (std::min(traj.samples[j].w1(), traj.samples[j].w2()) < 1e-4) continue;
    FowlerState sm = dense_eval(traj, pa, t - h);
    FowlerState sp = dense_eval(traj, pa, t + h);
    // Interpolation may graze the cone boundary by roundoff.
    sm.y[0] = std::max(sm.y[0], 0.0);
    sm.y[2] = std::max(sm.y[2], 0.0);
    sp.y[0] = std::max(sp.y[0], 0.0);
    sp.y[2] = std::max(sp.y[2], 0.0);
    const double psi_m = psi(sm, pa, traj.system);
    const double psi_p = psi(sp, pa, traj.system);
    const double dpsi = (psi_p - psi_m) / (2.0 * h);
    const auto& s = traj.samples[j];
    const double res = std::abs(dpsi + tau * (s.dw1() * s.dw1() + s.dw2() * s.dw2()));
    a.identity_residual_max = std::max(a.identity_residual_max, res);
  }

  // Standard system: Psi nonincreasing.  Kelvin system: nondecreasing.
  for (std::size_t j = 0; j + 1 < a.psi_samples.size(); ++j) {
    const double incr = a.psi_samples[j + 1].second - a.psi_samples[j].second;
    a.monotone_violation_max =
        std::max(a.monotone_violation_max, standard ? incr : -incr);
  }
  a.monotone_violation_max = std::max(a.monotone_violation_max, 0.0);

  const auto window_mean = [&](bool from_start) {
    const double t_edge = from_start ? traj.samples.front().t : traj.samples.back().t;
    double sum = 0.0;
    int count = 0;
    for (const auto& [t, v] : a.psi_samples) {
      const bool inside = from_start ? t <= t_edge + opts.window : t >= t_edge - opts.window;
      if (inside) {
        sum += v;
        ++count;
      }
    }
    return sum / count;
  };

  if (traj.status == TrajStatus::converged_to_equilibrium) a.limit_pos_inf = window_mean(false);
  // The t -> -inf limit is reported when the trajectory starts near the
  // origin (a manifold launch) or from a near-stationary state.
  const auto& first = traj.samples.front();
  const bool near_origin = first.y.lpNorm<Eigen::Infinity>() <= 1e-2;
  const bool near_stationary =
      rhs(first.y, pa, traj.system).lpNorm<Eigen::Infinity>() <= 1e-6;
  if (near_origin || near_stationary) a.limit_neg_inf = window_mean(true);

  if (a.limit_pos_inf) {
    const double lim = *a.limit_pos_inf;
    // The integrator's equilibrium match (index 0 = origin, i+1 = root i)
    // resolves ties between roots sharing the same energy level.
    if (traj.status == TrajStatus::converged_to_equilibrium && traj.equilibrium_id >= 0) {
      if (traj.equilibrium_id == 0 && std::abs(lim) <= opts.classify_tol) {
        a.classification = EnergyAudit::Classification::zero;
        return a;
      }
      const int root_id = traj.equilibrium_id - 1;
      if (root_id >= 0 && root_id < static_cast<int>(roots.roots.size()) &&
          std::abs(lim + roots.roots[root_id].A_kl) <= opts.classify_tol) {
        a.classification = EnergyAudit::Classification::minus_A_kl;
        a.matched_root = root_id;
        return a;
      }
    }
    std::vector<int> matches;  // -1 encodes the zero level
    if (std::abs(lim) <= opts.classify_tol) matches.push_back(-1);
    for (std::size_t i = 0; i < roots.roots.size(); ++i) {
      if (std::abs(lim + roots.roots[i].A_kl) <= opts.classify_tol)
        matches.push_back(static_cast<int>(i));
    }
    if (matches.size() == 1) {
      if (matches[0] == -1) {
        a.classification = EnergyAudit::Classification::zero;
      } else {
        a.classification = EnergyAudit::Classification::minus_A_kl;
        a.matched_root = matches[0];
      }
    } else if (matches.size() > 1) {
      a.classification = EnergyAudit::Classification::unresolved;
      a.tied_candidates = matches;
    }
  }
  return a;
}

}  // namespace

double psi(const FowlerState& s, const Params& pa, System sys) {
  const double sigma = sys == System::standard ? pa.sigma : pa.sigma0;
  const double w1 = s.w1(), w2 = s.w2();
  if (w1 < 0.0 || w2 < 0.0) throw std::domain_error("psi: state outside the positive cone");
  const double kinetic = 0.5 * (s.dw1() * s.dw1() + s.dw2() * s.dw2());
  const double quadratic = 0.5 * sigma * (w1 * w1 + w2 * w2);
  const double potential =
      (pa.mu1 * std::pow(w1, pa.p + 1.0) +
       2.0 * pa.beta * std::pow(w1, pa.q + 1.0) * std::pow(w2, pa.q + 1.0) +
       pa.mu2 * std::pow(w2, pa.p + 1.0)) /
      (pa.p + 1.0);
  return kinetic - quadratic + potential;
}

double a_kl(const KLRoot& root, const Params& pa) {
  return equilibrium_energy_level(root.k, root.l, pa);
}

double energy_E_surface(double r, double u, double du, double v, double dv,
                        const Params& pa) {
  if (!(r > 0.0)) throw std::domain_error("energy_E: r must be positive");
  const double area = pa.sphere_area * std::pow(r, pa.n - 1.0);
  const double integrand =
      pa.delta * (u * du + v * dv) + 0.5 * r * (du * du + dv * dv) +
      pa.tau * pa.delta / (2.0 * r) * (u * u + v * v) +
      r / (pa.p + 1.0) *
          (pa.mu1 * std::pow(u, pa.p + 1.0) + pa.mu2 * std::pow(v, pa.p + 1.0) +
           2.0 * pa.beta * std::pow(u, pa.q + 1.0) * std::pow(v, pa.q + 1.0));
  return std::pow(r, pa.tau) * area * integrand;
}

double energy_E(double r, double u, double du, double v, double dv, const Params& pa) {
  if (!(r > 0.0)) throw std::domain_error("energy_E: r must be positive");
  if (u < 0.0 || v < 0.0) throw std::domain_error("energy_E: u, v must be nonnegative");
  FowlerState s;
  s.t = -std::log(r);
  const double rd = std::pow(r, pa.delta);
  s.y[0] = rd * u;
  s.y[1] = -(pa.delta * rd * u + rd * r * du);
  s.y[2] = rd * v;
  s.y[3] = -(pa.delta * rd * v + rd * r * dv);
  const double via_fowler = pa.sphere_area * psi(s, pa);
  const double direct = energy_E_surface(r, u, du, v, dv, pa);
  if (std::abs(via_fowler - direct) > 1e-12 * (1.0 + std::abs(via_fowler)))
    throw std::runtime_error("energy_E: surface-integral cross-check failed");
  return via_fowler;
}

EnergyAudit audit(const Trajectory& traj, const Params& pa, const RootSet& roots,
                  const AuditOptions& opts) {
  if (traj.system != System::standard)
    throw std::domain_error("audit: kelvin-system trajectory; use audit_kelvin");
  return audit_impl(traj, pa, roots, opts);
}

EnergyAudit audit_kelvin(const Trajectory& traj, const Params& pa, const RootSet& roots,
                         const AuditOptions& opts) {
  if (traj.system != System::kelvin)
    throw std::domain_error("audit_kelvin: standard-system trajectory; use audit");
  return audit_impl(traj, pa, roots, opts);
}

double pohozaev_check(const Trajectory& traj, const Params& pa) {
  if (!pa.is_critical)
    throw std::domain_error("pohozaev_check: requires the critical exponent (tau = 0)");
  double max_dev = 0.0;
  const double psi0 = psi(traj.samples.front(), pa, traj.system);
  for (const auto& s : traj.samples)
    max_dev = std::max(max_dev, std::abs(psi(s, pa, traj.system) - psi0));
  return max_dev;
}

}  // namespace eflab
