#include "eflab/fowler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eflab {

namespace {

// Power terms evaluated at max(w, 0): lets Runge-Kutta stages graze the cone
// boundary without producing NaN.  Cone exit is detected on accepted steps.
Eigen::Vector4d rhs_clamped(const Eigen::Vector4d& y, const Params& pa, System sys) {
  const double tau = sys == System::standard ? pa.tau : pa.tau0;
  const double sigma = sys == System::standard ? pa.sigma : pa.sigma0;
  const double q = pa.q;
  const double w1 = std::max(y[0], 0.0);
  const double w2 = std::max(y[2], 0.0);
  Eigen::Vector4d f;
  f[0] = y[1];
  f[1] = -tau * y[1] + sigma * y[0] - pa.mu1 * std::pow(w1, 2.0 * q + 1.0) -
         pa.beta * std::pow(w1, q) * std::pow(w2, q + 1.0);
  f[2] = y[3];
  f[3] = -tau * y[3] + sigma * y[2] - pa.mu2 * std::pow(w2, 2.0 * q + 1.0) -
         pa.beta * std::pow(w2, q) * std::pow(w1, q + 1.0);
  return f;
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
  Eigen::Vector4d y;
  Eigen::Vector4d err;
};

StepResult dopri_step(const Eigen::Vector4d& y, const Eigen::Vector4d& k1, double h,
                      const Params& pa, System sys) {
  const Eigen::Vector4d k2 = rhs_clamped(y + h * (a21 * k1), pa, sys);
  const Eigen::Vector4d k3 = rhs_clamped(y + h * (a31 * k1 + a32 * k2), pa, sys);
  const Eigen::Vector4d k4 = rhs_clamped(y + h * (a41 * k1 + a42 * k2 + a43 * k3), pa, sys);
  const Eigen::Vector4d k5 =
      rhs_clamped(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), pa, sys);
  const Eigen::Vector4d k6 =
      rhs_clamped(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), pa, sys);
  StepResult r;
  r.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Eigen::Vector4d k7 = rhs_clamped(r.y, pa, sys);
  r.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return r;
}

double error_norm(const Eigen::Vector4d& err, const Eigen::Vector4d& y0,
                  const Eigen::Vector4d& y1, const Tolerances& tol) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sc = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = err[i] / sc;
    s += e * e;
  }
  return std::sqrt(0.25 * s);
}

bool in_cone(const Eigen::Vector4d& y) { return y[0] >= 0.0 && y[2] >= 0.0; }

// Quintic Hermite on [0, 1] from value, first and second derivative at both
// ends (derivatives already scaled by h, h^2).  Returns (value, derivative).
std::pair<double, double> quintic(double p0, double m0, double s0, double p1,
                                  double m1, double s1, double x) {
  const double A = p1 - p0 - m0 - 0.5 * s0;
  const double B = m1 - m0 - s0;
  const double C = s1 - s0;
  const double c = 0.5 * (C - 6.0 * B + 12.0 * A);
  const double b = B - 3.0 * A - 2.0 * c;
  const double a = A - b - c;
  const double v = p0 + x * (m0 + x * (0.5 * s0 + x * (a + x * (b + x * c))));
  const double d = m0 + x * (s0 + x * (3.0 * a + x * (4.0 * b + x * 5.0 * c)));
  return {v, d};
}

}  // namespace

Eigen::Vector4d rhs(const Eigen::Vector4d& y, const Params& pa, System sys) {
  if (y[0] < 0.0 || y[2] < 0.0)
    throw std::domain_error("rhs: state outside the closed positive cone");
  return rhs_clamped(y, pa, sys);
}

Trajectory integrate(const FowlerState& initial, double t_end, const Params& pa,
                     System sys, const IntegratorOptions& opts,
                     std::span<const EquilibriumInfo> targets) {
  if (!in_cone(initial.y))
    throw std::domain_error("integrate: initial state outside the closed positive cone");
  if (!(t_end > initial.t))
    throw std::domain_error("integrate: t_end must exceed the initial time");

  Trajectory traj;
  traj.tol = opts.tol;
  traj.system = sys;
  traj.samples.push_back(initial);

  double t = initial.t;
  Eigen::Vector4d y = initial.y;
  Eigen::Vector4d f = rhs_clamped(y, pa, sys);

  double h = std::clamp(0.01 * (1.0 + y.norm()) / (1.0 + f.norm()), 1e-6, opts.h_max);
  double err_prev = 1.0;
  double conv_start = t;
  bool conv_active = false;

  const auto check_convergence = [&](double tt, const Eigen::Vector4d& yy) -> bool {
    const Eigen::Vector4d ff = rhs_clamped(yy, pa, sys);
    const double vel = std::max(std::abs(yy[1]), std::abs(yy[3]));
    if (ff.lpNorm<Eigen::Infinity>() < opts.conv_threshold && vel < opts.conv_threshold) {
      if (!conv_active) {
        conv_active = true;
        conv_start = tt;
      }
      return tt - conv_start >= opts.conv_window;
    }
    conv_active = false;
    return false;
  };

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < opts.h_min) {
      traj.status = TrajStatus::step_failure;
      traj.diagnostic = "step size underflow at t = " + std::to_string(t);
      return traj;
    }
    StepResult step = dopri_step(y, f, h, pa, sys);
    const double err = step.err.allFinite() && step.y.allFinite()
                           ? error_norm(step.err, y, step.y, opts.tol)
                           : 2.0;
    if (err > 1.0) {
      const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      h *= fac;
      continue;
    }
    if (!in_cone(step.y)) {
      // Bisect the step length to localize the crossing within 1e-12 in t.
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        StepResult trial = dopri_step(y, f, mid, pa, sys);
        (in_cone(trial.y) ? lo : hi) = mid;
      }
      if (lo > 0.0) {
        StepResult at_lo = dopri_step(y, f, lo, pa, sys);
        traj.samples.push_back({t + lo, at_lo.y});
      }
      traj.status = TrajStatus::left_positive_cone;
      traj.cone_exit_bracket = std::make_pair(t + lo, t + hi);
      return traj;
    }

    t += h;
    y = step.y;
    f = rhs_clamped(y, pa, sys);
    traj.samples.push_back({t, y});

    if (y.lpNorm<Eigen::Infinity>() > opts.cap) {
      traj.status = TrajStatus::unbounded;
      return traj;
    }
    if (check_convergence(t, y)) {
      traj.status = TrajStatus::converged_to_equilibrium;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if ((y - targets[i].state.y).lpNorm<Eigen::Infinity>() <= 1e-8) {
          traj.equilibrium_id = static_cast<int>(i);
          break;
        }
      }
      return traj;
    }

    const double fac =
        std::clamp(0.9 * std::pow(err, -0.14) * std::pow(err_prev, 0.08), 0.2, 5.0);
    err_prev = std::max(err, 1e-10);
    h = std::min(h * fac, opts.h_max);
  }
  traj.status = TrajStatus::reached_t_end;
  return traj;
}

std::vector<EquilibriumInfo> equilibria(const Params& pa, const RootSet& roots) {
  std::vector<EquilibriumInfo> out;
  EquilibriumInfo origin;
  origin.kind = EquilibriumInfo::Kind::origin;
  out.push_back(origin);
  for (const auto& r : roots.roots) {
    EquilibriumInfo eq;
    eq.state.y = Eigen::Vector4d(r.k * pa.C0, 0.0, r.l * pa.C0, 0.0);
    eq.kind = r.branch == KLRoot::Branch::both_positive
                  ? EquilibriumInfo::Kind::full
                  : EquilibriumInfo::Kind::semi_trivial;
    eq.root = r;
    if (rhs(eq.state.y, pa, System::standard).lpNorm<Eigen::Infinity>() > 1e-12)
      throw std::logic_error("equilibria: constant state fails the fixed-point check");
    out.push_back(eq);
  }
  return out;
}

EquilibriumInfo linearize(EquilibriumInfo eq, const Params& pa, System sys) {
  const Eigen::Vector4d& y = eq.state.y;
  if (rhs(y, pa, sys).lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::domain_error("linearize: state is not an equilibrium");

  const double q = pa.q;
  const double tau = sys == System::standard ? pa.tau : pa.tau0;
  const double sigma = sys == System::standard ? pa.sigma : pa.sigma0;
  const double w1 = y[0], w2 = y[2];

  // d/dw of the coupling term beta w^q z^{q+1} in its own variable w.  At
  // w = 0 against z > 0 the derivative exists only for q >= 1.
  const auto coupling_dw = [&](double w, double z, bool& missing) {
    if (pa.beta == 0.0 || z == 0.0) return 0.0;
    if (w > 0.0) return pa.beta * q * std::pow(w, q - 1.0) * std::pow(z, q + 1.0);
    if (q > 1.0) return 0.0;
    if (q == 1.0) return pa.beta * std::pow(z, q + 1.0);
    missing = true;
    return 0.0;
  };
  const auto coupling_dz = [&](double w, double z) {
    if (w == 0.0) return 0.0;
    return pa.beta * (q + 1.0) * std::pow(w, q) * std::pow(z, q);
  };

  bool missing = false;
  const double dP1_dw1 =
      pa.mu1 * (2.0 * q + 1.0) * std::pow(w1, 2.0 * q) + coupling_dw(w1, w2, missing);
  const double dP2_dw2 =
      pa.mu2 * (2.0 * q + 1.0) * std::pow(w2, 2.0 * q) + coupling_dw(w2, w1, missing);
  if (missing) {
    eq.non_lipschitz = true;
    eq.eigenvalues.clear();
    return eq;
  }
  const double dP1_dw2 = coupling_dz(w1, w2);
  const double dP2_dw1 = coupling_dz(w2, w1);

  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(0, 1) = 1.0;
  J(1, 0) = sigma - dP1_dw1;
  J(1, 1) = -tau;
  J(1, 2) = -dP1_dw2;
  J(2, 3) = 1.0;
  J(3, 0) = -dP2_dw1;
  J(3, 2) = sigma - dP2_dw2;
  J(3, 3) = -tau;

  Eigen::EigenSolver<Eigen::Matrix4d> es(J);
  eq.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(eq.eigenvalues.begin(), eq.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  eq.non_lipschitz = false;
  return eq;
}

Trajectory shoot(const Params& pa, const RootSet& roots, double a1, double a2,
                 double epsilon, double t_end, const IntegratorOptions& opts) {
  if (!(epsilon > 0.0) || epsilon > 1e-2)
    throw std::domain_error("shoot: epsilon must lie in (0, 1e-2]");
  if (a1 < 0.0 || a2 < 0.0 || (a1 == 0.0 && a2 == 0.0))
    throw std::domain_error("shoot: direction must be nonnegative and nonzero");
  const double norm = std::hypot(a1, a2);
  a1 /= norm;
  a2 /= norm;
  FowlerState initial;
  initial.t = 0.0;
  initial.y = Eigen::Vector4d(epsilon * a1, pa.delta0 * epsilon * a1, epsilon * a2,
                              pa.delta0 * epsilon * a2);
  const auto targets = equilibria(pa, roots);
  return integrate(initial, t_end, pa, System::standard, opts, targets);
}

FowlerState dense_eval(const Trajectory& traj, const Params& pa, double t) {
  const auto& s = traj.samples;
  if (s.empty()) throw std::domain_error("dense_eval: empty trajectory");
  if (t <= s.front().t) return s.front();
  if (t >= s.back().t) return s.back();
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double tt, const FowlerState& st) { return tt < st.t; });
  const FowlerState& s1 = *it;
  const FowlerState& s0 = *(it - 1);
  const double h = s1.t - s0.t;
  const double x = (t - s0.t) / h;
  const Eigen::Vector4d f0 = rhs_clamped(s0.y, pa, traj.system);
  const Eigen::Vector4d f1 = rhs_clamped(s1.y, pa, traj.system);

  FowlerState out;
  out.t = t;
  for (int c = 0; c < 2; ++c) {
    const int iw = 2 * c;      // w index
    const int iv = 2 * c + 1;  // w' index
    auto [v, d] = quintic(s0.y[iw], h * s0.y[iv], h * h * f0[iv], s1.y[iw],
                          h * s1.y[iv], h * h * f1[iv], x);
    out.y[iw] = v;
    out.y[iv] = d / h;
  }
  return out;
}

}  // namespace eflab
