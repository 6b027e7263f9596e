#include "eflab/roots.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eflab {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr double kDedupRadius = 1e-8;
constexpr double kClamp = 1e-14;  // keep Newton iterates off the non-Lipschitz boundary

Eigen::Vector2d interior_residual(double k, double l, const Params& pa) {
  const double q = pa.q;
  Eigen::Vector2d r;
  r[0] = pa.mu1 * std::pow(k, 2.0 * q) + pa.beta * std::pow(k, q - 1.0) * std::pow(l, q + 1.0) - 1.0;
  r[1] = pa.mu2 * std::pow(l, 2.0 * q) + pa.beta * std::pow(l, q - 1.0) * std::pow(k, q + 1.0) - 1.0;
  return r;
}

Eigen::Matrix2d interior_jacobian(double k, double l, const Params& pa) {
  const double q = pa.q;
  Eigen::Matrix2d J;
  J(0, 0) = 2.0 * q * pa.mu1 * std::pow(k, 2.0 * q - 1.0) +
            pa.beta * (q - 1.0) * std::pow(k, q - 2.0) * std::pow(l, q + 1.0);
  J(0, 1) = pa.beta * (q + 1.0) * std::pow(k, q - 1.0) * std::pow(l, q);
  J(1, 1) = 2.0 * q * pa.mu2 * std::pow(l, 2.0 * q - 1.0) +
            pa.beta * (q - 1.0) * std::pow(l, q - 2.0) * std::pow(k, q + 1.0);
  J(1, 0) = pa.beta * (q + 1.0) * std::pow(l, q - 1.0) * std::pow(k, q);
  return J;
}

// Damped Newton from (k, l) > 0.  Returns true on convergence to residual
// <= kResidualTol with the polished point written back.
bool newton_polish(double& k, double& l, const Params& pa) {
  Eigen::Vector2d x(k, l);
  Eigen::Vector2d r = interior_residual(x[0], x[1], pa);
  // Iterate to stagnation: the damped line search requires strict decrease,
  // so the loop exits at the machine-precision floor of the residual.
  for (int it = 0; it < 60; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= 1e-15) break;
    Eigen::Matrix2d J = interior_jacobian(x[0], x[1], pa);
    Eigen::Vector2d step = J.fullPivLu().solve(r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      Eigen::Vector2d trial = x - lambda * step;
      trial = trial.cwiseMax(kClamp);
      Eigen::Vector2d rt = interior_residual(trial[0], trial[1], pa);
      if (rt.allFinite() && rt.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>()) {
        x = trial;
        r = rt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (r.lpNorm<Eigen::Infinity>() <= kResidualTol) {
    k = x[0];
    l = x[1];
    return true;
  }
  return false;
}

}  // namespace

double equilibrium_energy_level(double k, double l, const Params& pa) {
  return (pa.p - 1.0) / (2.0 * (pa.p + 1.0)) * (k * k + l * l) *
         std::pow(pa.C0, pa.p + 1.0);
}

std::pair<double, double> residual_kl(double k, double l, const Params& pa) {
  if (k < 0.0 || l < 0.0) throw std::domain_error("residual_kl: k, l must be nonnegative");
  if (k == 0.0 && l == 0.0) throw std::domain_error("residual_kl: (0, 0) is excluded");
  if (k == 0.0) return {0.0, pa.mu2 * std::pow(l, 2.0 * pa.q) - 1.0};
  if (l == 0.0) return {pa.mu1 * std::pow(k, 2.0 * pa.q) - 1.0, 0.0};
  Eigen::Vector2d r = interior_residual(k, l, pa);
  return {r[0], r[1]};
}

RootSet solve_kl(const Params& pa, int grid_n) {
  RootSet out;
  const double q = pa.q;
  const double kmax = std::pow(pa.mu1, -1.0 / (2.0 * q));
  const double lmax = std::pow(pa.mu2, -1.0 / (2.0 * q));

  // Axis roots from the single-equation convention, never via Newton.
  KLRoot ka;
  ka.k = kmax;
  ka.l = 0.0;
  ka.branch = KLRoot::Branch::k_axis;
  KLRoot la;
  la.k = 0.0;
  la.l = lmax;
  la.branch = KLRoot::Branch::l_axis;

  std::vector<KLRoot> interior;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const double k0 = (i + 0.5) / grid_n * kmax;
      const double l0 = (j + 0.5) / grid_n * lmax;
      const double seed_res =
          interior_residual(k0, l0, pa).lpNorm<Eigen::Infinity>();
      double k = k0, l = l0;
      if (newton_polish(k, l, pa)) {
        if (k > 1e-8 && l > 1e-8) {
          bool dup = false;
          for (const auto& r : interior) {
            if (std::max(std::abs(r.k - k), std::abs(r.l - l)) <= kDedupRadius) {
              dup = true;
              break;
            }
          }
          if (!dup) {
            KLRoot root;
            root.k = k;
            root.l = l;
            root.branch = KLRoot::Branch::both_positive;
            root.residual = interior_residual(k, l, pa).lpNorm<Eigen::Infinity>();
            interior.push_back(root);
          }
        }
      } else if (seed_res < 1e-6) {
        out.warnings.push_back({k0, l0, seed_res});
      }
    }
  }

  const double cell_diag = std::hypot(kmax / grid_n, lmax / grid_n);

  // Merge clusters within one cell diagonal, keeping the lowest-residual
  // representative.  At degenerate parameters (tangential branch crossings,
  // e.g. mu1 = mu2 = 1, beta = 1/2, q = 1/2) the residual is quartically
  // flat, so Newton stagnates at many distinct points around one true root;
  // a grid-seeded method cannot resolve roots closer than a cell anyway.
  std::sort(interior.begin(), interior.end(),
            [](const KLRoot& a, const KLRoot& b) { return a.residual < b.residual; });
  std::vector<KLRoot> merged;
  for (const auto& r : interior) {
    bool close = false;
    for (const auto& m : merged) {
      if (std::hypot(m.k - r.k, m.l - r.l) <= cell_diag) {
        close = true;
        break;
      }
    }
    if (!close) merged.push_back(r);
  }
  interior = std::move(merged);

  // Drop warnings explained by a found root within one cell diagonal.
  std::vector<RootWarning> kept;
  for (const auto& w : out.warnings) {
    bool near_root = false;
    for (const auto& r : interior) {
      if (std::hypot(r.k - w.k, r.l - w.l) <= 2.0 * cell_diag) {
        near_root = true;
        break;
      }
    }
    if (!near_root) kept.push_back(w);
  }
  out.warnings = std::move(kept);

  out.roots.push_back(la);
  out.roots.push_back(ka);
  for (auto& r : interior) out.roots.push_back(r);
  std::sort(out.roots.begin(), out.roots.end(), [](const KLRoot& a, const KLRoot& b) {
    return a.k != b.k ? a.k < b.k : a.l < b.l;
  });
  for (auto& r : out.roots) {
    auto [r1, r2] = residual_kl(r.k, r.l, pa);
    r.residual = std::max(std::abs(r1), std::abs(r2));
    r.A_kl = equilibrium_energy_level(r.k, r.l, pa);
  }
  return out;
}

}  // namespace eflab
