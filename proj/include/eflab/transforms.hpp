#pragma once

#include <utility>
#include <vector>

#include "eflab/fowler.hpp"
#include "eflab/params.hpp"

namespace eflab {

/// Radial profile (r, u, du, v, dv) on a strictly increasing log-spaced grid.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u, du;
  std::vector<double> v, dv;
};

/// Reconstructs the radial profile from a standard-system trajectory:
/// r = e^{-t}, u = r^{-delta} w1, u' = -r^{-delta-1} (delta w1 + w1').
/// With n_points > 0 the trajectory is resampled uniformly in t through the
/// dense output (a log-uniform r grid); n_points = 0 keeps the raw samples.
/// Throws for cone-exit trajectories.
RadialProfile to_radial(const Trajectory& traj, const Params& pa, int n_points = 0);

/// Max over interior grid points of the relative radial-PDE residual
///   |u'' + (n-1)/r u' + mu1 u^p + beta u^q v^{q+1}| / (rhs + guard)
/// and the v-analogue, with derivatives from second-order central differences
/// on the log grid (differencing ln u, exact on power laws).  Requires a
/// log-uniform grid with >= 5 points per decade.
double pde_residual(const RadialProfile& profile, const Params& pa);

/// Exact time reversal: w_bar(t) = w(-t) with derivatives negated, samples
/// reversed, system tag flipped.  An involution.
Trajectory kelvin_reverse(const Trajectory& traj, const Params& pa);

/// Max-norm residual of the reversed trajectory against its own system's
/// vector field, using the accelerations of the source trajectory.
double reversal_residual(const Trajectory& original, const Trajectory& reversed,
                         const Params& pa);

/// Scaling u^lambda(x) = lambda^{2/(p-1)} u(lambda x) acts as the time shift
/// t -> t - ln(lambda).
Trajectory scale_translate(const Trajectory& traj, double lambda);

/// Per dyadic annulus [r, 2r]: sup(u+v)/inf(u+v) over grid points inside.
/// Annuli with fewer than 4 grid points are skipped; inf = 0 reports +inf.
std::vector<std::pair<double, double>> harnack_ratio(const RadialProfile& profile);

}  // namespace eflab
