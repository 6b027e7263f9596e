#pragma once

#include <utility>
#include <vector>

#include "eflab/params.hpp"

namespace eflab {

/// A nonnegative solution (k, l), not both zero, of the coupling algebra
///   mu1 k^{2q} + beta k^{q-1} l^{q+1} = 1,
///   mu2 l^{2q} + beta l^{q-1} k^{q+1} = 1.
/// On an axis (k = 0 or l = 0) the system degenerates to the single equation
/// in the surviving component.
struct KLRoot {
  enum class Branch { both_positive, k_axis, l_axis };
  double k = 0.0;
  double l = 0.0;
  Branch branch = Branch::both_positive;
  double residual = 0.0;  // max-norm of the defining equations
  double A_kl = 0.0;      // energy level attached to the root
};

/// Grid cell whose residual minimum dipped below threshold but where Newton
/// never converged: a possible missed root, surfaced instead of dropped.
struct RootWarning {
  double k, l;      // seed location
  double residual;  // residual at the seed
};

struct RootSet {
  std::vector<KLRoot> roots;  // sorted lexicographically by (k, l)
  std::vector<RootWarning> warnings;
};

/// Energy level (p-1)/(2(p+1)) (k^2 + l^2) C0^{p+1}.
double equilibrium_energy_level(double k, double l, const Params& pa);

/// Residual of the coupling algebra at (k, l) >= 0, not both zero.  On an
/// axis the degenerate component is reported as 0.
std::pair<double, double> residual_kl(double k, double l, const Params& pa);

/// All nonnegative roots: the two axis roots analytically, interior roots by
/// dense grid seeding plus damped Newton over the bounding box
/// [0, mu1^{-1/(2q)}] x [0, mu2^{-1/(2q)}].
RootSet solve_kl(const Params& pa, int grid_n = 200);

}  // namespace eflab
