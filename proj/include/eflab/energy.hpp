#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eflab/fowler.hpp"
#include "eflab/params.hpp"
#include "eflab/roots.hpp"

namespace eflab {

struct EnergyAudit {
  enum class Classification { zero, minus_A_kl, unresolved };
  std::vector<std::pair<double, double>> psi_samples;  // (t, Psi)
  /// Max over interior samples of |Psi' + tau (w1'^2 + w2'^2)| with Psi'
  /// obtained by differentiating the dense output.
  double identity_residual_max = 0.0;
  /// Max positive increment of Psi between consecutive samples (standard
  /// system; kelvin audits flip the sign).
  double monotone_violation_max = 0.0;
  std::optional<double> limit_neg_inf;
  std::optional<double> limit_pos_inf;
  Classification classification = Classification::unresolved;
  int matched_root = -1;  // index into the RootSet, when minus_A_kl
  std::vector<int> tied_candidates;
};

struct AuditOptions {
  double classify_tol = 1e-6;
  double window = 1.0;  // terminal averaging window for limit estimation
};

/// Psi(t) = (|w1'|^2 + |w2'|^2 - sigma (w1^2 + w2^2))/2
///          + (mu1 w1^{p+1} + 2 beta w1^{q+1} w2^{q+1} + mu2 w2^{p+1})/(p+1),
/// with sigma -> sigma0 for the kelvin system (numerically equal).
double psi(const FowlerState& state, const Params& pa, System sys = System::standard);

/// Energy level (p-1)/(2(p+1)) (k^2 + l^2) C0^{p+1} of a root.
double a_kl(const KLRoot& root, const Params& pa);

/// E(r; u, v) through the Fowler correspondence E = sphere_area * Psi(-ln r).
/// Cross-checked internally against the direct surface-integral form for
/// radial data; disagreement beyond 1e-12 relative throws.
double energy_E(double r, double u, double du, double v, double dv, const Params& pa);

/// Direct surface-integral evaluation of E for radial data.
double energy_E_surface(double r, double u, double du, double v, double dv,
                        const Params& pa);

/// Monotonicity and limit audit of a standard-system trajectory.  Throws for
/// kelvin trajectories (use audit_kelvin: same computation, Psi nondecreasing).
EnergyAudit audit(const Trajectory& traj, const Params& pa, const RootSet& roots,
                  const AuditOptions& opts = {});

EnergyAudit audit_kelvin(const Trajectory& traj, const Params& pa,
                         const RootSet& roots, const AuditOptions& opts = {});

/// Max over samples of |Psi(t) - Psi(t0)|.  Only meaningful at the critical
/// exponent; throws when tau > 0.
double pohozaev_check(const Trajectory& traj, const Params& pa);

}  // namespace eflab
