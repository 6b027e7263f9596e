#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eflab/params.hpp"
#include "eflab/roots.hpp"

namespace eflab {

/// Which second-order system the trajectory solves: the direct one (friction
/// tau > 0) or its inversion-transformed twin (friction tau0 = -tau).
enum class System { standard, kelvin };

/// Phase point (w1, w1', w2, w2') at time t = -ln r.
struct FowlerState {
  double t = 0.0;
  Eigen::Vector4d y = Eigen::Vector4d::Zero();

  double w1() const { return y[0]; }
  double dw1() const { return y[1]; }
  double w2() const { return y[2]; }
  double dw2() const { return y[3]; }
};

enum class TrajStatus {
  reached_t_end,
  converged_to_equilibrium,
  left_positive_cone,
  unbounded,
  step_failure,
};

struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-10;
};

struct IntegratorOptions {
  Tolerances tol;
  double cap = 1e3;             // sup-norm blow-up cap
  double conv_threshold = 1e-9; // rhs and velocity norms below this ...
  double conv_window = 1.0;     // ... sustained over this t-window => converged
  double h_min = 1e-14;
  double h_max = 0.1;  // also bounds dense-output interpolation error
};

struct Trajectory {
  std::vector<FowlerState> samples;  // strictly increasing t
  TrajStatus status = TrajStatus::reached_t_end;
  Tolerances tol;
  System system = System::standard;
  /// Index into the equilibrium list the terminal state matched, -1 if none
  /// was provided or matched.
  int equilibrium_id = -1;
  /// On cone exit, a t-bracket of width <= 1e-12 around the sign change.
  std::optional<std::pair<double, double>> cone_exit_bracket;
  std::string diagnostic;
};

struct EquilibriumInfo {
  enum class Kind { origin, full, semi_trivial };
  FowlerState state;  // dw1 = dw2 = 0
  Kind kind = Kind::origin;
  std::vector<std::complex<double>> eigenvalues;  // empty until linearize
  /// Set when the coupling term is not differentiable at the state (q < 1 and
  /// one component vanishes against a positive partner); eigenvalues stay empty.
  bool non_lipschitz = false;
  std::optional<KLRoot> root;
};

/// First-order vector field: (w1', w1'', w2', w2'') with
///   wi'' = -tau wi' + sigma wi - mui wi^{2q+1} - beta wi^q wj^{q+1},
/// (tau, sigma) -> (tau0, sigma0) for the kelvin system.  Requires w1, w2 >= 0.
Eigen::Vector4d rhs(const Eigen::Vector4d& y, const Params& pa, System sys);

/// Adaptive embedded Runge-Kutta 5(4) with PI step control.  Terminates on
/// t_end, equilibrium convergence, positive-cone exit (event localized to
/// 1e-12 in t), sup-norm blow-up, or step-size underflow.
Trajectory integrate(const FowlerState& initial, double t_end, const Params& pa,
                     System sys, const IntegratorOptions& opts = {},
                     std::span<const EquilibriumInfo> targets = {});

/// Origin plus one constant state (k C0, 0, l C0, 0) per root, each verified
/// to annihilate the vector field.
std::vector<EquilibriumInfo> equilibria(const Params& pa, const RootSet& roots);

/// Fills eigenvalues from the analytic 4x4 Jacobian, or sets non_lipschitz
/// where the linearization does not exist.  Throws std::domain_error if the
/// input is not an equilibrium (rhs norm > 1e-10).
EquilibriumInfo linearize(EquilibriumInfo eq, const Params& pa, System sys);

/// Launches from the origin's unstable eigenspace: initial state
/// (eps a1, delta0 eps a1, eps a2, delta0 eps a2) at t = 0 with (a1, a2)
/// normalized, integrated forward.
Trajectory shoot(const Params& pa, const RootSet& roots, double a1, double a2,
                 double epsilon, double t_end, const IntegratorOptions& opts = {});

/// Quintic Hermite dense output at time t inside the trajectory span.
FowlerState dense_eval(const Trajectory& traj, const Params& pa, double t);

}  // namespace eflab
