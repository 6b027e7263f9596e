#include "eflab/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eflab {

namespace {

// Gamma(n/2) by recurrence from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_half_integer(int n) {
  double x = (n % 2 == 0) ? 1.0 : 0.5;
  double g = (n % 2 == 0) ? 1.0 : std::sqrt(M_PI);
  while (x + 0.5 < 0.5 * n) {
    g *= x;
    x += 1.0;
  }
  return g;
}

}  // namespace

double unit_sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / gamma_half_integer(n);
}

Params compute_params(int n, double p, double mu1, double mu2, double beta) {
  if (n < 3) {
    std::ostringstream msg;
    msg << "dimension n = " << n << " is below the admitted minimum n = 3";
    throw std::domain_error(msg.str());
  }
  const double p_low = static_cast<double>(n) / (n - 2);
  const double p_crit = static_cast<double>(n + 2) / (n - 2);
  if (!(p > p_low)) {
    std::ostringstream msg;
    msg << "p = " << p << " must exceed n/(n-2) = " << p_low << " for n = " << n;
    throw std::domain_error(msg.str());
  }
  if (p > p_crit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "p = " << p << " exceeds the critical exponent (n+2)/(n-2) = "
        << p_crit << " for n = " << n;
    throw std::domain_error(msg.str());
  }
  // beta = 0 is admitted: it decouples the system into two scalar problems
  // and serves as the oracle configuration.
  if (!(mu1 > 0.0) || !(mu2 > 0.0) || beta < 0.0) {
    throw std::domain_error("mu1, mu2 must be positive and beta nonnegative");
  }

  Params pa;
  pa.n = n;
  pa.p = p;
  pa.mu1 = mu1;
  pa.mu2 = mu2;
  pa.beta = beta;
  pa.q = 0.5 * (p - 1.0);
  pa.delta = 2.0 / (p - 1.0);
  pa.is_critical = std::abs(p - p_crit) <= 1e-12 * p_crit;
  pa.tau = pa.is_critical ? 0.0 : 4.0 / (p - 1.0) - n + 2.0;
  pa.sigma = pa.delta * (n - 2.0 - pa.delta);
  pa.C0 = std::pow(pa.sigma, 1.0 / (p - 1.0));
  pa.alpha = p * (n - 2.0) - (n + 2.0);
  pa.delta0 = (2.0 + pa.alpha) / (p - 1.0);
  // Inverted-side coefficients from their own closed forms; the identities
  // tau0 = -tau, sigma0 = sigma are checked by tests, not assumed here.
  pa.tau0 = pa.is_critical
                ? 0.0
                : (n - 2.0) / (p - 1.0) * ((n + 2.0 + 2.0 * pa.alpha) / (n - 2.0) - p);
  pa.sigma0 = (2.0 + pa.alpha) * (n - 2.0) / ((p - 1.0) * (p - 1.0)) *
              (p - (n + pa.alpha) / (n - 2.0));
  pa.sphere_area = unit_sphere_area(n);
  return pa;
}

}  // namespace eflab
