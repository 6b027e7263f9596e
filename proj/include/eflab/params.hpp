#pragma once

namespace eflab {

/// Derived constants of the problem, computed once from (n, p, mu1, mu2, beta)
/// and immutable afterwards.  All downstream modules take a const reference.
struct Params {
  int n;            // space dimension, >= 3
  double p;         // exponent, n/(n-2) < p <= (n+2)/(n-2)
  double q;         // (p-1)/2; q < 1 for n >= 4, q > 1 for n = 3
  double delta;     // 2/(p-1), decay rate of the singular solution
  double tau;       // 4/(p-1) - n + 2, friction coefficient; 0 at criticality
  double sigma;     // delta*(n-2-delta) > 0
  double C0;        // amplitude of the explicit singular solution, C0^(p-1) = sigma
  double alpha;     // p(n-2) - (n+2), weight exponent of the inverted system
  double delta0;    // (2+alpha)/(p-1) = n-2-delta
  double tau0;      // friction of the inverted system, equals -tau
  double sigma0;    // equals sigma
  double sphere_area;  // area of the unit sphere S^{n-1}
  double mu1, mu2, beta;
  bool is_critical;    // p == (n+2)/(n-2) up to roundoff
};

/// Area of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2).  Gamma at integer
/// and half-integer arguments is evaluated by exact recurrence.
double unit_sphere_area(int n);

/// Validates (n, p, mu1, mu2, beta) and fills every derived constant.
/// Throws std::domain_error naming the violated bound when p lies outside
/// (n/(n-2), (n+2)/(n-2)] or n < 3 or a coefficient is nonpositive.
Params compute_params(int n, double p, double mu1, double mu2, double beta);

}  // namespace eflab
