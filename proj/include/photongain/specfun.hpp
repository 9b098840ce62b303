#ifndef PHOTONGAIN_SPECFUN_HPP
#define PHOTONGAIN_SPECFUN_HPP

#include <string>
#include <vector>

#include "photongain/errors.hpp"
#include "photongain/ratpoly.hpp"

namespace pg::specfun {

// Real-valued special functions and exact combinatorial coefficients.
// All gamma ratios go through log-gamma with explicit sign bookkeeping so
// shape parameters in the thousands do not overflow.  Series follow a
// uniform stopping rule: |term| < 1e-16 * |partial sum| for three
// consecutive terms, hard cap 100000 terms -> ConvergenceError.

// log|Gamma(x)| together with the sign of Gamma(x).  sign == 0 flags a
// pole (x a nonpositive integer).
struct SignedLogGamma {
  double log_abs;
  int sign;
};
SignedLogGamma lgamma_signed(double x);

// Gamma(num)/Gamma(den) with pole bookkeeping:
//  - pole in the denominator only  -> 0
//  - pole in the numerator only    -> PoleError
//  - poles in both                 -> finite limit via reflection
double gamma_ratio(double num, double den);

// Rising factorial (s)_z = Gamma(s+z)/Gamma(s).
double pochhammer(double s, double z);

// Falling factorial s^(z) = Gamma(s+1)/Gamma(s-z+1).
double falling_factorial(double s, double z);

// Gauss hypergeometric function for real arguments, z <= 1.
// Region map: |z| <= 0.5 direct series; 0.5 < z < 1 Euler transformation;
// z < 0 Pfaff transformation; z = 1 closed form (requires c-a-b > 0).
double hyp2f1(double a, double b, double c, double z);

// Regularized form F(a,b;c;z)/Gamma(c); finite even at nonpositive
// integer c.
double hyp2f1_reg(double a, double b, double c, double z);

// Generalized hypergeometric series at unit argument.  Requires either a
// nonpositive-integer top parameter (finite sum) or sum(bottom) -
// sum(top) > 0 for convergence.
double hyp_pfq_unit(const std::vector<double>& top,
                    const std::vector<double>& bottom);

// Confluent hypergeometric 1F1(a;b;z); Kummer transformation for z < 0.
double hyp1f1(double a, double b, double z);

// Incomplete beta B_z(a,b) and regularized I_z(a,b), 0 <= z <= 1, a > 0.
double inc_beta(double z, double a, double b);
double reg_inc_beta(double z, double a, double b);

// CDF of the F(d1,d2) distribution, exposed because the quantile is
// defined as its monotone inverse.
double f_cdf(double x, double d1, double d2);

// x with Pr(F_{d1,d2} <= x) = 1 - alpha, solved to 1e-12.
double f_quantile(double alpha, double d1, double d2);

// Lower incomplete gamma, s > 0, z >= 0.
double lower_gamma(double s, double z);

// Exponential integral Ei for real z != 0.
double expint_ei(double z);

// Digamma (n=0) and trigamma (n=1) for z > 0.
double polygamma(int n, double z);

// Dawson integral D(x) = exp(-x^2) * integral_0^x exp(t^2) dt.
double dawson(double x);

// Exact combinatorial tables, 0 <= k <= n <= 24.
// stirling1 is the unsigned Stirling number of the first kind; the signed
// value is (-1)^(n-k) * stirling1(n,k).
double stirling1(int n, int k);
double stirling2(int n, int k);
// Decimal digit strings of the exact table entries, for exactness tests.
std::string stirling1_digits(int n, int k);
std::string stirling2_digits(int n, int k);

// Generalized Norlund polynomial B_k^(ell)(x) for integer order ell >= 0,
// evaluated at real x; exact rational coefficients internally, k <= 24.
double norlund(int k, int ell, double x);

// Norlund number B_m^(s) as an exact polynomial in the order s
// (degree m), for the asymptotic-expansion coefficient algebra.  m <= 24.
RatPoly norlund_number_poly_in_order(int m);

// Exact binomial-coefficient polynomial C(x + shift, m) in x.
RatPoly binom_poly(int m, const Rat& shift, bool negate_x);

}  // namespace pg::specfun

#endif  // PHOTONGAIN_SPECFUN_HPP
