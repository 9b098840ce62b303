#ifndef PHOTONGAIN_OPTSIZE_HPP
#define PHOTONGAIN_OPTSIZE_HPP

#include <utility>

#include "photongain/errors.hpp"

namespace pg::optsize {

// Bias profiles nu-dagger, optimal sample sizes for Pbar / T / G, the
// low-illumination cost constants C, closed-form approximations, and the
// constrained Newton solver for the exact optimum.

// Target bias profile |relative bias| = arb0 * zeta^b.
struct BiasProfileSpec {
  double arb0;  // in (0, 1)
  double b;     // >= 0; b > 1 makes zeta_b1 degenerate at 0
};

// nu-dagger(zeta) = ln(arb0)/ln(zeta) + b, the order forcing the profile.
double nudag(double zeta, const BiasProfileSpec& spec);

// First integer-order crossing zeta_{b,1} = arb0^{1/(1-b)} for b < 1,
// else 0.
double zeta_b1(const BiasProfileSpec& spec);

// Optimal real-valued (n1, n2) for the signal mean Pbar:
// n1 = zeta(1+sqrt(zeta))/(1-zeta)^2 / ((sigma_d g)^2 acv0^2), n2 with
// sqrt(zeta)+zeta; the optimality relation n2/n1 = sqrt(zeta) is exact.
std::pair<double, double> pbar_opt_sizes(double zeta, double sigma_d_g,
                                         double acv0);

// Low-illumination asymptotic ACV^2 of T as a function of the cost
// constant C: series sum_{k>=1} [gamma(k+1,L)/(1-arb0)]^2 (4/C)^k / k!
// with L = -ln(arb0), and the equivalent exponential-integral form as
// printed (kept as a cross-check of the identity).
double acv2bar_t(double c, double arb0);
double acv2bar_t_ei(double c, double arb0);

// Closed-form two-term starting value C*_T and the Newton solution of
// acv2bar_t(C) = acv0^2 to 1e-12, bisection fallback on
// [C*/10, 10 C*].
double c_t_star(const BiasProfileSpec& spec, double acv0);
double c_t_constant(const BiasProfileSpec& spec, double acv0);

// Cost constant for G: solves
// acv2bar_t(C) (1 + 2/((sigma_d g)^2 C)) + 2/((sigma_d g)^2 C) = acv0^2.
double gain_c_constant(const BiasProfileSpec& spec, double acv0,
                       double sigma_d_g);

// Closed-form approximate optimal sizes (real-valued):
// n1 = (2/acv0^2)(g11^2 + sqrt(g11^2 g10^2 + g21^2 acv0^2)) + 5,
// n2 = (2/acv0^2)(g10^2 + sqrt(same)) + 1, gtilde at (zeta, nudag).
std::pair<double, double> approx_opt_sizes(double zeta,
                                           const BiasProfileSpec& spec,
                                           double acv0);

enum class SizeMethod { kExactPoint, kApprox, kNewton };

struct OptimalSizes {
  int n1 = 1;            // ceiling-rounded
  int n2 = 1;
  double n1_real = 0.0;  // continuous solution, n = 2 alpha + 1
  double n2_real = 0.0;
  double zeta = 0.0;
  double acv_target = 0.0;
  int terms_used = 0;    // series truncation order n
  double rel_bound = 0.0;
  SizeMethod method = SizeMethod::kApprox;
};

// Constrained optimum: solves d ACV^2/d alpha2 = d ACV^2/d alpha1 (fixed
// total) together with ACV^2 = acv0^2 by damped Newton on (alpha1,
// alpha2) from the approximate start.  The series order n grows until
// R*_{n,n+1,2} <= eps or n = n_max; a capped order is diagnosed against
// the integral representation and the measured truncation is reported.
// zeta within 1e-12 of {0, zeta_b1} short-circuits to the exact point
// (2 acv0^-2 + 5, 1).
OptimalSizes solve_opt_sizes(double zeta, const BiasProfileSpec& spec,
                             double acv0, double eps = 5e-7,
                             int n_max = 20);

// Full-series ACV^2 of T via the double-integral representation,
// Gauss-Legendre quadrature; used as the truncation diagnostic.
double acv2_integral(double zeta, double alpha1, double alpha2, double nu,
                     int nodes = 96);

// Same integral with the alpha1-indexed hypergeometric factor truncated
// after its k = n term: the n-th order approximation whose error is the
// series truncation alone, independent of the alpha2 factor.
double acv2_integral_trunc(double zeta, double alpha1, double alpha2,
                           double nu, int n, int nodes = 96);

// Truncated ACV^2 series with analytic alpha-derivatives; exposed for
// the optimality cross-checks.
double acv2_series(double zeta, double alpha1, double alpha2, double nu,
                   int n);

enum class EbarTarget { kT, kG };

// Low-illumination limit of the dominance ratio:
// (1 + 2 (1 + acv0^-2)/((sigma_d g)^2 C))^-1 with C the T or G constant.
double ebar(const BiasProfileSpec& spec, double acv0, double sigma_d_g,
            EbarTarget which);

// Pointwise dominance ratio at the optimal sizes for zeta.
double e_curve(double zeta, const BiasProfileSpec& spec, double acv0,
               double sigma_d_g, double eps = 5e-7, int n_max = 20);

}  // namespace pg::optsize

#endif  // PHOTONGAIN_OPTSIZE_HPP
