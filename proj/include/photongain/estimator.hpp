#ifndef PHOTONGAIN_ESTIMATOR_HPP
#define PHOTONGAIN_ESTIMATOR_HPP

#include <utility>
#include <vector>

#include "photongain/errors.hpp"

namespace pg::estimator {

// The reciprocal-difference estimators T_n (integer order), T_nu
// (fractional order), the large-shape asymptotic T_{nu,K}, their exact
// moments, and the tail truncation-error bounds used to certify series
// truncations.

// Sample variances with their gamma shape parameters alpha_i = (n_i-1)/2.
struct VariancePair {
  double y1;      // illuminated sample variance, DN^2
  double y2;      // dark sample variance, DN^2
  double alpha1;  // shape of Y1
  double alpha2;  // shape of Y2
};

// Population variances kappa_1 > 0, kappa_2 > 0; zeta = kappa2/kappa1.
struct PopulationParams {
  double kappa1;
  double kappa2;
  double zeta() const { return kappa2 / kappa1; }
};

// Moment summary of T_nu.  cv carries sign(nu); acv = |cv|.
struct MomentReport {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double cv = 0.0;
  double acv = 0.0;
  int terms_used = 0;
  double rel_error_bound = 0.0;
};

// Discrete estimator T_n; n = 0 is the empty sum.  Requires 0 <= n < alpha1.
double t_n(const VariancePair& vp, int n);

// Fractional estimator T_nu on the strip -alpha2 < nu < alpha1, through the
// sine-modulated incomplete hypergeometric function.
double t_nu(const VariancePair& vp, double nu);

// K-th order large-shape asymptotic approximation T_{nu,K}, K <= 6.
double t_nu_asym(const VariancePair& vp, double nu, int K);

// Dual strategy: exact T_nu for max shape <= 60, otherwise the asymptotic
// ladder with K grown until the K -> K+1 change is below 1e-8 relative.
double t_nu_auto(const VariancePair& vp, double nu);

// Coefficients c_{m,K}(alpha1, alpha2), m = 0..2K, of the hypergeometric
// form of T_{nu,K}; exact polynomial algebra scaled by shape powers.
std::vector<double> asym_coeffs(double alpha1, double alpha2, int K);

// Polynomial coefficient p_{k,l} = d_x^l P_{2k}(0) / l!.
double p_kl(int k, int l, double alpha1, double alpha2);

// E T_nu = (1 - zeta^nu)/(kappa1 - kappa2); continuous limit nu/kappa1 at
// kappa1 = kappa2.
double mean_t_nu(const PopulationParams& pp, double nu);

// Absolute relative bias of T_nu as an estimator of 1/(kappa1-kappa2).
double arb_t_nu(const PopulationParams& pp, double nu);

// Partial squared absolute coefficient of variation: the k = 1..n diagonals
// of the acv^2 series at argument z (zeta), including the z = 0 and large-z
// boundary forms.
double acv2_partial(double z, double alpha1, double alpha2, double nu, int n);

// Exact moments of T_nu with a certified relative error bound <= tol on the
// second moment.  Throws ConstraintError outside alpha1+alpha2 > 2 or the
// strip -alpha2 < 2 nu < alpha1.
MomentReport moments_t_nu(const PopulationParams& pp, double alpha1,
                          double alpha2, double nu, double tol = 1e-10);

// Discrete double-sum second moment of T_n (integer cross-check form).
double second_moment_t_n_discrete(const PopulationParams& pp, double alpha1,
                                  double alpha2, int n);

// Boundary values of cv T_nu as zeta -> 0 (at_zero) or zeta -> infinity.
double cv_boundary(bool at_zero, double alpha1, double alpha2, double nu);

// Tail truncation bound E*_{n,m} for acv^2 partial sums at argument z; at
// the z = 0 / large-z boundaries the exact tail is returned instead since
// the series collapses to a closed form there.
double trunc_bound(int n, int m, double z, double alpha1, double alpha2,
                   double nu);

// R*_{n,m,p} = |(1 + E*_{n,m}/acv2_n)^(-p/2) - 1|.
double rel_bound(int n, int m, int p, double z, double alpha1, double alpha2,
                 double nu);

// Uniform variant over z in [z_lo, z_hi]: bound numerator and denominator
// at opposite ends of the interval (ends swap with the sign of nu).
double rel_bound_star(int n, int m, int p, double z_lo, double z_hi,
                      double alpha1, double alpha2, double nu);

// Smallest n <= n_max with rel_bound_star(n, m, p=1, ...) <= eps; returns
// {n, bound}.  Throws ConvergenceError if no n qualifies.
std::pair<int, double> choose_order(double z_lo, double z_hi, double alpha1,
                                    double alpha2, double nu, int m,
                                    double eps, int n_max = 20);

// Limiting unbiased estimators of 1/kappa1 (kappa1 > kappa2 context) and
// -1/kappa2 (kappa1 < kappa2 context).
double estimator_u(double y2, double alpha2, double kappa1);
double estimator_v(double y1, double alpha1, double kappa2);

}  // namespace pg::estimator

#endif  // PHOTONGAIN_ESTIMATOR_HPP
