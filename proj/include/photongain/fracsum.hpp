#ifndef PHOTONGAIN_FRACSUM_HPP
#define PHOTONGAIN_FRACSUM_HPP

#include "photongain/errors.hpp"

namespace pg::fracsum {

// Fractional finite sums: analytic interpolation of partial sums
// sum_{k=0}^{nu-1} to non-integer upper limit nu, together with the
// g/gtilde function families built from them.

// Incomplete geometric series (1 - z^nu)/(1 - z); equals nu at z = 1.
double inc_geom(double z, double nu);

// Incomplete Lerch transcendent Phi(z, -n, omega)_nu for integer order
// n in 0..24 and offset omega >= 0.  Stable at z = 1 via the
// Stirling-weighted 2F1 sum.
double inc_lerch(double z, int order_n, double omega, double nu);

// Sine-modulated incomplete Gauss hypergeometric F(alpha,beta;gamma;z)_nu,
// interpolating partial sums of the 2F1 series.  The alpha = 1 case uses
// the two-term 2F1-only form and supports any z in the 2F1 domain; the
// general case needs a 3F2 series and is restricted to |z| < 1 for
// non-integer nu.
double inc_hyp_sinemod(double alpha, double beta, double gamma, double z,
                       double nu);

// g_{n,omega}(z, nu) = falling-factorial shift operator applied to the
// incomplete geometric series; closed hypergeometric form
// n! (omega+nu)^(n+1 falling) z^nu Freg(1, omega+nu+1; n+2; 1-z).
double g_nw(int n, int omega, double z, double nu);

// Cross-check path: the Stirling-number expansion of g through
// incomplete Lerch values (form (i) of the explicit-forms theorem).
double g_nw_stirling(int n, int omega, double z, double nu);

// Normalized family gtilde = g / inc_geom, with removable singularities
// handled by form switching.  The quality flag names the form used so
// cross-form tests are deterministic.
enum class GtildeForm { hyp_ratio, finite_sum, boundary };
struct GtildeResult {
  double value;
  GtildeForm form;
};
GtildeResult gtilde_nw_full(int n, int omega, double z, double nu);
double gtilde_nw(int n, int omega, double z, double nu);

// Expectation factor Eh_{n,omega}(z, nu) =
//   n! Freg(1, omega+nu+1; n+2; 1-z) / Freg(1, nu+1; 2; 1-z),
// and the coefficient C_{n,omega}(nu) = (omega+nu)^(n+1 falling)/nu with
// its nu -> 0 limit (-1)^(n-omega) omega! (n-omega)!, so that
// gtilde = C * Eh.
double eh_nw(int n, int omega, double z, double nu);
double c_nw(int n, int omega, double nu);

// Zero set of gtilde per the zeros lemma:
// (n-omega-nu in N0 and nu != 0) or (n >= 1, n > omega, nu >= 0, z = 0).
bool gtilde_zeros_predicate(int n, int omega, double z, double nu);

}  // namespace pg::fracsum

#endif  // PHOTONGAIN_FRACSUM_HPP
