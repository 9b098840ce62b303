#ifndef PHOTONGAIN_GAIN_HPP
#define PHOTONGAIN_GAIN_HPP

#include <cstdint>

#include "photongain/errors.hpp"
#include "photongain/estimator.hpp"

namespace pg::gain {

// The conversion-gain estimator G_nu = Pbar * T_nu, its exact moments,
// the dominance ratio E, upper-bound confidence intervals for the
// absolute relative bias and absolute coefficient of variation, and the
// bias approximation for the traditional ratio estimator.

// Pixel model parameters.  Units: mu_d, sigma_d2 in DN / DN^2; mu_e in
// electrons; g in e-/DN; n1 illuminated frames, n2 dark frames.
struct SensorParams {
  double mu_d;
  double sigma_d2;
  double mu_e;
  double g;
  int n1;
  int n2;

  double mu_pd() const { return mu_d + mu_e / g; }
  double sigma_pd2() const { return sigma_d2 + mu_e / (g * g); }
  double zeta() const { return sigma_d2 / sigma_pd2(); }
  double alpha1() const { return (n1 - 1) / 2.0; }
  double alpha2() const { return (n2 - 1) / 2.0; }
};

// One photon-transfer observation: pbar = Xbar - Ybar and the sample
// variance pair.  pbar may be negative at very low illumination; it is
// passed through, not rejected.
struct GainObservation {
  double pbar;
  estimator::VariancePair vp;
};

enum class CiTarget { kArb, kAcv };

// Upper-bound confidence set (lower, upper] at confidence level 1-alpha.
struct ConfidenceInterval {
  double level;
  double lower;
  double upper;
  CiTarget target;
};

// G_nu(T) = pbar * T_nu(Y1, Y2); requires nu > 0.  The overload with
// asym_k forces the K-th asymptotic form, otherwise the dual strategy of
// t_nu_auto decides.
double g_nu_estimate(const GainObservation& obs, double nu);
double g_nu_estimate(const GainObservation& obs, double nu, int asym_k);

// E G_nu = (1 - zeta^nu) * g.
double mean_g_nu(const SensorParams& sp, double nu);

// E Pbar^2 = Var Pbar + (E Pbar)^2 with Var Pbar = sigma_pd2/n1 +
// sigma_d2/n2 and E Pbar = mu_e/g.
double mean_sq_pbar(const SensorParams& sp);

// Var G_nu = E Pbar^2 * E T_nu^2 - (E G_nu)^2, the second moment of T_nu
// certified to relative tolerance tol.
double var_g_nu(const SensorParams& sp, double nu, double tol = 1e-10);

// cv^2 of Pbar: [zeta / ((sigma_d g)^2 (1-zeta)^2)] * (1/n1 + zeta/n2).
double cv2_pbar(const SensorParams& sp);

// acv^2 of G_nu through the exact decomposition
// cv2_T + cv2_T * cv2_Pbar + cv2_Pbar.
double acv2_g_nu(const SensorParams& sp, double nu, double tol = 1e-10);

// Dominance ratio E = [1 + (1 + 1/cv2_T) cv2_Pbar]^{-1} in (0, 1).
double e_ratio(const SensorParams& sp, double nu, double tol = 1e-10);

// Level 1-alpha upper confidence set (0, Z^nu] for the absolute relative
// bias zeta^nu, Z = (Y2/Y1) * F-quantile; requires nu in the strip and
// nu != 0.
ConfidenceInterval ci_arb(const estimator::VariancePair& vp, double nu,
                          double alpha);

// Level 1-alpha upper confidence set for the absolute coefficient of
// variation; lower endpoint is the boundary constant (alpha1-2)^{-1/2}
// for nu > 1 or (alpha2-2)^{-1/2} for nu < -1.  |nu| <= 1 is rejected:
// the monotonicity backing the construction is unproven there.
ConfidenceInterval ci_acv(const estimator::VariancePair& vp, double nu,
                          double alpha, double tol = 1e-8);

// Dawson-integral approximation of the absolute relative bias of the
// traditional ratio estimator Pbar/(Y1 - Y2).
double arb_g_traditional(double zeta, double alpha1, double alpha2);

// Monte Carlo demonstration summary.
struct McDemoResult {
  long trials = 0;
  double mean_g = 0.0;        // sample mean of G_nu
  double var_g = 0.0;         // sample variance of G_nu
  double exact_mean = 0.0;    // E G_nu
  double exact_var = 0.0;     // Var G_nu
  double coverage_arb = 0.0;  // empirical ARB-CI coverage
  double coverage_acv = 0.0;  // empirical ACV-CI coverage
  int asym_k = 0;             // asymptotic order used per trial
  int k_star = 0;             // truncation order certified over the Z range
  double r_star = 0.0;        // its uniform relative bound
  double z_lo = 0.0;          // observed Z range
  double z_hi = 0.0;
};

// Draws `trials` independent (Pbar, Y1, Y2) triples from the sensor
// model, evaluates G_nu and both confidence intervals on each, and
// reports sample moments, coverages, and the truncation order K*
// certified over the observed Z range.  Deterministic under seed.
// Requires |nu| > 1 (ACV interval) and the second-moment strip.
McDemoResult mc_demo(const SensorParams& sp, double nu, double alpha,
                     long trials, std::uint64_t seed);

}  // namespace pg::gain

#endif  // PHOTONGAIN_GAIN_HPP
