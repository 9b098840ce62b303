#include "photongain/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "photongain/fracsum.hpp"
#include "photongain/ratpoly.hpp"
#include "photongain/specfun.hpp"

namespace pg::estimator {

namespace {

using specfun::falling_factorial;
using specfun::hyp1f1;
using specfun::hyp2f1;
using specfun::hyp_pfq_unit;
using specfun::pochhammer;
using specfun::stirling2;

constexpr int kMaxAsymOrder = 6;
constexpr int kMaxTailTerms = 100000;
constexpr double kRelStop = 1e-16;
constexpr double kLargeZ = 1e8;

void validate_vp(const VariancePair& vp) {
  if (!(vp.y1 > 0.0) || !(vp.y2 > 0.0) || !std::isfinite(vp.y1) ||
      !std::isfinite(vp.y2))
    throw DomainError("estimator: sample variances must be finite positive");
  if (!(vp.alpha1 >= 0.5) || !(vp.alpha2 >= 0.5))
    throw DomainError("estimator: shapes require alpha >= 0.5 (n >= 2)");
}

// P_2k(x) expanded exactly: Q[k][m](x) = C(x+1,m) C(-x,k-m)
// B_m^(2+x) B_{k-m}^(1-x); the alpha powers are applied in floating point.
const std::vector<std::vector<RatPoly>>& q_polys() {
  static const std::vector<std::vector<RatPoly>> cache = [] {
    std::vector<std::vector<RatPoly>> q(kMaxAsymOrder + 1);
    const RatPoly two_plus_x = {Rat(2), Rat(1)};
    const RatPoly one_minus_x = {Rat(1), Rat(-1)};
    for (int k = 0; k <= kMaxAsymOrder; ++k) {
      q[k].resize(k + 1);
      for (int m = 0; m <= k; ++m) {
        RatPoly p = specfun::binom_poly(m, Rat(1), false);
        p = rp_mul(p, specfun::binom_poly(k - m, Rat(0), true));
        p = rp_mul(p, rp_compose(specfun::norlund_number_poly_in_order(m),
                                 two_plus_x));
        p = rp_mul(p, rp_compose(specfun::norlund_number_poly_in_order(k - m),
                                 one_minus_x));
        q[k][m] = p;
      }
    }
    return q;
  }();
  return cache;
}

// Coefficient ratios of the tail series a_j = (1+nu)_j^2/((alpha1)_j j!)
// and b_j = (1-nu)_j^2/((alpha2)_j j!).
double a_ratio(int j, double alpha1, double nu) {
  double t = 1.0 + nu + j;
  return t * t / ((alpha1 + j) * (j + 1.0));
}

double b_ratio(int j, double alpha2, double nu) {
  double t = 1.0 - nu + j;
  return t * t / ((alpha2 + j) * (j + 1.0));
}

// sum_{k >= k0} a_k (or b_k): complementary incomplete 2F1 at unit
// argument with integer index, summed directly.
double tail_sum(int k0, double alpha, double nu, bool use_a) {
  double term = 1.0;
  for (int j = 0; j < k0; ++j)
    term *= use_a ? a_ratio(j, alpha, nu) : b_ratio(j, alpha, -nu);
  double sum = 0.0;
  int quiet = 0;
  for (int k = k0; k < k0 + kMaxTailTerms; ++k) {
    sum += term;
    term *= use_a ? a_ratio(k, alpha, nu) : b_ratio(k, alpha, -nu);
    // <= so exactly-zero terms (integer nu truncation) also count as quiet
    if (std::abs(term) <= kRelStop * std::abs(sum)) {
      if (++quiet >= 3) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("trunc_bound: tail series exceeded term cap");
}

bool is_boundary_z(double z) { return z == 0.0 || z > kLargeZ; }

double boundary_shift(double z, double nu) {
  return (z == 0.0) ? (nu < 0.0 ? nu : 0.0) : (nu > 0.0 ? nu : 0.0) - 1.0;
}

// Diagonal k of the boundary acv^2 series, computed in log space so the
// factorial-squared numerators cannot overflow at large k.
double boundary_diag(int k, double shift, double alpha1, double alpha2) {
  if (shift == 0.0 || shift == -1.0) {
    // Only one l survives: s_k = k!/(alpha)_k with alpha = alpha1 (l = k,
    // shift 0) or alpha2 (l = 0, shift -1).
    double alpha = (shift == 0.0) ? alpha1 : alpha2;
    double prod = 1.0;
    for (int j = 1; j <= k; ++j) prod *= j / (alpha + j - 1.0);
    return prod;
  }
  bool integer_shift = std::abs(shift - std::round(shift)) < 1e-12;
  double sum = 0.0;
  if (integer_shift) {
    // Zeros may appear inside the falling factorial; use direct products.
    for (int l = 0; l <= k; ++l) {
      double g = falling_factorial(l + shift, static_cast<double>(k));
      if (g == 0.0) continue;
      double lden = std::lgamma(alpha1 + l) - std::lgamma(alpha1) +
                    std::lgamma(alpha2 + k - l) - std::lgamma(alpha2) +
                    std::lgamma(l + 1.0) + std::lgamma(k - l + 1.0);
      sum += std::exp(2.0 * std::log(std::abs(g)) - lden);
    }
    return sum;
  }
  // log|ff(shift, k)| as the starting numerator, then ratio updates in l.
  double lnum = 0.0;
  for (int j = 0; j < k; ++j) lnum += std::log(std::abs(shift - j));
  double lden = std::lgamma(alpha2 + k) - std::lgamma(alpha2) +
                std::lgamma(k + 1.0);
  for (int l = 0; l <= k; ++l) {
    sum += std::exp(2.0 * lnum - lden);
    // advance l -> l+1: ff gains (l+1+shift), loses (l+1+shift-k)
    lnum += std::log(std::abs(l + 1.0 + shift)) -
            std::log(std::abs(l + 1.0 + shift - k));
    lden += std::log(alpha1 + l) - std::log(alpha2 + k - l - 1.0) +
            std::log(l + 1.0) - std::log(static_cast<double>(k - l));
  }
  return sum;
}

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double t_n(const VariancePair& vp, int n) {
  validate_vp(vp);
  if (n < 0 || static_cast<double>(n) >= vp.alpha1)
    throw DomainError("t_n: requires 0 <= n < alpha1");
  double ratio = vp.alpha2 * vp.y2 / (vp.alpha1 * vp.y1);
  double sum = 0.0;
  // term_k = (alpha1-1)...(alpha1-k-1) ratio^k / (alpha2)_k, since
  // 1/(alpha1)_{-k-1} is the falling factorial (alpha1-1)^(k+1).
  double term = vp.alpha1 - 1.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= (vp.alpha1 - 2.0 - k) * ratio / (vp.alpha2 + k);
  }
  return sum / (vp.alpha1 * vp.y1);
}

double t_nu(const VariancePair& vp, double nu) {
  validate_vp(vp);
  if (!(nu > -vp.alpha2 && nu < vp.alpha1))
    throw DomainError("t_nu: nu outside the strip -alpha2 < nu < alpha1");
  double z = -vp.alpha2 * vp.y2 / (vp.alpha1 * vp.y1);
  double f = fracsum::inc_hyp_sinemod(1.0, 2.0 - vp.alpha1, vp.alpha2, z, nu);
  return (vp.alpha1 - 1.0) / (vp.alpha1 * vp.y1) * f;
}

double p_kl(int k, int l, double alpha1, double alpha2) {
  if (k < 0 || k > kMaxAsymOrder)
    throw RangeError("p_kl: order k outside 0..6");
  if (l < 0 || l > 2 * k) return 0.0;
  const auto& q = q_polys()[k];
  double acc = 0.0;
  for (int m = 0; m <= k; ++m)
    acc += std::pow(alpha1, -m) * std::pow(alpha2, -(k - m)) *
           rat_to_double(rp_coeff(q[m], static_cast<size_t>(l)));
  return acc;
}

std::vector<double> asym_coeffs(double alpha1, double alpha2, int K) {
  if (K < 0 || K > kMaxAsymOrder)
    throw RangeError("asym_coeffs: K outside 0..6");
  std::vector<double> c(2 * K + 1, 0.0);
  for (int m = 0; m <= 2 * K; ++m) {
    double acc = 0.0;
    for (int l = m; l <= 2 * K; ++l) {
      double s2 = stirling2(l, m);
      if (s2 == 0.0) continue;
      double psum = 0.0;
      for (int k = 0; k <= K; ++k) psum += p_kl(k, l, alpha1, alpha2);
      acc += s2 * psum;
    }
    c[m] = acc / (m + 1.0);
  }
  return c;
}

double t_nu_asym(const VariancePair& vp, double nu, int K) {
  validate_vp(vp);
  if (K < 0 || K > kMaxAsymOrder)
    throw RangeError("t_nu_asym: K outside 0..6");
  std::vector<double> c = asym_coeffs(vp.alpha1, vp.alpha2, K);
  double w = 1.0 - vp.y1 / vp.y2;
  double acc = 0.0;
  for (int m = 0; m <= 2 * K; ++m) {
    if (c[m] == 0.0) continue;
    acc += c[m] * falling_factorial(nu, m + 1.0) *
           hyp2f1(m + 1.0, 1.0 + nu, m + 2.0, w);
  }
  return acc / vp.y2;
}

double t_nu_auto(const VariancePair& vp, double nu) {
  if (std::max(vp.alpha1, vp.alpha2) <= 60.0) return t_nu(vp, nu);
  double prev = t_nu_asym(vp, nu, 1);
  for (int K = 2; K <= kMaxAsymOrder; ++K) {
    double cur = t_nu_asym(vp, nu, K);
    if (std::abs(cur - prev) <= 1e-8 * std::max(std::abs(cur), 1e-300))
      return cur;
    prev = cur;
  }
  return prev;
}

double mean_t_nu(const PopulationParams& pp, double nu) {
  if (!(pp.kappa1 > 0.0) || !(pp.kappa2 > 0.0))
    throw DomainError("mean_t_nu: kappas must be positive");
  return fracsum::inc_geom(pp.zeta(), nu) / pp.kappa1;
}

double arb_t_nu(const PopulationParams& pp, double nu) {
  double zeta = pp.zeta();
  if (!(zeta > 0.0)) throw DomainError("arb_t_nu: zeta must be positive");
  return std::pow(zeta, nu);
}

double acv2_partial(double z, double alpha1, double alpha2, double nu,
                    int n) {
  if (z < 0.0) throw DomainError("acv2_partial: z must be nonnegative");
  if (n < 0) throw DomainError("acv2_partial: n must be nonnegative");
  double total = 0.0;
  if (is_boundary_z(z)) {
    // Boundary form of gtilde: a falling factorial replaces the Eh ratio.
    double shift = boundary_shift(z, nu);
    for (int k = 1; k <= n; ++k)
      total += boundary_diag(k, shift, alpha1, alpha2);
    return total;
  }
  std::vector<double> a(n + 1), b(n + 1);
  a[0] = b[0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    a[j] = a[j - 1] * a_ratio(j - 1, alpha1, nu);
    b[j] = b[j - 1] * b_ratio(j - 1, alpha2, nu);
  }
  for (int k = 1; k <= n; ++k)
    for (int l = 0; l <= k; ++l) {
      double eh = fracsum::eh_nw(k, l, z, nu);
      total += a[l] * b[k - l] * eh * eh;
    }
  return total;
}

double second_moment_t_n_discrete(const PopulationParams& pp, double alpha1,
                                  double alpha2, int n) {
  if (n < 0) throw DomainError("second_moment_t_n_discrete: n >= 0 required");
  double zeta = pp.zeta();
  double acc = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double f1 = hyp_pfq_unit({k + 1.0, l + 1.0}, {alpha1});
      double f2 = hyp_pfq_unit({static_cast<double>(-k),
                                static_cast<double>(-l)},
                               {alpha2});
      acc += f1 * f2 * std::pow(zeta, k + l);
    }
  return acc / (pp.kappa1 * pp.kappa1);
}

double cv_boundary(bool at_zero, double alpha1, double alpha2, double nu) {
  if (nu == 0.0) return 0.0;
  if (at_zero && nu > 0.0) {
    if (!(alpha1 > 2.0))
      throw ConstraintError("cv_boundary: requires alpha1 > 2");
    return 1.0 / std::sqrt(alpha1 - 2.0);
  }
  if (!at_zero && nu < 0.0) {
    if (!(alpha2 > 2.0))
      throw ConstraintError("cv_boundary: requires alpha2 > 2");
    return -1.0 / std::sqrt(alpha2 - 2.0);
  }
  double ratio;
  if (at_zero) {
    // zeta -> 0 with nu < 0.
    ratio = pochhammer(alpha1 - nu - 1.0, -nu - 1.0) *
            pochhammer(alpha2 + nu, nu) /
            (pochhammer(alpha1, -nu - 1.0) * pochhammer(alpha2, nu));
  } else {
    // zeta -> infinity with nu > 0.
    ratio = pochhammer(alpha1 - nu, -nu) *
            pochhammer(alpha2 + nu - 1.0, nu - 1.0) /
            (pochhammer(alpha1, -nu) * pochhammer(alpha2, nu - 1.0));
  }
  if (!std::isfinite(ratio))
    throw ConstraintError("cv_boundary: boundary value not finite");
  double v = std::sqrt(std::max(ratio - 1.0, 0.0));
  return sign_of(nu) * v;
}

double trunc_bound(int n, int m, double z, double alpha1, double alpha2,
                   double nu) {
  if (n < 0 || m < 0) throw DomainError("trunc_bound: n, m >= 0 required");
  if (z < 0.0) throw DomainError("trunc_bound: z must be nonnegative");
  if (is_boundary_z(z)) {
    // At the boundaries the acv^2 limit is closed form, so the exact tail
    // replaces the E* estimate.
    double cv = cv_boundary(z == 0.0, alpha1, alpha2, nu);
    double tail = cv * cv - acv2_partial(z, alpha1, alpha2, nu, n);
    return std::max(tail, 0.0);
  }
  if (!(alpha1 > 2.0 * (1.0 + nu)) || !(alpha2 > 2.0 * (1.0 - nu)))
    throw ConstraintError(
        "trunc_bound: infinite unless alpha1 > 2(1+nu) and alpha2 > 2(1-nu)");
  // b_j values up to index m; a_k values up to k'' - 1.
  int k2 = std::max(0, n + 1 - m);
  std::vector<double> b(m + 1);
  b[0] = 1.0;
  for (int j = 1; j <= m; ++j) b[j] = b[j - 1] * b_ratio(j - 1, alpha2, nu);
  double sum1 = 0.0;
  for (int j = 0; j < m; ++j) {
    int k1 = std::max(0, n + 1 - j);
    double eh = fracsum::eh_nw(k1 + j, k1, z, nu);
    sum1 += eh * eh * b[j] * tail_sum(k1, alpha1, nu, true);
  }
  int omega2 = (z <= 1.0) ? k2 : 0;
  double eh2 = fracsum::eh_nw(k2 + m, omega2, z, nu);
  double full_a = hyp_pfq_unit({1.0 + nu, 1.0 + nu}, {alpha1});
  double tail_b_m = tail_sum(m, alpha2, -nu, false);
  double corr = 0.0;
  if (k2 > 0) {
    std::vector<double> a(k2);
    a[0] = 1.0;
    for (int j = 1; j < k2; ++j) a[j] = a[j - 1] * a_ratio(j - 1, alpha1, nu);
    try {
      double acc = 0.0;
      for (int k = 0; k < k2; ++k)
        acc += a[k] * hyp_pfq_unit({static_cast<double>(-k),
                                    1.0 - k - alpha1, 1.0, 1.0 - nu + m,
                                    1.0 - nu + m},
                                   {1.0 + m, m + alpha2, -k - nu, -k - nu});
      corr = b[m] * acc;
    } catch (const PoleError&) {
      // Integer nu puts a pole in the 5F4 bottom row; the identity's
      // left-hand side, the direct convolution, is always well defined.
      std::vector<double> bb(k2 + m + 1);
      bb[0] = 1.0;
      for (int j = 1; j <= k2 + m; ++j)
        bb[j] = bb[j - 1] * b_ratio(j - 1, alpha2, nu);
      corr = 0.0;
      for (int k = 0; k < k2; ++k)
        for (int l = 0; l <= k; ++l) corr += a[l] * bb[k - l + m];
    }
  }
  double sum2 = eh2 * eh2 * (full_a * tail_b_m - corr);
  return std::max(sum1 + sum2, 0.0);
}

double rel_bound(int n, int m, int p, double z, double alpha1, double alpha2,
                 double nu) {
  if (p <= 0) throw DomainError("rel_bound: p must be positive");
  double e = trunc_bound(n, m, z, alpha1, alpha2, nu);
  double acv2n = acv2_partial(z, alpha1, alpha2, nu, n);
  if (acv2n <= 0.0) return e > 0.0 ? 1.0 : 0.0;
  return std::abs(std::pow(1.0 + e / acv2n, -0.5 * p) - 1.0);
}

double rel_bound_star(int n, int m, int p, double z_lo, double z_hi,
                      double alpha1, double alpha2, double nu) {
  if (p <= 0) throw DomainError("rel_bound_star: p must be positive");
  if (z_lo > z_hi) std::swap(z_lo, z_hi);
  // For nu > 1 both E* and acv^2_n increase in z; reversed for nu < -1.
  double z_e = nu >= 0.0 ? z_hi : z_lo;
  double z_a = nu >= 0.0 ? z_lo : z_hi;
  double e = trunc_bound(n, m, z_e, alpha1, alpha2, nu);
  double acv2n = acv2_partial(z_a, alpha1, alpha2, nu, n);
  if (acv2n <= 0.0) return e > 0.0 ? 1.0 : 0.0;
  return std::abs(std::pow(1.0 + e / acv2n, -0.5 * p) - 1.0);
}

std::pair<int, double> choose_order(double z_lo, double z_hi, double alpha1,
                                    double alpha2, double nu, int m,
                                    double eps, int n_max) {
  for (int n = 0; n <= n_max; ++n) {
    double r = rel_bound_star(n, m, 1, z_lo, z_hi, alpha1, alpha2, nu);
    if (r <= eps) return {n, r};
  }
  throw ConvergenceError("choose_order: no order <= n_max meets tolerance");
}

MomentReport moments_t_nu(const PopulationParams& pp, double alpha1,
                          double alpha2, double nu, double tol) {
  if (!(pp.kappa1 > 0.0) || !(pp.kappa2 > 0.0))
    throw DomainError("moments_t_nu: kappas must be positive");
  if (!(alpha1 + alpha2 > 2.0))
    throw ConstraintError("moments_t_nu: requires alpha1 + alpha2 > 2");
  if (!(2.0 * nu < alpha1 && 2.0 * nu > -alpha2))
    throw ConstraintError(
        "moments_t_nu: second-moment strip -alpha2 < 2 nu < alpha1 violated");
  MomentReport rep;
  rep.mean = mean_t_nu(pp, nu);
  if (nu == 0.0) return rep;  // degenerate T_0 = 0
  double z = pp.zeta();
  bool certifiable =
      alpha1 > 2.0 * (1.0 + nu) && alpha2 > 2.0 * (1.0 - nu);
  constexpr int kMaxDiagonals = 2000;
  double total = 0.0;
  int n = 0, quiet = 0;
  double last_sk = 0.0;
  // Incremental diagonal accumulation (avoids re-summing prefixes).
  std::vector<double> a{1.0}, b{1.0};
  bool boundary = is_boundary_z(z);
  auto diagonal = [&](int k) {
    a.push_back(a.back() * a_ratio(k - 1, alpha1, nu));
    b.push_back(b.back() * b_ratio(k - 1, alpha2, nu));
    if (boundary) return boundary_diag(k, boundary_shift(z, nu), alpha1, alpha2);
    double sk = 0.0;
    for (int l = 0; l <= k; ++l) {
      double eh = fracsum::eh_nw(k, l, z, nu);
      sk += a[l] * b[k - l] * eh * eh;
    }
    return sk;
  };
  auto certified_bound = [&](int nn) {
    if (!certifiable) return last_sk / std::max(total, 1e-300);
    return rel_bound(nn, nn + 1, 2, z, alpha1, alpha2, nu);
  };
  double bound = 1.0;
  while (n < kMaxDiagonals) {
    ++n;
    last_sk = diagonal(n);
    total += last_sk;
    if (last_sk < 1e-2 * tol * std::max(total, 1e-300)) {
      if (++quiet >= 3) {
        bound = certified_bound(n);
        if (bound <= tol) break;
        quiet = 0;
      }
    } else {
      quiet = 0;
    }
  }
  if (bound > tol)
    throw ConvergenceError("moments_t_nu: could not certify tolerance");
  rep.terms_used = n;
  rep.rel_error_bound = bound;
  rep.second_moment = rep.mean * rep.mean * (1.0 + total);
  rep.variance = rep.mean * rep.mean * total;
  rep.cv = sign_of(nu) * std::sqrt(total);
  rep.acv = std::abs(rep.cv);
  return rep;
}

double estimator_u(double y2, double alpha2, double kappa1) {
  if (!(y2 >= 0.0) || !(alpha2 > 0.0) || !(kappa1 > 0.0))
    throw DomainError("estimator_u: invalid arguments");
  return hyp1f1(1.0, alpha2, alpha2 * y2 / kappa1) / kappa1;
}

double estimator_v(double y1, double alpha1, double kappa2) {
  if (!(y1 >= 0.0) || !(alpha1 > 0.0) || !(kappa2 > 0.0))
    throw DomainError("estimator_v: invalid arguments");
  return -hyp1f1(1.0, alpha1, alpha1 * y1 / kappa2) / kappa2;
}

}  // namespace pg::estimator
