#include "photongain/fracsum.hpp"

#include <cmath>
#include <limits>

#include "photongain/specfun.hpp"

namespace pg::fracsum {

namespace {

using specfun::falling_factorial;
using specfun::hyp2f1;
using specfun::hyp2f1_reg;
using specfun::pochhammer;
using specfun::stirling1;
using specfun::stirling2;

constexpr int kMaxTerms = 100000;
constexpr double kRelStop = 1e-16;

bool near_integer(double x) {
  return std::abs(x - std::round(x)) < 1e-9;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= static_cast<double>(n - j) / (j + 1.0);
  return r;
}

double signed_s1(int n, int k) {
  double v = stirling1(n, k);
  return ((n - k) % 2 == 0) ? v : -v;
}

void check_nw(int n, int omega) {
  if (n < 0 || omega < 0 || omega > n)
    throw DomainError("fracsum: (n, omega) must satisfy 0 <= omega <= n");
  if (n > 24) throw RangeError("fracsum: order exceeds exact table range");
}

// Direct 3F2 series; converges for |z| < 1 (or truncating top parameter).
double hyp3f2(double a1, double a2, double a3, double b1, double b2,
              double z) {
  long long trunc = -1;
  for (double a : {a1, a2, a3}) {
    if (a <= 0.5 && near_integer(a)) {
      long long t = static_cast<long long>(std::llround(-a));
      if (trunc < 0 || t < trunc) trunc = t;
    }
  }
  if (trunc < 0 && std::abs(z) >= 1.0)
    throw DomainError("inc_hyp_sinemod: 3F2 series needs |z| < 1");
  double sum = 1.0, term = 1.0, comp = 0.0;
  int quiet = 0;
  for (long long k = 0;; ++k) {
    if (trunc >= 0 && k >= trunc) break;
    if (k >= kMaxTerms) throw ConvergenceError("inc_hyp_sinemod: series cap");
    double kk = static_cast<double>(k);
    term *= (a1 + kk) * (a2 + kk) * (a3 + kk) /
            ((b1 + kk) * (b2 + kk) * (1.0 + kk)) * z;
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (trunc < 0) {
      if (std::abs(term) < kRelStop * std::abs(sum)) {
        if (++quiet >= 3) break;
      } else {
        quiet = 0;
      }
    }
  }
  return sum;
}

}  // namespace

double inc_geom(double z, double nu) {
  if (z < 0.0) throw DomainError("inc_geom: z must be nonnegative");
  if (nu == 0.0) return 0.0;
  if (z == 1.0) return nu;
  if (z == 0.0) {
    if (nu > 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  // (1 - z^nu)/(1 - z) stably via expm1 near z = 1.
  return -std::expm1(nu * std::log(z)) / (1.0 - z);
}

double inc_lerch(double z, int order_n, double omega, double nu) {
  if (z <= 0.0) throw DomainError("inc_lerch: z must be positive");
  if (order_n < 0 || order_n > 24)
    throw RangeError("inc_lerch: order outside 0..24");
  if (omega < 0.0) throw DomainError("inc_lerch: omega must be nonnegative");
  if (omega != 0.0) {
    // (omega + k)^n binomial expansion onto offset-0 sums.
    double acc = 0.0;
    for (int j = 0; j <= order_n; ++j)
      acc += binom(order_n, j) * std::pow(omega, order_n - j) *
             inc_lerch(z, j, 0.0, nu);
    return acc;
  }
  // Stirling-weighted 2F1 sum, stable at z = 1:
  // Phi(z,-n,0)_nu = (1/z) sum_k S2(n,k) (nu)^(k+1 falling)/(k+1)
  //                  * F(1+k, 1+nu; 2+k; 1 - 1/z).
  double w = 1.0 - 1.0 / z;
  double acc = 0.0;
  for (int k = 0; k <= order_n; ++k) {
    double s2 = stirling2(order_n, k);
    if (s2 == 0.0) continue;
    acc += s2 * falling_factorial(nu, k + 1.0) / (k + 1.0) *
           hyp2f1(1.0 + k, 1.0 + nu, 2.0 + k, w);
  }
  return acc / z;
}

double inc_hyp_sinemod(double alpha, double beta, double gamma, double z,
                       double nu) {
  if (gamma <= 0.5 && near_integer(-gamma) && -gamma >= -0.5)
    throw PoleError("inc_hyp_sinemod: -gamma must not be a nonnegative integer");
  if (nu == 0.0) return 0.0;
  if (nu > 0.0 && near_integer(nu)) {
    // Integer upper limit: the partial sum itself, exact for any z.
    long long m = static_cast<long long>(std::llround(nu));
    double sum = 0.0, term = 1.0;
    for (long long k = 0; k < m; ++k) {
      sum += term;
      double kk = static_cast<double>(k);
      term *= (alpha + kk) * (beta + kk) / ((gamma + kk) * (1.0 + kk)) * z;
    }
    return sum;
  }
  if (z > 0.0)
    throw DomainError(
        "inc_hyp_sinemod: non-integer nu requires z <= 0 (real (-z)^nu)");
  if (std::abs(alpha - 1.0) < 1e-12) {
    // Two-term 2F1 form of the alpha = 1 corollary.
    double head = hyp2f1(1.0, beta, gamma, z);
    double coef = std::pow(-z, nu) /
                  (pochhammer(1.0 - beta, -nu) * pochhammer(gamma, nu));
    return head - coef * hyp2f1(1.0, beta + nu, gamma + nu, z);
  }
  double head = hyp2f1(alpha, beta, gamma, z);
  double coef = pochhammer(alpha, nu) * std::pow(-z, nu) /
                (std::tgamma(1.0 + nu) * pochhammer(1.0 - beta, -nu) *
                 pochhammer(gamma, nu));
  double tail =
      hyp3f2(1.0, alpha + nu, beta + nu, 1.0 + nu, gamma + nu, z);
  return head - coef * tail;
}

double g_nw(int n, int omega, double z, double nu) {
  check_nw(n, omega);
  if (z < 0.0) throw DomainError("g_nw: z must be nonnegative");
  if (z == 0.0) {
    if (nu < 0.0) throw DomainError("g_nw: infinite at z = 0 for nu < 0");
    if (nu == 0.0) return 0.0;
    return (omega == n) ? std::tgamma(n + 1.0) : 0.0;
  }
  return std::tgamma(n + 1.0) * falling_factorial(omega + nu, n + 1.0) *
         std::pow(z, nu) * hyp2f1_reg(1.0, omega + nu + 1.0, n + 2.0, 1.0 - z);
}

double g_nw_stirling(int n, int omega, double z, double nu) {
  check_nw(n, omega);
  // (Lambda_omega)^(n falling) expanded by signed Stirling numbers of the
  // first kind and the binomial theorem onto incomplete Lerch values.
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    double s1 = signed_s1(n, k);
    if (s1 == 0.0) continue;
    double inner = 0.0;
    for (int j = 0; j <= k; ++j)
      inner += binom(k, j) * std::pow(static_cast<double>(omega), k - j) *
               inc_lerch(z, j, 0.0, nu);
    acc += s1 * inner;
  }
  return acc;
}

double eh_nw(int n, int omega, double z, double nu) {
  // No table is involved, so n is not capped at 24; the moment series of
  // the estimator needs arbitrary diagonal depth here.  The n! cancels
  // against 1/Gamma(n+2) of the regularized numerator, leaving 1/(n+1).
  if (n < 0 || omega < 0 || omega > n)
    throw DomainError("eh_nw: (n, omega) must satisfy 0 <= omega <= n");
  if (z < 0.0) throw DomainError("eh_nw: z must be nonnegative");
  return hyp2f1(1.0, omega + nu + 1.0, n + 2.0, 1.0 - z) /
         ((n + 1.0) * hyp2f1(1.0, nu + 1.0, 2.0, 1.0 - z));
}

double c_nw(int n, int omega, double nu) {
  check_nw(n, omega);
  if (std::abs(nu) < 1e-8) {
    // Closed nu -> 0 limit from the zeros-lemma proof.
    double v = std::tgamma(omega + 1.0) * std::tgamma(n - omega + 1.0);
    return ((n - omega) % 2 == 0) ? v : -v;
  }
  return falling_factorial(omega + nu, n + 1.0) / nu;
}

GtildeResult gtilde_nw_full(int n, int omega, double z, double nu) {
  check_nw(n, omega);
  if (z < 0.0) throw DomainError("gtilde_nw: z must be nonnegative");
  if (z == 0.0) {
    double w = omega + (nu < 0.0 ? nu : 0.0);
    return {falling_factorial(w, static_cast<double>(n)),
            GtildeForm::boundary};
  }
  if (z > 1e8) {
    double w = omega + (nu > 0.0 ? nu : 0.0) - 1.0;
    return {falling_factorial(w, static_cast<double>(n)),
            GtildeForm::boundary};
  }
  bool near_one = std::abs(1.0 - z) < 1e-3;
  if (near_one || z > 1.0 || std::abs(nu) < 1e-8) {
    return {c_nw(n, omega, nu) * eh_nw(n, omega, z, nu),
            GtildeForm::hyp_ratio};
  }
  // Finite-sum form (iii) for z in (0,1) away from 1:
  // n! [z^(n-w) - z^nu sum_k (w+nu-n)_k (1-z)^k / k!] / ((1-z)^n (1-z^nu)).
  double sum = 0.0, term = 1.0;
  for (int k = 0; k <= n; ++k) {
    sum += term;
    term *= (omega + nu - n + static_cast<double>(k)) * (1.0 - z) /
            (static_cast<double>(k) + 1.0);
  }
  double num = std::pow(z, static_cast<double>(n - omega)) -
               std::pow(z, nu) * sum;
  double den = std::pow(1.0 - z, static_cast<double>(n)) *
               (-std::expm1(nu * std::log(z)));
  return {std::tgamma(n + 1.0) * num / den, GtildeForm::finite_sum};
}

double gtilde_nw(int n, int omega, double z, double nu) {
  return gtilde_nw_full(n, omega, z, nu).value;
}

bool gtilde_zeros_predicate(int n, int omega, double z, double nu) {
  check_nw(n, omega);
  // The zeros lemma writes the first condition as n-omega-nu in N0, via
  // (omega+nu)^(n+1) = Gamma(omega+nu+1)/Gamma(omega+nu-n) = 0.  The
  // product form shows the factorial power only vanishes for
  // n-omega-nu in {0,...,n}; beyond n both gammas are poles with a
  // finite nonzero limit, so the bounded condition is used here.
  double d = static_cast<double>(n - omega) - nu;
  bool cond1 = std::abs(nu) > 1e-12 && near_integer(d) &&
               std::llround(d) >= 0 && std::llround(d) <= n;
  bool cond2 = n >= 1 && n > omega && nu >= 0.0 && z == 0.0;
  return cond1 || cond2;
}

}  // namespace pg::fracsum
