#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "photongain/fracsum.hpp"

using namespace pg;
using namespace pg::fracsum;

static void close(double got, double want, double rel = 1e-12) {
  CHECK(std::abs(got - want) <= rel * std::max(1.0, std::abs(want)));
}

TEST_CASE("incomplete geometric series") {
  CHECK(inc_geom(0.7, 0.0) == 0.0);
  close(inc_geom(0.5, 3.0), 1.75);
  close(inc_geom(1.0, 2.7), 2.7);
  close(inc_geom(1.0 - 1e-14, 2.0), 2.0, 1e-10);  // stability at z ~ 1
  CHECK(inc_geom(0.0, 1.5) == 1.0);
  CHECK_THROWS_AS(inc_geom(-0.5, 1.0), DomainError);
}

TEST_CASE("incomplete Lerch transcendent") {
  // Order 0 coincides with the incomplete geometric series.
  for (double z : {0.3, 0.9, 1.0, 1.7})
    for (double nu : {-1.2, 0.5, 2.0, 3.7})
      close(inc_lerch(z, 0, 0.0, nu), inc_geom(z, nu), 1e-11);
  // Integer nu = 3: direct finite sum 0*z^0 + 1*z + 2*z^2.
  close(inc_lerch(0.5, 1, 0.0, 3.0), 1.0);
  // Frozen tail-difference oracle values (multiprecision).
  close(inc_lerch(0.5, 1, 0.0, 1.5), 0.23223304703363119, 1e-11);
  close(inc_lerch(0.5, 2, 0.7, 2.2), 2.28891240283685178, 1e-11);
  close(inc_lerch(0.9, 3, 1.0, -0.8), 0.0076474213227762658, 1e-9);
  CHECK_THROWS_AS(inc_lerch(-0.1, 1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(inc_lerch(0.5, 25, 0.0, 1.0), RangeError);
}

TEST_CASE("sine-modulated incomplete hypergeometric") {
  CHECK(inc_hyp_sinemod(1.0, -18.0, 15.0, -0.3, 0.0) == 0.0);
  // nu = 1 is the leading term of the series, = 1.
  close(inc_hyp_sinemod(1.0, -18.0, 15.0, -0.3, 1.0), 1.0);
  // Integer nu = 4 equals the explicit 4-term partial sum at
  // (1, 2-alpha1; alpha2; -0.3) with alpha1=20, alpha2=15.
  double beta = 2.0 - 20.0, gamma = 15.0, z = -0.3;
  double direct = 0.0, term = 1.0;
  for (int k = 0; k < 4; ++k) {
    direct += term;
    term *= (1.0 + k) * (beta + k) / ((gamma + k) * (1.0 + k)) * z;
  }
  close(inc_hyp_sinemod(1.0, beta, gamma, z, 4.0), direct);
  // Non-integer nu, frozen from the corollary form in multiprecision.
  close(inc_hyp_sinemod(1.0, beta, gamma, z, 1.7), 1.28974060783756695, 1e-11);
  // The general-alpha 3F2 path agrees with the alpha=1 corollary path.
  double general = [&] {
    // force the general branch with alpha = 1 + 1e-9? instead compare at
    // alpha exactly 1 via a slightly perturbed alpha
    return inc_hyp_sinemod(1.0 + 1e-9, beta, gamma, z, 1.7);
  }();
  close(general, 1.28974060783756695, 1e-6);
  CHECK_THROWS_AS(inc_hyp_sinemod(1.0, 2.0, -3.0, -0.3, 1.5), PoleError);
  CHECK_THROWS_AS(inc_hyp_sinemod(1.0, 2.0, 3.0, 0.3, 1.5), DomainError);
}

TEST_CASE("g family point values") {
  close(g_nw(0, 0, 0.5, 3.0), inc_geom(0.5, 3.0));
  close(g_nw(2, 1, 0.5, 2.5), 1.72442731696939072, 1e-11);
  // Dual-form self-check: Stirling expansion vs hypergeometric form.
  close(g_nw_stirling(2, 1, 0.5, 2.5), g_nw(2, 1, 0.5, 2.5), 1e-10);
  close(g_nw_stirling(3, 2, 0.8, 1.7), g_nw(3, 2, 0.8, 1.7), 1e-10);
  close(g_nw_stirling(4, 0, 1.2, -0.9), g_nw(4, 0, 1.2, -0.9), 1e-10);
  // z=1 reduction: n!(w+nu)^(n+1 falling)/Gamma(n+2).
  double n = 2, w = 1, nu = 2.5;
  double ff = (w + nu) * (w + nu - 1.0) * (w + nu - 2.0);
  close(g_nw(2, 1, 1.0, 2.5), 2.0 * ff / 6.0, 1e-11);
  CHECK_THROWS_AS(g_nw(2, 3, 0.5, 1.0), DomainError);
}

TEST_CASE("gtilde point values and forms") {
  close(gtilde_nw(0, 0, 0.7, 1.3), 1.0);
  close(gtilde_nw(2, 1, 0.5, 2.5), 1.04736303449934749, 1e-11);
  close(gtilde_nw(3, 2, 0.7, -1.3), 0.14195391737960065, 1e-10);
  close(gtilde_nw(2, 0, 1.3, 1.7), -0.08273993825608350, 1e-11);
  // Boundary values.
  close(gtilde_nw(2, 1, 0.0, 3.0), 0.0);           // (1)^(2 falling) = 0
  close(gtilde_nw(2, 1, 1e9, 3.0), 6.0);           // (3)^(2 falling) = 6
  close(gtilde_nw(2, 1, 0.0, -3.0), (-2.0) * (-3.0));  // (w+nu)^(2) = (-2)(-3)
  CHECK(gtilde_nw_full(2, 1, 0.0, 3.0).form == GtildeForm::boundary);
  CHECK(gtilde_nw_full(2, 1, 0.5, 2.5).form == GtildeForm::finite_sum);
  CHECK(gtilde_nw_full(2, 1, 1.0002, 2.5).form == GtildeForm::hyp_ratio);
  // Form consistency across the switch: both forms agree near z = 1.
  close(gtilde_nw(2, 1, 0.9989, 2.5), gtilde_nw(2, 1, 0.9991, 2.5), 1e-3);
  // nu -> 0 limit well-defined through C_{n,w}.
  double lim = gtilde_nw(3, 1, 0.6, 1e-12);
  double nearby = gtilde_nw(3, 1, 0.6, 1e-6);
  close(lim, nearby, 1e-4);
  // gtilde = C * Eh decomposition.
  close(c_nw(2, 1, 2.5) * eh_nw(2, 1, 0.5, 2.5), gtilde_nw(2, 1, 0.5, 2.5),
        1e-11);
}

TEST_CASE("recurrence g_{n+1,w+1} = g_{n+1,w} + (n+1) g_{n,w}") {
  for (int n = 0; n <= 4; ++n)
    for (int w = 0; w <= n; ++w)
      for (double z : {0.2, 0.7, 1.3})
        for (double nu : {-2.5, 1.5, 3.0}) {
          double lhs = g_nw(n + 1, w + 1, z, nu);
          double rhs = g_nw(n + 1, w, z, nu) + (n + 1.0) * g_nw(n, w, z, nu);
          CHECK(std::abs(lhs - rhs) <=
                1e-10 * std::max(1.0, std::abs(rhs)));
          double lt = gtilde_nw(n + 1, w + 1, z, nu);
          double rt = gtilde_nw(n + 1, w, z, nu) +
                      (n + 1.0) * gtilde_nw(n, w, z, nu);
          CHECK(std::abs(lt - rt) <= 1e-10 * std::max(1.0, std::abs(rt)));
        }
}

TEST_CASE("gtilde reflection formula") {
  for (int n = 0; n <= 4; ++n)
    for (int w = 0; w <= n; ++w)
      for (double z : {0.2, 0.7, 1.3})
        for (double nu : {-2.5, 1.5, 3.0}) {
          double lhs = gtilde_nw(n, w, z, nu);
          double sign = (n % 2 == 0) ? 1.0 : -1.0;
          double rhs = sign * gtilde_nw(n, n - w, 1.0 / z, -nu);
          CHECK(std::abs(lhs - rhs) <=
                1e-10 * std::max(1.0, std::abs(rhs)));
        }
}

TEST_CASE("gtilde monotone magnitude in z for nu = 2.5") {
  for (int n = 0; n <= 3; ++n)
    for (int w = 0; w <= n; ++w) {
      double prev = -1.0;
      for (int i = 0; i < 50; ++i) {
        double z = 0.02 + i * (3.0 / 49.0);
        double v = std::abs(gtilde_nw(n, w, z, 2.5));
        CHECK(v >= prev - 1e-9 * std::max(1.0, v));
        prev = v;
      }
    }
}

TEST_CASE("gtilde zero set matches predicate") {
  for (int n = 0; n <= 4; ++n)
    for (int w = 0; w <= n; ++w)
      for (double z : {0.0, 0.4, 1.5})
        for (double nu : {-2.0, -1.0, 1.0, 2.0, 3.0}) {
          bool pred = gtilde_zeros_predicate(n, w, z, nu);
          double v = gtilde_nw(n, w, z, nu);
          if (pred)
            CHECK(std::abs(v) < 1e-9);
          else
            CHECK(std::abs(v) > 1e-9);
        }
  CHECK(gtilde_zeros_predicate(3, 1, 0.4, 2.0));
  CHECK_FALSE(gtilde_zeros_predicate(2, 2, 0.4, 1.5));
  CHECK(gtilde_zeros_predicate(1, 0, 0.0, 0.5));
}
