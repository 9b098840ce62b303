#ifndef PHOTONGAIN_RATPOLY_HPP
#define PHOTONGAIN_RATPOLY_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <vector>

namespace pg {

// Exact rational scalars and dense polynomials over them.  Used for the
// Norlund/Bernoulli coefficient tables and for expanding the asymptotic
// polynomials P_2k(x) symbolically before any floating point enters.

using Rat = boost::rational<boost::multiprecision::cpp_int>;

// Coefficients in ascending powers; empty vector means the zero polynomial.
using RatPoly = std::vector<Rat>;

inline RatPoly rp_const(const Rat& c) {
  if (c == Rat(0)) return {};
  return {c};
}

inline RatPoly rp_add(const RatPoly& a, const RatPoly& b) {
  RatPoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  while (!r.empty() && r.back() == Rat(0)) r.pop_back();
  return r;
}

inline RatPoly rp_scale(const RatPoly& a, const Rat& c) {
  if (c == Rat(0)) return {};
  RatPoly r = a;
  for (auto& x : r) x *= c;
  return r;
}

inline RatPoly rp_mul(const RatPoly& a, const RatPoly& b) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  while (!r.empty() && r.back() == Rat(0)) r.pop_back();
  return r;
}

inline Rat rp_coeff(const RatPoly& a, size_t k) {
  return k < a.size() ? a[k] : Rat(0);
}

// Evaluate a polynomial whose coefficients are rationals at a rational
// argument (Horner).
inline Rat rp_eval(const RatPoly& a, const Rat& x) {
  Rat acc(0);
  for (size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
  return acc;
}

// Substitute another polynomial for the variable: a(b(x)).
inline RatPoly rp_compose(const RatPoly& a, const RatPoly& b) {
  RatPoly acc;
  for (size_t i = a.size(); i-- > 0;) acc = rp_add(rp_mul(acc, b), rp_const(a[i]));
  return acc;
}

inline double rat_to_double(const Rat& r) {
  return static_cast<double>(
      boost::multiprecision::cpp_rational(r.numerator(), r.denominator()));
}

}  // namespace pg

#endif  // PHOTONGAIN_RATPOLY_HPP
