#pragma once

// Hand-rolled generators for random in-class functions.

#include <random>
#include <string>
#include <vector>

#include "mk/cef.hpp"
#include "mk/cyclotomic.hpp"

namespace gen {

using namespace mk;

inline int pick(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline LaurentConst center(std::mt19937& rng) {
  static const char* cs[] = {"0", "0", "1", "t", "1 + t", "-1", "2", "1 + 2*t", "t^-1"};
  return LaurentConst::parse(cs[pick(rng, 0, 8)]);
}

inline LaurentConst phase_coeff(std::mt19937& rng, int max_cond = 3) {
  int k = pick(rng, 1 - max_cond, 0);
  LaurentConst a = LaurentConst::monomial(Rat(pick(rng, 1, 2) * (pick(rng, 0, 1) ? 1 : -1)), k);
  if (pick(rng, 0, 2) == 0) a += LaurentConst::monomial(1, k + 1);
  return a;
}

/// A ball, annulus or ac-fixed annulus around a random center. A residue
/// character is only attached to bounded annuli, keeping the result Schwartz-Bruhat.
inline CEF cell(std::mt19937& rng, const std::string& x) {
  LaurentConst c = center(rng);
  int a = pick(rng, -1, 2);
  switch (pick(rng, 0, 3)) {
    case 0:
    case 1:
      return cef_ball(x, c, a);
    case 2: {
      CEF ring = cef_sub(cef_ball(x, c, a), cef_ball(x, c, a + 1));
      if (pick(rng, 0, 2) == 0) ring = cef_mul(ring, cef_echar(x, c, pick(rng, 1, 2)));
      return ring;
    }
    default: {
      CEF f = cef_acfix(x, c, pick(rng, 1, 2));
      std::vector<BasicSet> cond{BasicSet().add_eq(LinForm::var(theta_name(x)) - LinForm(a))};
      return cef_restrict(f, cond);
    }
  }
}

/// Schwartz-Bruhat function of one variable: sum of decorated cells.
inline CEF sb1(std::mt19937& rng, const std::string& x = "x", int max_terms = 2) {
  CEF f = cef_zero({x});
  int n = pick(rng, 1, max_terms);
  for (int i = 0; i < n; ++i) {
    CEF c = cell(rng, x);
    if (pick(rng, 0, 2) == 0) c = cef_mul(c, cef_phase(x, phase_coeff(rng)));
    c = cef_scale(c, ValueRingElem(pick(rng, 1, 3) * (pick(rng, 0, 1) ? 1 : -1)));
    f = cef_add(f, c);
  }
  return f;
}

/// Product of one-variable pieces in x1, x2.
inline CEF sb2(std::mt19937& rng) {
  CEF a = cef_extend(sb1(rng, "x1", 1), {"x1", "x2"}, {});
  CEF b = cef_extend(sb1(rng, "x2", 1), {"x1", "x2"}, {});
  return cef_mul(a, b);
}

inline LaurentConst point(std::mt19937& rng) {
  LaurentConst x;
  int e = pick(rng, -2, 3);
  x += LaurentConst::monomial(Rat(pick(rng, 1, 4) * (pick(rng, 0, 1) ? 1 : -1)), e);
  if (pick(rng, 0, 1)) x += LaurentConst::monomial(Rat(pick(rng, -2, 2)), e + pick(rng, 1, 3));
  if (pick(rng, 0, 2) == 0) x += LaurentConst(pick(rng, -1, 1));
  if (x.is_zero()) x = LaurentConst::t(e);
  return x;
}

}  // namespace gen

#ifndef MK_NO_DOCTEST
#include <doctest.h>

namespace doctest {
template <>
struct StringMaker<mk::ValueRingElem> {
  static String convert(const mk::ValueRingElem& v) { return v.str().c_str(); }
};
template <>
struct StringMaker<mk::Cyclotomic> {
  static String convert(const mk::Cyclotomic& v) { return v.str().c_str(); }
};
}  // namespace doctest
#endif
