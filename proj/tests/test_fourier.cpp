#include <doctest.h>

#include "gen.hpp"
#include "mk/fourier.hpp"

using namespace mk;

namespace {

LaurentConst lc(const char* s) { return LaurentConst::parse(s); }
ValueRingElem V(const char* s) { return ValueRingElem::parse(s); }

CEF phi(int a) { return cef_phi_alpha(1, LinForm(a)); }

bool equal(const CEF& f, const CEF& g) { return cef_eq_ae(f, g).kind == EqResult::Equal; }

CEF ring0() { return cef_restrict(cef_ann("x", 0), parse_condition("ord_x == 0")); }

}  // namespace

TEST_CASE("transforms of balls") {
  for (int a = -2; a <= 2; ++a) {
    CEF F = fourier(phi(a)).value;
    CHECK(equal(F, cef_scale(phi(1 - a), ValueRingElem::Lpow(-a))));
  }
  CEF shifted = fourier(cef_ball("x", lc("1"), 1)).value;
  CHECK(equal(shifted, cef_scale(cef_mul(cef_phase("x", lc("1")), phi(0)), V("L^-1"))));
  CEF F = fourier(ring0()).value;
  CEF want = cef_sub(cef_scale(phi(1), V("1 - L^-1")),
                     cef_scale(cef_restrict(cef_ann("x", 0), parse_condition("ord_x == 0")), V("L^-1")));
  CHECK(equal(F, want));
}

TEST_CASE("convolution of balls") {
  for (int a = -1; a <= 2; ++a)
    for (int b = -1; b <= 2; ++b) {
      CEF c = convolve(phi(a), phi(b)).value;
      CHECK(equal(c, cef_scale(phi(std::min(a, b)), ValueRingElem::Lpow(-std::max(a, b)))));
    }
  CEF s = convolve(cef_ball("x", lc("1"), 1), cef_ball("x", lc("t"), 2)).value;
  CHECK(equal(s, cef_scale(cef_ball("x", lc("1"), 1), V("L^-2"))));
}

TEST_CASE("inversion examples") {
  CHECK(check_inversion(phi(0)).kind == EqResult::Equal);
  CEF p2 = cef_mul(cef_extend(cef_ball("x1", {}, 0), {"x1", "x2"}, {}),
                   cef_extend(cef_ball("x2", {}, 1), {"x1", "x2"}, {}));
  CHECK(check_inversion(p2).kind == EqResult::Equal);
  CEF nonsb = cef_lpow(cef_restrict(cef_ann("x", 0), parse_condition("ord_x >= 0")),
                       LinForm::parse("-2*ord_x"));
  CHECK(check_inversion(nonsb).kind == EqResult::Equal);
}

TEST_CASE("partial inversion examples") {
  for (int a = -2; a <= 2; ++a) CHECK(check_partial_inversion(phi(0), a).kind == EqResult::Equal);
  CEF f = cef_mul(cef_phase("x", lc("t^-1")), phi(0));
  CHECK(check_partial_inversion(f, 1).kind == EqResult::Equal);
}

TEST_CASE("linearity") {
  std::mt19937 rng(3);
  for (int i = 0; i < 30; ++i) {
    CEF f = gen::sb1(rng), g = gen::sb1(rng);
    ValueRingElem c(gen::pick(rng, -2, 2));
    CEF lhs = fourier(cef_add(cef_scale(f, c), g)).value;
    CEF rhs = cef_add(cef_scale(fourier(f).value, c), fourier(g).value);
    CHECK(equal(lhs, rhs));
  }
}

TEST_CASE("inversion on random functions") {
  std::mt19937 rng(20);
  for (int i = 0; i < 25; ++i) {
    CEF f = gen::sb1(rng);
    EqResult r = check_inversion(f);
    CHECK_MESSAGE(r.kind == EqResult::Equal, f.str());
    CHECK(schwartz_level(fourier(f).value));
  }
  for (int i = 0; i < 20; ++i) {
    CEF f = gen::sb2(rng);
    CHECK_MESSAGE(check_inversion(f).kind == EqResult::Equal, f.str());
  }
}

TEST_CASE("convolution is commutative and associative") {
  std::mt19937 rng(41);
  for (int i = 0; i < 20; ++i) {
    CEF f = gen::sb1(rng, "x", 1), g = gen::sb1(rng, "x", 1), h = gen::sb1(rng, "x", 1);
    CHECK(equal(convolve(f, g).value, convolve(g, f).value));
    if (i < 8) {
      CEF a = convolve(convolve(f, g).value, h).value;
      CEF b = convolve(f, convolve(g, h).value).value;
      CHECK(equal(a, b));
    }
  }
}

TEST_CASE("convolution theorem") {
  std::mt19937 rng(50);
  for (int i = 0; i < 50; ++i) {
    CEF f = gen::sb1(rng), g = gen::sb1(rng);
    CHECK_MESSAGE(check_convolution_theorem(f, g).kind == EqResult::Equal, f.str() << " | " << g.str());
  }
}

TEST_CASE("partial inversion on random functions") {
  std::mt19937 rng(60);
  for (int i = 0; i < 10; ++i) {
    CEF f = gen::sb1(rng);
    for (int a = -2; a <= 2; ++a)
      CHECK_MESSAGE(check_partial_inversion(f, a).kind == EqResult::Equal, f.str() << " a=" << a);
  }
}

TEST_CASE("convolution with the unit ball") {
  std::mt19937 rng(70);
  for (int i = 0; i < 20; ++i) {
    CEF f = gen::sb1(rng);
    auto l = schwartz_level(f);
    REQUIRE(l);
    if (l->constant > 0) continue;
    CHECK(equal(convolve(f, phi(0)).value, f));
  }
}

TEST_CASE("inversion detects a missing reflection") {
  CEF f = cef_ball("x", lc("1"), 1);
  CEF FF = fourier(fourier(f).value).value;
  EqResult r = cef_eq_ae(FF, cef_scale(f, V("L^-1")));
  CHECK(r.kind == EqResult::NotEqual);
  CHECK(check_inversion(f).kind == EqResult::Equal);
}
