#include <doctest.h>

#include "gen.hpp"
#include "mk/integrate.hpp"

using namespace mk;

namespace {

// Bilinear phases with a monomial coefficient.
LaurentConst mono(std::mt19937& rng) {
  return LaurentConst::monomial(gen::pick(rng, 1, 2) * (gen::pick(rng, 0, 1) ? 1 : -1), gen::pick(rng, -1, 1));
}

LaurentConst lc(const char* s) { return LaurentConst::parse(s); }
ValueRingElem V(const char* s) { return ValueRingElem::parse(s); }
std::vector<BasicSet> cond(const char* s) { return parse_condition(s); }

CEF phi(int a) { return cef_phi_alpha(1, LinForm(a)); }

CEF on_annulus(const char* c) { return cef_restrict(cef_ann("x", 0), cond(c)); }

}  // namespace

TEST_CASE("volumes of balls") {
  CHECK(integral_value(phi(0)) == V("1"));
  for (int a = -3; a <= 3; ++a) CHECK(integral_value(phi(a)) == ValueRingElem::Lpow(-a));
  CHECK(integral_value(cef_ball("x", lc("1 + t"), 2)) == V("L^-2"));
  CHECK(integral_value(cef_sub(phi(0), phi(1))) == V("1 - L^-1"));
}

TEST_CASE("parametric ball") {
  CEF f = cef_phi_alpha(std::vector<std::string>{"x"}, LinForm::var("a"));
  f.params = {"a"};
  CEF r = integrate_all(f).value;
  for (int a = -2; a <= 4; ++a) CHECK(cef_eval(r, {}, {{"a", a}}) == ValueRingElem::Lpow(-a));
}

TEST_CASE("geometric weights") {
  CEF f = cef_lpow(on_annulus("ord_x >= 0"), LinForm::parse("-2*ord_x"));
  ValueRingElem v = integral_value(f);
  CHECK(v * V("1 - L^-3") == V("1 - L^-1"));
  CEF g = cef_lpow(on_annulus("ord_x >= 0"), LinForm::parse("ord_x"));
  CHECK_THROWS_AS(integral_value(g), NotIntegrable);
  CHECK_THROWS_AS(integral_value(cef_ann("x", 0)), NotIntegrable);
}

TEST_CASE("additive character on annuli") {
  auto ring = [](int th) {
    return cef_mul(cef_phase("x", lc("1")), on_annulus(("ord_x == " + std::to_string(th)).c_str()));
  };
  CHECK(integral_value(ring(-1)).is_zero());
  CHECK(integral_value(ring(-2)).is_zero());
  CHECK(integral_value(ring(0)) == V("-L^-1"));
  CHECK(integral_value(cef_mul(cef_phase("x", lc("t^-1")), on_annulus("ord_x == 0"))).is_zero());
  for (int th = 1; th <= 3; ++th)
    CHECK(integral_value(ring(th)) == ValueRingElem::Lpow(-th) * V("1 - L^-1"));
  CEF fixed = cef_mul(cef_phase("x", lc("1")),
                      cef_restrict(cef_acfix("x", 0, 2), cond("ord_x == 0")));
  CHECK(integral_value(fixed) == V("L^-1") * ValueRingElem::e(2));
  CHECK(integral_value(cef_mul(cef_phase("x", lc("t^-1")), phi(-1))).is_zero());
}

TEST_CASE("partial integral of a bilinear phase") {
  CEF f = cef_mul(cef_extend(cef_bilinear("x", "y", lc("1")), {"x", "y"}, {}),
                  cef_extend(cef_ball("x", {}, 1), {"x", "y"}, {}));
  CEF r = integrate_var(f, "x").value;
  CEF want = cef_scale(cef_ball("y", {}, 0), V("L^-1"));
  CHECK(cef_eq_ae(r, want).kind == EqResult::Equal);
}

TEST_CASE("bad primes of a phase") {
  CEF f = cef_mul(cef_phase("x", lc("6*t^-1")), phi(0));
  IntegrationResult r = integrate_all(f);
  CHECK(r.bad.count(2));
  CHECK(r.bad.count(3));
}

TEST_CASE("integrals agree with pointwise sums on residues") {
  // On ord(x) = 0 the integral of E(a x) is a residue character sum over F_q^*.
  for (int a = 1; a <= 2; ++a) {
    CEF f = cef_mul(cef_phase("x", LaurentConst::monomial(a, 0)), on_annulus("ord_x == 0"));
    CHECK(integral_value(f) == V("-L^-1"));
  }
}

TEST_CASE("fubini in two variables") {
  std::mt19937 rng(1234);
  int n = 0;
  for (int i = 0; i < 120; ++i) {
    CEF f = gen::sb2(rng);
    if (gen::pick(rng, 0, 1)) {
      CEF b = cef_extend(cef_bilinear("x1", "x2", mono(rng)), {"x1", "x2"}, {});
      f = cef_mul(f, b);
    }
    IntegrationResult a = integrate_in_order(f, {"x1", "x2"});
    IntegrationResult b = integrate_in_order(f, {"x2", "x1"});
    CHECK_MESSAGE(cef_value(a.value) == cef_value(b.value), f.str());
    ++n;
  }
  CHECK(n >= 100);
}

TEST_CASE("fubini in three variables") {
  std::mt19937 rng(777);
  std::vector<std::string> vs{"x1", "x2", "x3"};
  for (int i = 0; i < 100; ++i) {
    CEF f = cef_const(ValueRingElem(1), vs);
    for (auto& v : vs) f = cef_mul(f, cef_extend(gen::sb1(rng, v, 1), vs, {}));
    if (gen::pick(rng, 0, 1)) f = cef_mul(f, cef_extend(cef_bilinear("x1", "x3", mono(rng)), vs, {}));
    auto a = cef_value(integrate_in_order(f, {"x1", "x2", "x3"}).value);
    auto b = cef_value(integrate_in_order(f, {"x3", "x1", "x2"}).value);
    auto c = cef_value(integrate_in_order(f, {"x2", "x3", "x1"}).value);
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("additivity") {
  std::mt19937 rng(55);
  for (int i = 0; i < 150; ++i) {
    CEF f = gen::sb1(rng), g = gen::sb1(rng);
    CHECK(integral_value(cef_add(f, g)) == integral_value(f) + integral_value(g));
    ValueRingElem k(gen::pick(rng, -3, 3));
    CHECK(integral_value(cef_scale(f, k)) == k * integral_value(f));
  }
}

TEST_CASE("projection formula") {
  std::mt19937 rng(66);
  for (int i = 0; i < 80; ++i) {
    CEF f = gen::sb1(rng, "x1"), g = gen::sb1(rng, "x2");
    CEF prod = cef_mul(cef_extend(f, {"x1", "x2"}, {}), cef_extend(g, {"x1", "x2"}, {}));
    CEF partial = integrate_var(prod, "x1").value;
    CEF want = cef_scale(g, integral_value(f));
    CHECK(cef_eq_ae(partial, want).kind == EqResult::Equal);
  }
}

TEST_CASE("translation and reflection invariance") {
  std::mt19937 rng(88);
  for (int i = 0; i < 100; ++i) {
    CEF f = gen::sb1(rng);
    ValueRingElem v = integral_value(f);
    CHECK(integral_value(cef_affine(f, "x", -1, {})) == v);
    CHECK(integral_value(cef_affine(f, "x", 1, gen::center(rng))) == v);
  }
}

TEST_CASE("bad primes only grow") {
  std::mt19937 rng(99);
  for (int i = 0; i < 60; ++i) {
    CEF f = gen::sb2(rng);
    f.bad.insert(Int(7));
    PrimeSet out = integrate_all(f).bad;
    for (auto& p : f.bad) CHECK(out.count(p));
  }
}
