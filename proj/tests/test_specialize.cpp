#include <doctest.h>

#include "gen.hpp"
#include "mk/integrate.hpp"
#include "mk/specialize.hpp"

using namespace mk;

namespace {

LaurentConst lc(const char* s) { return LaurentConst::parse(s); }
ValueRingElem V(const char* s) { return ValueRingElem::parse(s); }

FieldSpec qp(long p) { return {p, FieldSpec::Qp, 1, {}}; }
FieldSpec fpt(long p) { return {p, FieldSpec::Fpt, 1, {}}; }

// Symbolic and numeric ord/ac agree when no coefficient meets p and no fixed
// angular component coincides with the point's only mod p.
bool clean_point(const CEF& f, const Point& pt, long p) {
  for (auto& t : f.terms)
    for (auto& b : t.bindings) {
      LaurentConst d = pt.at(b.var) - b.center;
      if (d.is_zero()) return false;
      for (auto& [j, c] : d.coeffs()) {
        (void)j;
        if (mod_floor(c.get_num(), Int(p)) == 0 || mod_floor(c.get_den(), Int(p)) == 0) return false;
      }
      if (b.acfix && d.ac() != *b.acfix && mod_floor(Rat(d.ac() - *b.acfix).get_num(), Int(p)) == 0)
        return false;
    }
  return true;
}

}  // namespace

TEST_CASE("value examples") {
  CHECK(spec_value(V("L^-2 - L^-3"), qp(3)) == Cyclotomic(Rat(2, 27)));
  CHECK(spec_value(ValueRingElem::e(2), qp(5)) == Cyclotomic::root(5, 1, 2));
  CHECK(spec_value(ValueRingElem::E(lc("t^-1")), qp(5)) == Cyclotomic::root(5, 2, 1));
  CHECK(spec_value(ValueRingElem::E(lc("t^-1")), fpt(5)) == Cyclotomic(1));
  FieldSpec tw = fpt(5);
  tw.mult[-1] = 2;
  CHECK(spec_value(ValueRingElem::E(lc("t^-1")), tw) == Cyclotomic::root(5, 1, 2));
}

TEST_CASE("pointwise examples") {
  CHECK(spec_cef_at(cef_phi_alpha(1, 0), qp(5), {{"x", lc("5")}}) == Cyclotomic(1));
  CHECK(spec_cef_at(cef_phi_alpha(1, 0), fpt(5), {{"x", lc("t")}}) == Cyclotomic(1));
  CEF f = cef_restrict(cef_acfix("x", 0, 2), parse_condition("ord_x == 0"));
  CHECK(spec_cef_at(f, qp(5), {{"x", lc("2")}}) == Cyclotomic(1));
  CHECK(spec_cef_at(f, qp(5), {{"x", lc("7")}}) == Cyclotomic(1));
  CHECK(spec_cef_at(f, qp(5), {{"x", lc("1")}}) == Cyclotomic(0));
  CEF g = cef_mul(cef_phase("x", lc("t^-1")), cef_phi_alpha(1, 0));
  CHECK(spec_cef_at(g, qp(5), {{"x", lc("1")}}) == Cyclotomic::root(5, 2, 1));
  CHECK_THROWS_AS(spec_cef_at(cef_ball("x", lc("1"), 0), qp(5), {{"x", lc("1")}}), CenterCoincident);
}

TEST_CASE("bad primes") {
  CEF ring = cef_restrict(cef_ann("x", 0), parse_condition("ord_x == 0"));
  IntegrationResult r = integrate_all(cef_mul(cef_phase("x", lc("6")), ring));
  CHECK(cef_value(r.value) == V("-L^-1"));
  CHECK_THROWS_AS(spec_value(cef_value(r.value), qp(3), r.bad), BadPrime);
  CHECK(spec_value(cef_value(r.value), qp(5), r.bad) == Cyclotomic(Rat(-1, 5)));
  CHECK(bad_primes(cef_phi_alpha(1, 0)).empty());
  PrimeSet b = bad_primes(cef_acfix("x", 0, Rat(3, 2)));
  CHECK(b.count(2));
  CHECK(b.count(3));
  CHECK_THROWS_AS(spec_value(ValueRingElem::e(Rat(1, 5)), qp(5)), BadPrime);
}

TEST_CASE("field spec validation") {
  CHECK_THROWS_AS(FieldSpec({4, FieldSpec::Qp, 1, {}}).validate(), Error);
  CHECK_THROWS_AS(FieldSpec({5, FieldSpec::Qp, 2, {}}).validate(), Error);
  CHECK_NOTHROW(FieldSpec({5, FieldSpec::Qp, 6, {}}).validate());
  CHECK_THROWS_AS(FieldSpec({5, FieldSpec::Fpt, 1, {{0, 1}}}).validate(), Error);
}

TEST_CASE("specialization is a ring homomorphism") {
  std::mt19937 rng(12);
  auto rand_value = [&] {
    ValueRingElem v;
    int n = gen::pick(rng, 1, 3);
    for (int i = 0; i < n; ++i) {
      ValueRingElem s = ValueRingElem::Lpow(gen::pick(rng, -2, 2)) * ValueRingElem(gen::pick(rng, -3, 3));
      if (gen::pick(rng, 0, 1)) s *= ValueRingElem::E(gen::phase_coeff(rng));
      if (gen::pick(rng, 0, 2) == 0) s *= ValueRingElem::e(gen::pick(rng, 1, 4));
      v += s;
    }
    return v;
  };
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    ValueRingElem u = rand_value(), v = rand_value();
    for (long p : {2, 3, 5, 7})
      for (auto K : {qp(p), fpt(p)}) {
        CHECK(spec_value(u * v, K) == spec_value(u, K) * spec_value(v, K));
        CHECK(spec_value(u + v, K) == spec_value(u, K) + spec_value(v, K));
        ++checked;
      }
  }
  CHECK(checked == 800);
}

TEST_CASE("characters are additive") {
  std::mt19937 rng(13);
  for (int i = 0; i < 200; ++i) {
    LaurentConst a = gen::point(rng), b = gen::point(rng);
    for (long p : {3, 5, 7}) {
      FieldSpec K = qp(p);
      if (i % 2) {
        K = fpt(p);
        K.mult[-1] = gen::pick(rng, 0, 4);
        K.mult[-2] = gen::pick(rng, 0, 4);
      } else {
        K.unit = 1 + p * gen::pick(rng, 0, 3);
      }
      auto ea = spec_char(CharSymbol::of(a), K), eb = spec_char(CharSymbol::of(b), K);
      CHECK(spec_char(CharSymbol::of(a + b), K) == ea * eb);
    }
  }
}

TEST_CASE("integrals of phase-free functions ignore the twist") {
  std::mt19937 rng(14);
  for (int i = 0; i < 40; ++i) {
    CEF f = gen::cell(rng, "x");
    IntegrationResult r = integrate_all(f);
    ValueRingElem v = cef_value(r.value);
    for (long p : {5, 7}) {
      if (bad_primes(f).count(p) || r.bad.count(p)) continue;
      FieldSpec a = qp(p), b = qp(p);
      b.unit = 1 + p;
      CHECK(spec_value(v, a, r.bad) == spec_value(v, b, r.bad));
      FieldSpec c = fpt(p), d = fpt(p);
      d.mult[-1] = 3;
      CHECK(spec_value(v, c, r.bad) == spec_value(v, d, r.bad));
    }
  }
}

TEST_CASE("pointwise values commute with specialization") {
  std::mt19937 rng(15);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    CEF f = gen::sb1(rng);
    Point pt{{"x", gen::point(rng)}};
    for (long p : {5, 7, 11}) {
      if (bad_primes(f).count(p) || !clean_point(f, pt, p)) continue;
      for (auto K : {qp(p), fpt(p)}) {
        Cyclotomic sym = spec_value(cef_eval(f, pt), K);
        CHECK_MESSAGE(spec_cef_at(f, K, pt) == sym, f.str() << " at " << pt.at("x").str() << " " << K.str());
        ++checked;
      }
    }
  }
  CHECK(checked > 300);
}
