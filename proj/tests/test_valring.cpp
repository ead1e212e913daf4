#include <doctest.h>

#include <random>

#include "mk/valring.hpp"

using namespace mk;

namespace {

ValueRingElem V(const std::string& s) { return ValueRingElem::parse(s); }

// Independent check: clear denominators by hand and compare integer
// polynomials via evaluation at many integer points.
Rat naive_eval(const std::vector<long>& num, int lpow, const std::vector<int>& lk_minus_1, long q) {
  Rat v = 0, qq = 1;
  for (long c : num) {
    v += c * qq;
    qq *= q;
  }
  for (int i = 0; i < std::abs(lpow); ++i) v = lpow > 0 ? Rat(v * q) : Rat(v / q);
  for (int k : lk_minus_1) {
    Rat d = 1;
    for (int i = 0; i < k; ++i) d *= q;
    v /= (d - 1);
  }
  return v;
}

Cyclotomic no_chars(const CharSymbol&) { throw Error("unexpected symbol"); }

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  LFraction frac() {
    std::vector<Int> c(pick(1, 3));
    for (auto& x : c) x = pick(-3, 3);
    std::map<int, int> den;
    for (int i = pick(0, 2); i > 0; --i) den[pick(1, 4)] += 1;
    return LFraction(LPoly(c), pick(-2, 3), den);
  }
  CharSymbol sym() {
    LaurentConst a;
    if (pick(0, 1)) a += LaurentConst(Rat(pick(-2, 2)));
    if (pick(0, 2) == 0) a += LaurentConst::monomial(pick(-2, 2), -1);
    return CharSymbol::of(a);
  }
  ValueRingElem elem() {
    ValueRingElem v;
    for (int i = pick(0, 3); i > 0; --i) v.add_term(frac(), sym());
    return v;
  }
};

}  // namespace

TEST_CASE("normalize examples") {
  ValueRingElem v = ValueRingElem::E(LaurentConst::parse("2 + 3*t + t^-1"));
  REQUIRE(v.terms().size() == 1);
  const CharSymbol& s = v.terms().begin()->first;
  CHECK(s.tail().size() == 2);
  CHECK(s.coeff(0) == 2);
  CHECK(s.coeff(-1) == 1);
  CHECK(v.terms().begin()->second.is_one());

  RawSum raw{{LFraction(0), CharSymbol::of(LaurentConst::t(-1))}, {LFraction(3), CharSymbol()}};
  CHECK(vr_normalize(raw) == ValueRingElem(3));

  // (L-1)/(L^2-1) = 1/(L+1)
  LFraction a = LFraction(LPoly({-1, 1}), 0, {}) * LFraction::inv_Lk_minus_1(2);
  CHECK(a == LFraction(LPoly(Int(1)), 0, {{2, 1}}));
  for (long q = 2; q < 9; ++q) CHECK(a.eval(q) == naive_eval({-1, 1}, 0, {2}, q));
}

TEST_CASE("ring examples") {
  CHECK(vr_mul(ValueRingElem::e(2), ValueRingElem::E(LaurentConst::t(-1))) ==
        ValueRingElem::E(LaurentConst::parse("2 + t^-1")));
  ValueRingElem x = vr_mul(ValueRingElem::Lpow(-1), ValueRingElem(LFraction::geom(-1)));
  CHECK(x == ValueRingElem(LFraction::inv_Lk_minus_1(1)));
  CHECK(vr_add(ValueRingElem::e(1), -ValueRingElem::e(1)).is_zero());
}

TEST_CASE("equality examples") {
  // (1-L^-1)/(1-L^-3) vs L^2 (L-1)/(L^3-1)
  ValueRingElem a = (ValueRingElem(1) - ValueRingElem::Lpow(-1)) * ValueRingElem(LFraction::geom(-3));
  ValueRingElem b = V("L^2 * (L - 1) * (L^3 - 1)^-1");
  CHECK(vr_eq(a, b));
  CHECK_FALSE(vr_eq(ValueRingElem::e(1), ValueRingElem::e(2)));
  CHECK(vr_eq(ValueRingElem::Lpow(1), ValueRingElem::Lpow(1) * ValueRingElem(1)));
}

TEST_CASE("evaluation examples") {
  ValueRingElem a = (ValueRingElem(1) - ValueRingElem::Lpow(-1)) * ValueRingElem(LFraction::geom(-3));
  CHECK(vr_eval_at(a, 2, no_chars) == Cyclotomic(Rat(4, 7)));
  ValueRingElem b = ValueRingElem::Lpow(-2) * (ValueRingElem(1) - ValueRingElem::Lpow(-1));
  CHECK(vr_eval_at(b, 3, no_chars) == Cyclotomic(Rat(2, 27)));
  auto sigma = [](const CharSymbol& s) {
    return Cyclotomic::root(5, 1, s.coeff(0).get_num());
  };
  CHECK(vr_eval_at(ValueRingElem::e(2), 5, sigma) == Cyclotomic::root(5, 1, 2));
}

TEST_CASE("text and json round trip") {
  ValueRingElem a = V("(L^2 - 1)^-1 * (L - 2) * e[2]E[-1:1]");
  CHECK(ValueRingElem::parse(a.str()) == a);
  CHECK(ValueRingElem::from_json(a.to_json()) == a);
  CHECK(a.to_json()["terms"][0]["tail"]["0"] == 2);

  Gen g(7);
  for (int i = 0; i < 300; ++i) {
    ValueRingElem v = g.elem();
    CAPTURE(v.str());
    CHECK(ValueRingElem::parse(v.str()) == v);
    CHECK(ValueRingElem::from_json(v.to_json()) == v);
  }
}

TEST_CASE("character truncation") {
  Gen g(11);
  for (int i = 0; i < 200; ++i) {
    LaurentConst a = LaurentConst::monomial(g.pick(-3, 3), g.pick(-3, 0)) + LaurentConst(Rat(g.pick(-2, 2)));
    LaurentConst h = LaurentConst(Rat(g.pick(-2, 2))) + LaurentConst::monomial(g.pick(1, 3), g.pick(1, 4));
    CHECK(ValueRingElem::E(a + h) == ValueRingElem::e(h.coeff(0)) * ValueRingElem::E(a));
  }
}

TEST_CASE("normalize is idempotent") {
  Gen g(3);
  for (int i = 0; i < 10000; ++i) {
    RawSum raw;
    for (int k = g.pick(0, 4); k > 0; --k) raw.emplace_back(g.frac(), g.sym());
    ValueRingElem v = vr_normalize(raw);
    RawSum again;
    for (auto& [s, f] : v.terms()) again.emplace_back(f, s);
    REQUIRE(vr_normalize(again) == v);
  }
}

TEST_CASE("ring laws and evaluation homomorphism") {
  Gen g(5);
  // assignment: residue part at p = 5 only
  auto sigma = [](const CharSymbol& s) {
    Cyclotomic c = Cyclotomic::root(5, 1, 0);
    c = Cyclotomic::root(5, 1, rat_mod(s.coeff(0), 5));
    if (s.coeff(-1) != 0) c *= Cyclotomic::root(5, 2, rat_mod(s.coeff(-1), 25));
    return c;
  };
  for (int i = 0; i < 300; ++i) {
    ValueRingElem a = g.elem(), b = g.elem(), c = g.elem();
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a + b) + c == a + (b + c));
    CHECK(vr_eval_at(a * b, 2, sigma) == vr_eval_at(a, 2, sigma) * vr_eval_at(b, 2, sigma));
    CHECK(vr_eval_at(a + b, Rat(7, 3), sigma) == vr_eval_at(a, Rat(7, 3), sigma) + vr_eval_at(b, Rat(7, 3), sigma));
  }
}

TEST_CASE("fraction evaluation matches a naive oracle") {
  Gen g(9);
  for (int i = 0; i < 500; ++i) {
    std::vector<long> num(g.pick(1, 4));
    for (auto& c : num) c = g.pick(-4, 4);
    int lp = g.pick(-3, 3);
    std::vector<int> ks;
    for (int k = g.pick(0, 3); k > 0; --k) ks.push_back(g.pick(1, 5));
    std::vector<Int> numi(num.begin(), num.end());
    LFraction f = LFraction(LPoly(numi), -lp, {});
    for (int k : ks) f *= LFraction::inv_Lk_minus_1(k);
    for (long q : {2L, 3L, 7L}) CHECK(f.eval(q) == naive_eval(num, lp, ks, q));
  }
}

TEST_CASE("units invert") {
  LFraction f = LFraction::geom(-3) * LFraction::Lpow(4);
  LFraction inv;
  REQUIRE(f.try_inverse(inv));
  CHECK((f * inv).is_one());
  CHECK_FALSE(LFraction(LPoly({-2, 1}), 0, {}).try_inverse(inv));
}
