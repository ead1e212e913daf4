// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#define MK_NO_DOCTEST
#include "gen.hpp"
#include "mk/dsl.hpp"
#include "mk/fourier.hpp"
#include "mk/oracle.hpp"

using namespace mk;

namespace {

struct Failure {
  std::string what;
};

void need(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

bool equal(const CEF& f, const CEF& g) { return cef_eq_ae(f, g).kind == EqResult::Equal; }

CEF phi(int a) { return cef_phi_alpha(1, LinForm(a)); }

ValueRingElem V(const char* s) { return ValueRingElem::parse(s); }

Rat pow2(long e) {
  Rat r = 1;
  for (long i = 0; i < std::abs(e); ++i) r *= 2;
  return e >= 0 ? r : Rat(1 / r);
}

Rat at2(const ValueRingElem& v) {
  return vr_eval_at(v, 2, [](const CharSymbol&) -> Cyclotomic { throw Error("unexpected symbol"); }).rational();
}

std::vector<FieldSpec> fields(long p) {
  FieldSpec a{p, FieldSpec::Qp, 1, {}}, b{p, FieldSpec::Fpt, 1, {}};
  FieldSpec c = a, d = b;
  c.unit = 1 + p;
  d.mult[-1] = 2;
  return {a, c, b, d};
}

bool clean(const PrimeSet& bad, long p) { return !bad.count(Int(p)); }

OracleOptions fit(const CEF& f) {
  OracleOptions o;
  auto lv = schwartz_level(f);
  o.B = lv ? std::max(0, -lv->support) : 3;
  o.N = o.B + (lv ? std::max(lv->constant, 0) : 5);
  return o;
}

// 1. F(F f) = L^-d reflect(f)
std::string inversion() {
  std::mt19937 rng(101);
  int n = 0;
  for (int i = 0; i < 30; ++i, ++n) {
    CEF f = i % 3 == 2 ? gen::sb2(rng) : gen::sb1(rng);
    need(check_inversion(f).kind == EqResult::Equal, "inversion fails on " + f.str());
  }
  return std::to_string(n) + " functions, d in {1,2}";
}

// 2. F(f * g) = F f F g
std::string convolution_theorem() {
  std::mt19937 rng(102);
  int n = 0;
  for (int i = 0; i < 50; ++i, ++n) {
    CEF f = gen::sb1(rng), g = gen::sb1(rng);
    need(check_convolution_theorem(f, g).kind == EqResult::Equal, f.str() + " | " + g.str());
  }
  return std::to_string(n) + " pairs";
}

// 3. F(phi_a F f) = L^(-a d) reflect(f) * phi_(1-a)
std::string partial_inversion() {
  int n = 0;
  for (int a = -2; a <= 2; ++a) {
    need(check_partial_inversion(phi(0), a).kind == EqResult::Equal, "phi_0, alpha " + std::to_string(a));
    int m = std::max(a, 1);
    CEF lhs = fourier(cef_mul(phi(a), fourier(phi(0)).value)).value;
    need(equal(lhs, cef_scale(phi(1 - m), ValueRingElem::Lpow(-m))), "closed form at alpha " + std::to_string(a));
    ++n;
  }
  std::mt19937 rng(103);
  for (int i = 0; i < 8; ++i) {
    CEF f = gen::sb1(rng);
    for (int a = -2; a <= 2; ++a, ++n)
      need(check_partial_inversion(f, a).kind == EqResult::Equal, f.str() + " alpha " + std::to_string(a));
  }
  // identities written in the corpus
  dsl::Script s = dsl::parse_script(
      "f = ball(x; 0; 0)\n"
      "g = E(t^-1 * x) * ball(x; 0; 0)\n"
      "s = ball(x; 1 + t; 1) + 2 * ann(x; 0) * indicator(ord(x) == 0)\n"
      "check partial f -2\ncheck partial g 1\ncheck partial s -1\ncheck partial s 2\n");
  dsl::Evaluator ev({});
  bool ok = true;
  auto r = dsl::run(s, ev, dsl::Mode::ChecksOnly, ok);
  need(ok, "script checks: " + r.dump());
  n += static_cast<int>(r.size());
  return std::to_string(n) + " instances, alpha in -2..2, phi_0 closed forms";
}

// 4. additivity, projection formula, vanishing, Fubini
std::string axioms() {
  std::mt19937 rng(104);
  int a2 = 0, a3 = 0, a5 = 0, fub = 0;
  for (int i = 0; i < 60; ++i, ++a2) {
    CEF f = gen::sb1(rng), g = gen::sb1(rng);
    need(integral_value(cef_add(f, g)) == integral_value(f) + integral_value(g), "additivity");
  }
  const std::vector<std::string> xy{"x1", "x2"};
  for (int i = 0; i < 60; ++i, ++a3) {
    CEF beta = gen::sb2(rng);
    if (i % 2) beta = cef_mul(beta, cef_extend(cef_bilinear("x1", "x2", LaurentConst::t(gen::pick(rng, -1, 0))), xy, {}));
    CEF alpha = gen::sb1(rng, "x2");
    CEF lhs = integrate_var(cef_mul(cef_extend(alpha, xy, {}), beta), "x1").value;
    CEF rhs = cef_mul(alpha, integrate_var(beta, "x1").value);
    need(equal(lhs, rhs), "projection formula on " + beta.str());
  }
  for (int i = 0; i < 60; ++i, ++a5) {
    // E(a z) on annuli where ord(a) + ord(z) <= -1 throughout
    int lo = gen::pick(rng, -2, 2), hi = lo + gen::pick(rng, 0, 3);
    LaurentConst c = gen::center(rng);
    CEF ring = cef_restrict(i % 2 ? cef_acfix("x", c, gen::pick(rng, 1, 2)) : cef_ann("x", c),
                            parse_condition("ord_x >= " + std::to_string(lo) + " && ord_x <= " + std::to_string(hi)));
    LaurentConst a = LaurentConst::monomial(gen::pick(rng, 1, 2), -1 - hi - gen::pick(rng, 0, 1));
    CEF f = cef_mul(ring, cef_phase("x", a));
    need(integral_value(f).is_zero(), "vanishing on " + f.str());
  }
  for (int i = 0; i < 60; ++i, ++fub) {
    CEF f = gen::sb2(rng);
    if (i % 2) f = cef_mul(f, cef_extend(cef_bilinear("x1", "x2", LaurentConst::t(gen::pick(rng, -1, 1))), xy, {}));
    need(cef_value(integrate_in_order(f, {"x1", "x2"}).value) == cef_value(integrate_in_order(f, {"x2", "x1"}).value),
         "Fubini on " + f.str());
  }
  const std::vector<std::string> vs{"x1", "x2", "x3"};
  for (int i = 0; i < 50; ++i, ++fub) {
    CEF f = cef_const(ValueRingElem(1), vs);
    for (auto& v : vs) f = cef_mul(f, cef_extend(gen::sb1(rng, v, 1), vs, {}));
    if (i % 2) f = cef_mul(f, cef_extend(cef_bilinear("x1", "x3", LaurentConst::t(gen::pick(rng, -1, 1))), vs, {}));
    auto a = cef_value(integrate_in_order(f, {"x1", "x2", "x3"}).value);
    need(a == cef_value(integrate_in_order(f, {"x3", "x1", "x2"}).value), "Fubini on " + f.str());
    need(a == cef_value(integrate_in_order(f, {"x2", "x3", "x1"}).value), "Fubini on " + f.str());
  }
  std::ostringstream os;
  os << "A2 " << a2 << ", A3 " << a3 << ", A5 " << a5 << ", Fubini " << fub;
  return os.str();
}

// 5. specialized symbolic integrals against the oracle
std::string specialization() {
  std::mt19937 rng(105);
  int functions = 0, comparisons = 0;
  for (int i = 0; i < 36; ++i) {
    CEF f = i % 3 == 2 ? gen::sb2(rng) : gen::sb1(rng);
    IntegrationResult r = integrate_all(f);
    ValueRingElem v = cef_value(r.value);
    PrimeSet bad = bad_primes(f);
    bad.insert(r.bad.begin(), r.bad.end());
    OracleOptions o = fit(f);
    bool any = false;
    for (long p : {3, 5, 7}) {
      if (!clean(bad, p)) continue;
      for (auto& K : fields(p)) {
        need(oracle_integrate(f, K, o) == spec_value(v, K), f.str() + " over " + K.str());
        ++comparisons;
        any = true;
      }
    }
    functions += any;
  }
  need(functions >= 30, "only " + std::to_string(functions) + " functions outside bad primes");
  return std::to_string(functions) + " functions, " + std::to_string(comparisons) +
         " comparisons over Q_p and F_p((t)), two characters each";
}

// 6. identities hold over Q_p iff over F_p((t)); the bad-prime witness
std::string transfer() {
  std::mt19937 rng(106);
  dsl::Script s;
  auto atom = [](const CEF& f) {
    auto n = std::make_shared<dsl::Node>();
    n->text = f.str();
    n->value = f;
    return dsl::NodeP(n);
  };
  for (int i = 0; i < 12; ++i) {
    dsl::Stmt st;
    st.kind = dsl::Stmt::Check;
    st.line = i + 1;
    CEF f = gen::sb1(rng, "x", 1);
    st.args = {atom(f)};
    if (i % 3 == 0) st.sub = "inversion";
    if (i % 3 == 1) {
      st.sub = "partial";
      st.alpha = gen::pick(rng, -2, 2);
    }
    if (i % 3 == 2) {
      st.sub = "convtheorem";
      st.args.push_back(atom(gen::sb1(rng, "x", 1)));
    }
    s.stmts.push_back(st);
  }
  int identities = 0, evaluations = 0, specialized = 0;
  for (long p : {3, 5, 7}) {
    dsl::Config cfg;
    cfg.K = {p, FieldSpec::Qp, 1, {}};
    cfg.samples = 2;
    dsl::Evaluator ev(cfg);
    bool ok = true;
    auto report = dsl::transfer(s, ev, ok);
    for (auto& r : report) {
      need(r.value("verdict", "") == "match" || r.value("verdict", "") == "consistent failure (bad prime)",
           "p = " + std::to_string(p) + ": " + r.dump());
      ++identities;
      for (auto& [k, fld] : r["fields"].items()) evaluations += static_cast<int>(fld["rows"].size());
    }
    // specialized symbolic sides agree with the oracle at the same points
    for (auto& st : s.stmts) {
      auto [lhs, rhs] = dsl::identity_of(st, ev);
      CEF l = ev.sym(lhs);
      PrimeSet bad = bad_primes(l);
      bad.insert(l.bad.begin(), l.bad.end());
      if (!clean(bad, p)) continue;
      for (auto& pt : ev.sample_points(l.vars, st.line)) {
        for (auto& K : {FieldSpec{p, FieldSpec::Qp, 1, {}}, FieldSpec{p, FieldSpec::Fpt, 1, {}}}) {
          try {
            need(spec_cef_at(l, K, pt) == ev.oracle_at(lhs, K, pt), "specialized lhs vs oracle: " + dsl::print_stmt(st));
            ++specialized;
          } catch (const CenterCoincident&) {
          }
        }
        break;
      }
    }
  }
  need(specialized >= 30, "only " + std::to_string(specialized) + " specialized comparisons");
  // the witness: E(6z) on ord z = 0
  CEF z = cef_mul(cef_restrict(cef_ann("x", {}), parse_condition("ord_x == 0")), cef_phase("x", LaurentConst(6)));
  IntegrationResult r = integrate_all(z);
  ValueRingElem v = cef_value(r.value);
  need(v == V("-L^-1"), "symbolic witness " + v.str());
  need(r.bad.count(3) && !r.bad.count(5), "bad primes of the witness");
  for (auto kind : {FieldSpec::Qp, FieldSpec::Fpt}) {
    FieldSpec K5{5, kind, 1, {}}, K3{3, kind, 1, {}};
    need(oracle_integrate(z, K5) == Cyclotomic(Rat(-1, 5)), "witness at p = 5");
    need(spec_value(v, K5, r.bad) == Cyclotomic(Rat(-1, 5)), "specialized witness at p = 5");
    need(oracle_integrate(z, K3) == Cyclotomic(Rat(2, 3)), "oracle witness at p = 3");
    need(spec_value(v, K3) != Cyclotomic(Rat(2, 3)), "witness should fail at p = 3");
  }
  return std::to_string(identities) + " identity runs at p = 3, 5, 7 (" + std::to_string(evaluations) +
         " oracle points, " + std::to_string(specialized) +
         " against the specialized symbolic side), witness -1/5 at p = 5 and 2/3 vs -1/3 at p = 3 in both kinds";
}

// 7. closed forms against partial sums at q = 2
std::string presburger() {
  std::mt19937 rng(107);
  auto pick = [&](int lo, int hi) { return gen::pick(rng, lo, hi); };
  int n = 0;
  const std::vector<std::string> vars{"th", "la"};
  for (int it = 0; it < 100; ++it, ++n) {
    BasicSet b;
    b.add_ineq(LinForm::parse("th") - Rat(pick(-2, 2)));
    b.add_ineq(LinForm::parse("la + 3"));
    b.add_ineq(LinForm::parse("3 - la"));
    if (pick(0, 1)) b.add_ineq(LinForm::parse("th") - LinForm::var("la", pick(-2, 2)));
    if (pick(0, 1)) b.add_cong(LinForm::parse("th") + LinForm::var("la", pick(0, 2)) + Rat(pick(0, 2)), pick(2, 3));
    SumTerm t;
    t.cond = b;
    t.lexp = LinForm::var("th", -pick(1, 3)) + LinForm::var("la", pick(-3, 3));
    t.poly = Poly::from_linform(LinForm::var("th", pick(-3, 3)) + Rat(pick(-3, 3)));
    Rat exact = at2(sum_value(ps_sum(PresburgerSet(vars, {b}), t, {"th", "la"})));
    const int T = 80;
    Rat partial = 0;
    for (int la = -3; la <= 3; ++la)
      for (int th = -10; th <= T; ++th) {
        Assignment a{{"th", th}, {"la", la}};
        if (!b.contains(a)) continue;
        partial += pow2(t.lexp.eval(a).get_num().get_si()) * t.poly.eval(a);
      }
    // |poly| <= 3 th + 3, exponent <= -th + 9, seven values of la
    Rat bound = Rat(7 * 6) * Rat(T + 2) * pow2(-(T + 1) + 10);
    need(abs(exact - partial) <= bound, "sum over " + b.str());
  }
  auto pinned = [&](const char* cond, const LinForm& lexp, const Poly& poly, const Rat& want) {
    SumTerm t;
    t.lexp = lexp;
    t.poly = poly;
    std::vector<SumTerm> r = ps_sum(PresburgerSet({"th"}, parse_condition(cond)), t, {"th"});
    need(at2(sum_value(r)) == want, std::string("pinned sum over ") + cond);
  };
  pinned("th >= 0", LinForm::parse("-th"), Poly(1), 2);
  pinned("th >= 1 && th % 2 == 0", LinForm::parse("-th"), Poly(1), Rat(1, 3));
  pinned("th >= 0", LinForm::parse("-th"), Poly::var("th"), 2);
  return std::to_string(n) + " random sums within the tail bound, 3 pinned values";
}

// 8. pinned transforms, convolutions and annulus integrals
std::string pinned() {
  int n = 0;
  for (int a = -2; a <= 2; ++a, ++n)
    need(equal(fourier(phi(a)).value, cef_scale(phi(1 - a), ValueRingElem::Lpow(-a))), "F(phi_a)");
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b, ++n)
      need(equal(convolve(phi(a), phi(b)).value,
                 cef_scale(phi(std::min(a, b)), ValueRingElem::Lpow(-std::max(a, b)))),
           "phi_a * phi_b");
  for (int th = -3; th <= 4; ++th, ++n) {
    CEF ring = cef_restrict(cef_ann("x", {}), parse_condition("ord_x == " + std::to_string(th)));
    ValueRingElem v = integral_value(cef_mul(ring, cef_phase("x", LaurentConst(1))));
    ValueRingElem want = th < 0 ? ValueRingElem(0) : th == 0 ? V("-L^-1") : ValueRingElem::Lpow(-th) * V("1 - L^-1");
    need(v == want, "annulus integral at theta " + std::to_string(th));
  }
  return std::to_string(n) + " closed forms";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"1 Fourier inversion", inversion},
      {"2 convolution theorem", convolution_theorem},
      {"3 partial inversion", partial_inversion},
      {"4 axioms and Fubini", axioms},
      {"5 specialization vs oracle", specialization},
      {"6 transfer", transfer},
      {"7 Presburger sums", presburger},
      {"8 pinned closed forms", pinned},
  };
  bool all = true;
  for (auto& [name, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << " (" << std::fixed;
    std::cout.precision(1);
    std::cout << secs << "s)" << std::endl;
    all &= ok;
  }
  return all ? 0 : 1;
}
