#include "mk/specialize.hpp"

namespace mk {

namespace {

Rat ppow(long p, long j) {
  Int pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(j < 0 ? -j : j));
  return j < 0 ? Rat(Int(1), pk) : Rat(pk);
}

Int residue(const Rat& x, long p, const std::string& what) {
  if (mod_floor(x.get_den(), Int(p)) == 0)
    throw BadPrime(p, what + " has a denominator divisible by " + std::to_string(p));
  return rat_mod(x, Int(p));
}

// exp(2 pi i frac_p(r)).
Cyclotomic psi_frac(const Rat& r, long p) {
  if (r == 0) return Cyclotomic(1);
  long v = padic_val(r, p);
  if (v >= 0) return Cyclotomic(1);
  Int pk = ppow(p, -v).get_num();
  return Cyclotomic::root(p, static_cast<int>(-v), rat_mod(Rat(r * Rat(pk)), pk));
}

/// An element of K: a rational for Q_p, residues by exponent for F_p((t)).
struct KElem {
  Rat q = 0;
  std::map<int, Int> f;
};

KElem image(const LaurentConst& a, const FieldSpec& K, const std::string& what) {
  KElem e;
  for (auto& [j, c] : a.coeffs()) {
    if (K.kind == FieldSpec::Qp) {
      e.q += c * ppow(K.p, j);
    } else {
      Int r = residue(c, K.p, what);
      if (r != 0) e.f[j] = r;
    }
  }
  return e;
}

KElem sub(const KElem& a, const KElem& b, long p) {
  KElem e{a.q - b.q, a.f};
  for (auto& [j, c] : b.f) {
    Int r = mod_floor(e.f[j] - c, Int(p));
    if (r == 0)
      e.f.erase(j);
    else
      e.f[j] = r;
  }
  return e;
}

KElem mul(const KElem& a, const KElem& b, long p) {
  KElem e{a.q * b.q, {}};
  for (auto& [i, x] : a.f)
    for (auto& [j, y] : b.f) e.f[i + j] = mod_floor(e.f[i + j] + x * y, Int(p));
  for (auto it = e.f.begin(); it != e.f.end();) it = it->second == 0 ? e.f.erase(it) : std::next(it);
  return e;
}

bool is_zero(const KElem& e, const FieldSpec& K) {
  return K.kind == FieldSpec::Qp ? e.q == 0 : e.f.empty();
}

std::pair<long, Int> ord_ac(const KElem& e, const FieldSpec& K) {
  if (K.kind == FieldSpec::Qp) {
    long v = padic_val(e.q, K.p);
    return {v, rat_mod(Rat(e.q / ppow(K.p, v)), Int(K.p))};
  }
  return {e.f.begin()->first, e.f.begin()->second};
}

Cyclotomic psi(const KElem& e, const FieldSpec& K) {
  if (K.kind == FieldSpec::Qp) return psi_frac(Rat(K.unit * e.q / K.p), K.p);
  Int s = e.f.count(0) ? e.f.at(0) : Int(0);
  for (auto& [j, m] : K.mult)
    if (e.f.count(j)) s += Int(m) * e.f.at(j);
  return Cyclotomic::root(K.p, 1, s);
}

}  // namespace

void FieldSpec::validate() const {
  if (!is_prime(p)) throw Error(std::to_string(p) + " is not prime");
  if (kind == Qp) {
    if (padic_val(unit, p) != 0 || rat_mod(unit, Int(p)) != 1)
      throw Error("twist unit must be 1 mod " + std::to_string(p));
    if (!mult.empty()) throw Error("coefficient multipliers only apply to F_p((t))");
  } else {
    if (unit != 1) throw Error("a twist unit only applies to Q_p");
    for (auto& [j, m] : mult)
      if (j >= 0) throw Error("multiplier index must be negative");
  }
}

std::string FieldSpec::str() const {
  std::string s = kind == Qp ? "Q_" + std::to_string(p) : "F_" + std::to_string(p) + "((t))";
  if (unit != 1) s += " u=" + to_string(unit);
  for (auto& [j, m] : mult) s += " m[" + std::to_string(j) + "]=" + std::to_string(m);
  return s;
}

FieldSpec::Kind FieldSpec::parse_kind(const std::string& s) {
  if (s == "qp") return Qp;
  if (s == "fpt") return Fpt;
  throw Error("unknown field kind '" + s + "' (expected qp or fpt)");
}

Cyclotomic spec_char(const CharSymbol& s, const FieldSpec& K) {
  LaurentConst a;
  for (auto& [j, c] : s.tail()) a += LaurentConst::monomial(c, j);
  // the symbol's coefficients must be p-integral before they are read in K
  for (auto& [j, c] : s.tail()) residue(c, K.p, "character coefficient " + to_string(c));
  return psi(image(a, K, "character"), K);
}

Cyclotomic spec_value(const ValueRingElem& v, const FieldSpec& K, const PrimeSet& bad) {
  if (bad.count(Int(K.p)))
    throw BadPrime(K.p, "the computation inverted a constant divisible by " + std::to_string(K.p));
  return vr_eval_at(v, Rat(K.p), [&](const CharSymbol& s) { return spec_char(s, K); });
}

Cyclotomic spec_cef_at(const CEF& f, const FieldSpec& K, const Point& pt, const Assignment& params) {
  if (f.bad.count(Int(K.p)))
    throw BadPrime(K.p, "the function was built assuming " + std::to_string(K.p) + " invertible");
  std::map<std::string, KElem> x;
  for (auto& v : f.vars) {
    auto it = pt.find(v);
    if (it == pt.end()) throw Error("no value for " + v);
    x[v] = image(it->second, K, "point coordinate " + v);
  }
  Cyclotomic out;
  for (auto& t : f.terms) {
    Assignment a = params;
    Cyclotomic val(1);
    bool live = true;
    for (auto& b : t.bindings) {
      KElem d = sub(x.at(b.var), image(b.center, K, "center"), K.p);
      if (is_zero(d, K)) throw CenterCoincident(b.var + " sits on the center " + b.center.str());
      auto [o, ac] = ord_ac(d, K);
      a[b.theta()] = o;
      if (b.acfix && residue(*b.acfix, K.p, "ac value") != ac) {
        live = false;
        break;
      }
      if (b.acchar != 0) val *= Cyclotomic::root(K.p, 1, residue(b.acchar, K.p, "residue character") * ac);
    }
    if (!live || !t.cond.contains(a)) continue;
    Rat e = t.lexp.eval(a);
    if (e.get_den() != 1) throw Error("non-integral L exponent " + to_string(e));
    val *= Cyclotomic(Rat(ppow(K.p, to_long(e.get_num())) * t.poly.eval(a)));
    for (auto& p : t.phases) {
      KElem arg = mul(image(p.a, K, "phase coefficient"), x.at(p.x), K.p);
      if (p.bilinear()) arg = mul(arg, x.at(p.y), K.p);
      val *= psi(arg, K);
    }
    out += val * spec_value(t.coeff, K);
  }
  return out;
}

PrimeSet bad_primes(const ValueRingElem& v) {
  PrimeSet s;
  for (auto& [sym, fr] : v.terms())
    for (auto& [j, c] : sym.tail()) note_primes(s, c);
  return s;
}

PrimeSet bad_primes(const CEF& f) {
  PrimeSet s = f.bad;
  for (auto& t : f.terms) {
    PrimeSet c = bad_primes(t.coeff);
    s.insert(c.begin(), c.end());
    for (auto& b : t.bindings) {
      note_const(s, b.center);
      if (b.acfix) note_primes(s, *b.acfix);
      if (b.acchar != 0) note_primes(s, b.acchar);
    }
    for (auto& p : t.phases) note_const(s, p.a);
  }
  return s;
}

}  // namespace mk
