#include "mk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace mk {

namespace {

using LF = LocalFieldElem;

Rat ppow(long p, long j) {
  Int pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(j < 0 ? -j : j));
  return j < 0 ? Rat(Int(1), pk) : Rat(pk);
}

long residue(const Rat& x, long p, const std::string& what) {
  if (mod_floor(x.get_den(), Int(p)) == 0)
    throw BadPrime(p, what + " has a denominator divisible by " + std::to_string(p));
  return to_long(rat_mod(x, Int(p)));
}

int digit(const LF& a, long e) { return e < a.v || e >= a.hi() ? 0 : a.d[e - a.v]; }

void normalize(LF& a) {
  auto it = std::find_if(a.d.begin(), a.d.end(), [](int x) { return x != 0; });
  a.v += it - a.d.begin();
  a.d.erase(a.d.begin(), it);
}

LF blank(const FieldSpec& K) { return LF{K.p, K.kind == FieldSpec::Qp, 0, {}}; }

LF mono(const FieldSpec& K, long j, long k, long hi) {
  LF r = blank(K);
  r.v = k;
  if (k < hi) r.d.assign(hi - k, 0);
  if (!r.d.empty()) r.d[0] = static_cast<int>(j);
  normalize(r);
  return r;
}

void check_same(const LF& a, const LF& b) {
  if (a.p != b.p || a.carry != b.carry) throw Error("local field elements from different fields");
}

}  // namespace

std::string LocalFieldElem::str() const {
  if (is_zero()) return "O(w^" + std::to_string(v) + ")";
  std::string s;
  for (size_t i = 0; i < d.size(); ++i)
    if (d[i]) s += std::to_string(d[i]) + "*w^" + std::to_string(v + static_cast<long>(i)) + " + ";
  return s + "O(w^" + std::to_string(hi()) + ")";
}

LocalFieldElem lf_zero(const FieldSpec& K, long hi) {
  LF r = blank(K);
  r.v = hi;
  return r;
}

LocalFieldElem lf_from(const LaurentConst& a, const FieldSpec& K, long hi) {
  LF r = blank(K);
  if (K.kind == FieldSpec::Qp) {
    Rat q = 0;
    for (auto& [j, c] : a.coeffs()) q += c * ppow(K.p, j);
    if (q == 0) return lf_zero(K, hi);
    long k = padic_val(q, K.p);
    if (k >= hi) return lf_zero(K, hi);
    Int pk = ppow(K.p, hi - k).get_num();
    Int m = rat_mod(Rat(q / ppow(K.p, k)), pk);
    r.v = k;
    for (long i = k; i < hi; ++i) {
      r.d.push_back(static_cast<int>(to_long(mod_floor(m, Int(K.p)))));
      m /= K.p;
    }
  } else {
    if (a.is_zero()) return lf_zero(K, hi);
    r.v = std::min<long>(a.ord(), hi);
    r.d.assign(hi - r.v, 0);
    for (auto& [j, c] : a.coeffs())
      if (j < hi) r.d[j - r.v] = static_cast<int>(residue(c, K.p, "coefficient " + to_string(c)));
  }
  normalize(r);
  return r;
}

LocalFieldElem lf_add(const LocalFieldElem& a, const LocalFieldElem& b) {
  check_same(a, b);
  long lo = std::min(a.v, b.v), hi = std::min(a.hi(), b.hi());
  LF r{a.p, a.carry, lo, {}};
  if (lo >= hi) {
    r.v = hi;
    return r;
  }
  r.d.resize(hi - lo);
  int c = 0;
  for (long i = 0; i < hi - lo; ++i) {
    int s = digit(a, lo + i) + digit(b, lo + i) + c;
    r.d[i] = s % a.p;
    c = a.carry ? s / a.p : 0;
  }
  normalize(r);
  return r;
}

LocalFieldElem lf_neg(const LocalFieldElem& a) {
  LF r = a;
  for (size_t i = 0; i < r.d.size(); ++i) {
    if (!a.carry)
      r.d[i] = (a.p - a.d[i]) % a.p;
    else
      r.d[i] = i == 0 ? a.p - a.d[0] : a.p - 1 - a.d[i];
  }
  return r;
}

LocalFieldElem lf_sub(const LocalFieldElem& a, const LocalFieldElem& b) { return lf_add(a, lf_neg(b)); }

LocalFieldElem lf_mul(const LocalFieldElem& a, const LocalFieldElem& b) {
  check_same(a, b);
  LF r{a.p, a.carry, 0, {}};
  if (a.is_zero() || b.is_zero()) {
    r.v = a.is_zero() ? a.hi() + (b.is_zero() ? b.hi() : b.v) : b.hi() + a.v;
    return r;
  }
  size_t n = std::min(a.d.size(), b.d.size());
  r.v = a.v + b.v;
  std::vector<long> c(n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; i + j < n; ++j) c[i + j] += static_cast<long>(a.d[i]) * b.d[j];
  r.d.resize(n);
  long carry = 0;
  for (size_t k = 0; k < n; ++k) {
    long s = c[k] + carry;
    r.d[k] = static_cast<int>(s % a.p);
    carry = a.carry ? s / a.p : 0;
  }
  normalize(r);
  return r;
}

long lf_ord(const LocalFieldElem& a) {
  if (a.is_zero()) throw PrecisionExhausted("element vanishes to precision w^" + std::to_string(a.hi()));
  return a.v;
}

int lf_ac(const LocalFieldElem& a) {
  lf_ord(a);
  return a.d[0];
}

namespace {

long lpow(long p, long s) {
  long r = 1;
  while (s-- > 0) r *= p;
  return r;
}

// zeta_{p^lvl}^k
struct Root {
  int lvl = 0;
  long k = 0;
};

Root combine(const Root& a, const Root& b, long p) {
  int l = std::max(a.lvl, b.lvl);
  long m = lpow(p, l);
  long k = (a.k * lpow(p, l - a.lvl) + b.k * lpow(p, l - b.lvl)) % m;
  return {l, k < 0 ? k + m : k};
}

Root psi_root(const LocalFieldElem& a, const FieldSpec& K) {
  if (a.hi() < 1) throw PrecisionExhausted("character needs digits up to w^0, have " + a.str());
  LF y = a;
  if (K.kind == FieldSpec::Qp && K.unit != 1 && !y.is_zero())
    y = lf_mul(y, lf_from(LaurentConst(K.unit), K, static_cast<long>(y.d.size())));
  if (y.is_zero() || y.v > 0) return {};
  if (K.kind == FieldSpec::Fpt) {
    long s = digit(y, 0);
    for (auto& [j, m] : K.mult) s += m * digit(y, j);
    return {1, s % K.p};
  }
  long s = 0;
  for (long e = 0; e >= y.v; --e) s = s * K.p + digit(y, e);
  return {static_cast<int>(1 - y.v), s};
}

// Sparse sum of w[k] zeta_{p^s}^k; converted to a Cyclotomic once at the end.
struct Acc {
  long p = 2;
  int s = 0;
  std::map<long, Rat> w;

  bool empty() const { return w.empty(); }

  void lift(int t) {
    if (t <= s) return;
    long f = lpow(p, t - s);
    std::map<long, Rat> nw;
    for (auto& [k, v] : w) nw[k * f] = v;
    w = std::move(nw);
    s = t;
  }

  void add(const Rat& r, const Root& z) {
    if (r == 0) return;
    lift(z.lvl);
    long idx = z.k * lpow(p, s - z.lvl);
    Rat& c = w[idx];
    c += r;
    if (c == 0) w.erase(idx);
  }

  void add(const Acc& o, const Rat& scale, const Root& z = {}) {
    for (auto& [k, v] : o.w) add(v * scale, combine({o.s, k}, z, p));
  }

  Acc times(const Acc& o) const {
    Acc r{p, 0, {}};
    for (auto& [k, v] : w)
      for (auto& [j, u] : o.w) r.add(v * u, combine({s, k}, {o.s, j}, p));
    return r;
  }

  Cyclotomic value() const {
    if (w.empty()) return Cyclotomic();
    std::vector<Rat> full(lpow(p, s));
    for (auto& [k, v] : w) full[k] = v;
    return Cyclotomic::from_root_weights(p, s, full);
  }

  static Acc of(const Cyclotomic& c, long p) {
    Acc a{p, 0, {}};
    if (c.is_rational()) {
      a.add(c.rational(), {});
      return a;
    }
    for (size_t i = 0; i < c.coeffs().size(); ++i) a.add(c.coeffs()[i], {c.level(), static_cast<long>(i)});
    return a;
  }
};

}  // namespace

Cyclotomic lf_psi(const LocalFieldElem& a, const FieldSpec& K) {
  Root z = psi_root(a, K);
  return Cyclotomic::root(K.p, z.lvl, Int(z.k));
}

namespace {

// A CEF with every constant read into K once.
struct Prepared {
  struct PBind {
    size_t var;
    std::string theta;
    LF center;
    std::optional<long> fix;
    long chr;
  };
  struct PPhase {
    size_t x;
    std::optional<size_t> y;
    LF a;
  };
  struct PTerm {
    const Term* t;
    std::vector<PBind> binds;
    std::vector<PPhase> phases;
    Acc coeff;
  };
  const CEF* f;
  FieldSpec K;
  std::vector<PTerm> terms;
};

Acc coeff_value(const ValueRingElem& v, const FieldSpec& K, long hi) {
  Acc out{K.p, 0, {}};
  for (auto& [sym, fr] : v.terms()) {
    LaurentConst a;
    for (auto& [j, c] : sym.tail()) {
      residue(c, K.p, "character coefficient " + to_string(c));
      a += LaurentConst::monomial(c, j);
    }
    out.add(fr.eval(Rat(K.p)), psi_root(lf_from(a, K, hi), K));
  }
  return out;
}

size_t index_of(const CEF& f, const std::string& v) {
  auto it = std::find(f.vars.begin(), f.vars.end(), v);
  if (it == f.vars.end()) throw Error("unknown variable " + v);
  return static_cast<size_t>(it - f.vars.begin());
}

Prepared prepare(const CEF& f, const FieldSpec& K, long hi) {
  K.validate();
  if (f.bad.count(Int(K.p)))
    throw BadPrime(K.p, "the function was built assuming " + std::to_string(K.p) + " invertible");
  Prepared P{&f, K, {}};
  for (auto& t : f.terms) {
    Prepared::PTerm pt{&t, {}, {}, coeff_value(t.coeff, K, hi)};
    for (auto& b : t.bindings) {
      std::optional<long> fix;
      if (b.acfix) fix = residue(*b.acfix, K.p, "ac value");
      pt.binds.push_back({index_of(f, b.var), b.theta(), lf_from(b.center, K, hi), fix,
                          b.acchar == 0 ? 0 : residue(b.acchar, K.p, "residue character")});
    }
    for (auto& p : t.phases) {
      std::optional<size_t> y;
      if (p.bilinear()) y = index_of(f, p.y);
      pt.phases.push_back({index_of(f, p.x), y, lf_from(p.a, K, hi)});
    }
    P.terms.push_back(std::move(pt));
  }
  return P;
}

Acc eval(const Prepared& P, const std::vector<LF>& x, const Assignment& params) {
  const long p = P.K.p;
  Acc out{p, 0, {}};
  for (auto& pt : P.terms) {
    Assignment a = params;
    Root z;
    bool live = true;
    for (auto& b : pt.binds) {
      LF diff = lf_sub(x[b.var], b.center);
      if (diff.is_zero())
        throw CenterCoincident(P.f->vars[b.var] + " sits on a center to precision " + std::to_string(diff.hi()));
      long ac = lf_ac(diff);
      a[b.theta] = lf_ord(diff);
      if (b.fix && *b.fix != ac) {
        live = false;
        break;
      }
      if (b.chr) z = combine(z, {1, b.chr * ac % p}, p);
    }
    if (!live || !pt.t->cond.contains(a)) continue;
    Rat e = pt.t->lexp.eval(a);
    if (e.get_den() != 1) throw Error("non-integral L exponent " + to_string(e));
    Rat r = ppow(p, to_long(e.get_num())) * pt.t->poly.eval(a);
    if (r == 0) continue;
    for (auto& ph : pt.phases) {
      LF arg = lf_mul(ph.a, x[ph.x]);
      if (ph.y) arg = lf_mul(arg, x[*ph.y]);
      z = combine(z, psi_root(arg, P.K), p);
    }
    out.add(pt.coeff, r, z);
  }
  return out;
}

struct Integrand {
  std::function<Acc(const std::vector<LF>&)> f;
  std::vector<std::vector<LF>> centers;  // per variable
  std::vector<long> conductor;           // phases in x_i are constant on balls of this level
};

Integrand make_integrand(size_t d, long B) {
  return {{}, std::vector<std::vector<LF>>(d), std::vector<long>(d, -B)};
}

void add_centers(Integrand& I, const Prepared& P, long B) {
  for (auto& pt : P.terms) {
    for (auto& b : pt.binds) {
      auto& cs = I.centers[b.var];
      if (std::none_of(cs.begin(), cs.end(), [&](const LF& c) { return lf_sub(c, b.center).is_zero(); }))
        cs.push_back(b.center);
    }
    for (auto& ph : pt.phases) {
      if (ph.a.is_zero()) continue;
      long c = 1 - ph.a.v + (ph.y ? B : 0);
      I.conductor[ph.x] = std::max(I.conductor[ph.x], c);
      if (ph.y) I.conductor[*ph.y] = std::max(I.conductor[*ph.y], c);
    }
  }
}

long max_exponent(const CEF& f) {
  long m = 0;
  auto see = [&](const LaurentConst& a) {
    for (auto& [j, c] : a.coeffs()) m = std::max<long>(m, std::abs(j));
  };
  for (auto& t : f.terms) {
    for (auto& b : t.bindings) see(b.center);
    for (auto& p : t.phases) see(p.a);
  }
  return m;
}

// (E - r)^(m+1) a = 0 on the last two thirds of a, for r = +-p^e and m <= 3.
// Returns the sum of the continuation beyond a.
std::optional<Cyclotomic> quasi_geometric(const std::vector<Cyclotomic>& a, long p) {
  const size_t n = a.size(), start = n / 3;
  if (std::all_of(a.begin() + start, a.end(), [](const Cyclotomic& c) { return c.is_zero(); })) return Cyclotomic();
  for (int m = 0; m <= 3; ++m) {
    if (n - start < static_cast<size_t>(m) + 3) break;
    // binomial coefficients of (E - r)^(m+1)
    std::vector<Rat> binom(m + 2, 1);
    for (int i = 1; i <= m + 1; ++i) binom[i] = binom[i - 1] * (m + 2 - i) / i;
    std::vector<Rat> cands;
    if (m == 0) {
      // the ratio of two consecutive nonzero terms, read off one coordinate
      for (size_t k = start; k + 1 < n && cands.empty(); ++k) {
        const Cyclotomic &u = a[k], &w = a[k + 1];
        if (u.is_zero() || u.level() != w.level() || u.prime() != w.prime()) continue;
        size_t j = 0;
        while (u.coeffs()[j] == 0) ++j;
        cands.push_back(w.coeffs()[j] / u.coeffs()[j]);
      }
    } else {
      for (int e = -24; e <= 24; ++e)
        for (int sign : {1, -1}) cands.push_back(sign * ppow(p, e));
    }
    for (const Rat& r : cands) {
      std::vector<Rat> w(m + 2);  // weight of a_{k+i} in (E - r)^(m+1) a at k
      for (int i = 0; i <= m + 1; ++i) {
        Rat pw = 1;
        for (int j = 0; j < m + 1 - i; ++j) pw *= -r;
        w[i] = binom[i] * pw;
      }
      bool fits = true;
      for (size_t k = start; k + m + 1 < n && fits; ++k) {
        Cyclotomic acc;
        for (int i = 0; i <= m + 1; ++i) acc += Cyclotomic(w[i]) * a[k + i];
        fits = acc.is_zero();
      }
      if (!fits) continue;
      if (abs(r) >= 1) throw TailNotConvergent("annuli around a center do not shrink (ratio " + to_string(r) + ")");
      // extend by the recurrence, then solve (E - r)^(m+1) T = 0 for the tail T_n
      std::vector<Cyclotomic> ext(a.begin(), a.end());
      for (int i = 0; i <= m; ++i) {
        Cyclotomic next;
        size_t k = ext.size() - (m + 1);
        for (int j = 0; j <= m; ++j) next = next - Cyclotomic(w[j]) * ext[k + j];
        ext.push_back(next);
      }
      Cyclotomic rhs, partial;
      for (int i = 1; i <= m + 1; ++i) {
        partial += ext[n + i - 1];
        rhs += Cyclotomic(w[i]) * partial;
      }
      Rat lead = 1;
      for (int i = 0; i <= m; ++i) lead *= 1 - r;
      return Cyclotomic(1 / lead) * rhs;
    }
  }
  return std::nullopt;
}

// Ball-by-ball summation over ord x_i >= -B. A ball without centers is
// cut no further once it reaches min(N - B, conductor); a ball holding a
// single center is summed annulus by annulus.
class Integrator {
 public:
  Integrator(const Integrand& I, const FieldSpec& K, const OracleOptions& o, long hi)
      : I_(I), K_(K), o_(o), hi_(hi) {
    for (long c : I.conductor) floor_.push_back(std::min<long>(o.N - o.B, c));
  }

  Cyclotomic run() {
    std::vector<LF> x(I_.centers.size());
    return integ(0, x).value();
  }

 private:
  Acc zero() const { return Acc{K_.p, 0, {}}; }

  Acc integ(size_t i, std::vector<LF>& x) {
    if (i == x.size()) return I_.f(x);
    return ball(i, x, lf_zero(K_, hi_), -o_.B);
  }

  LF generic(const LF& a) const { return lf_add(a, mono(K_, 1, hi_ - 4, hi_)); }

  Acc ball(size_t i, std::vector<LF>& x, const LF& a, long k) {
    std::vector<const LF*> cs;
    for (auto& c : I_.centers[i]) {
      LF diff = lf_sub(c, a);
      if (diff.is_zero() || diff.v >= k) cs.push_back(&c);
    }
    Acc s = zero();
    if (k >= floor_[i]) {
      if (cs.empty()) {
        x[i] = generic(a);
        s.add(integ(i + 1, x), ppow(K_.p, -k));
        return s;
      }
      if (std::all_of(cs.begin(), cs.end(), [&](const LF* c) { return lf_sub(*c, *cs[0]).is_zero(); }))
        return tail(i, x, *cs[0], k);
      if (k > hi_ - o_.tail - 8) throw PrecisionExhausted("centers too close to separate");
    }
    for (long j = 0; j < K_.p; ++j) s.add(ball(i, x, lf_add(a, mono(K_, j, k, hi_)), k + 1), 1);
    return s;
  }

  // ord(x_i - c) >= k: explicit annuli, then a closed-form tail.
  Acc tail(size_t i, std::vector<LF>& x, const LF& c, long k) {
    const int T = o_.tail;
    std::vector<Cyclotomic> gv;
    Acc head = zero();
    for (long th = k; th < k + T; ++th) {
      Acc s = zero();
      for (long eta = 1; eta < K_.p; ++eta) {
        x[i] = lf_add(c, mono(K_, eta, th, hi_));
        s.add(integ(i + 1, x), ppow(K_.p, -th - 1));
      }
      head.add(s, 1);
      gv.push_back(s.value());
    }
    // Each residue class of annuli mod s must be P(theta) r^theta with deg P <= 3.
    for (int s = 1; s <= 6; ++s) {
      std::vector<Cyclotomic> rest(s);
      bool ok = true;
      for (int c = 0; c < s && ok; ++c) {
        std::vector<Cyclotomic> a;
        for (int j = c; j < T; j += s) a.push_back(gv[j]);
        auto r = quasi_geometric(a, K_.p);
        if (!r) {
          ok = false;
          break;
        }
        rest[c] = *r;
      }
      if (!ok) continue;
      for (auto& r : rest) head.add(Acc::of(r, K_.p), 1);
      return head;
    }
    throw TailNotConvergent("annuli around a center are not eventually P(theta) r^theta");
  }

  const Integrand& I_;
  FieldSpec K_;
  OracleOptions o_;
  long hi_;
  std::vector<long> floor_;
};

long precision_for(const OracleOptions& o, long extra) { return o.N + o.tail + 16 + extra; }

Cyclotomic integrate(const Integrand& I, const FieldSpec& K, const OracleOptions& o, long hi) {
  if (o.N < 0 || o.B < 0) throw Error("oracle needs B >= 0 and N >= 0");
  return Integrator(I, K, o, hi).run();
}

long point_exponent(const Point& pt) {
  long m = 0;
  for (auto& [v, a] : pt)
    for (auto& [j, c] : a.coeffs()) m = std::max<long>(m, std::abs(j));
  return m;
}

std::vector<LF> read_point(const CEF& f, const Point& pt, const FieldSpec& K, long hi) {
  std::vector<LF> out;
  for (auto& v : f.vars) {
    auto it = pt.find(v);
    if (it == pt.end()) throw Error("no value for " + v);
    out.push_back(lf_from(it->second, K, hi));
  }
  return out;
}

}  // namespace

Cyclotomic oracle_eval(const CEF& f, const FieldSpec& K, const std::vector<LocalFieldElem>& x,
                       const Assignment& params) {
  if (x.size() != f.vars.size()) throw Error("point has the wrong dimension");
  long hi = x.empty() ? 64 : x[0].hi();
  return eval(prepare(f, K, hi), x, params).value();
}

Cyclotomic oracle_integrate(const CEF& f, const FieldSpec& K, const OracleOptions& o) {
  long hi = precision_for(o, max_exponent(f));
  Prepared P = prepare(f, K, hi);
  Integrand I = make_integrand(f.vars.size(), o.B);
  I.f = [&](const std::vector<LF>& x) { return eval(P, x, o.params); };
  add_centers(I, P, o.B);
  return integrate(I, K, o, hi);
}

Cyclotomic oracle_fourier_at(const CEF& f, const FieldSpec& K, const Point& y, const OracleOptions& o) {
  long hi = precision_for(o, max_exponent(f) + point_exponent(y));
  Prepared P = prepare(f, K, hi);
  std::vector<LF> ys = read_point(f, y, K, hi);
  Integrand I = make_integrand(f.vars.size(), o.B);
  I.f = [&](const std::vector<LF>& x) {
    Acc v = eval(P, x, o.params);
    if (v.empty()) return v;
    LF s = lf_zero(K, hi);
    for (size_t i = 0; i < x.size(); ++i) s = lf_add(s, lf_mul(x[i], ys[i]));
    Acc out{K.p, 0, {}};
    out.add(v, 1, psi_root(s, K));
    return out;
  };
  add_centers(I, P, o.B);
  for (size_t i = 0; i < ys.size(); ++i)
    if (!ys[i].is_zero()) I.conductor[i] = std::max(I.conductor[i], 1 - ys[i].v);
  return integrate(I, K, o, hi);
}

Cyclotomic oracle_convolve_at(const CEF& f, const CEF& g, const FieldSpec& K, const Point& z,
                              const OracleOptions& o) {
  if (f.vars != g.vars) throw SignatureMismatch("convolution needs equal signatures");
  long hi = precision_for(o, std::max(max_exponent(f), max_exponent(g)) + point_exponent(z));
  Prepared Pf = prepare(f, K, hi), Pg = prepare(g, K, hi);
  std::vector<LF> zs = read_point(f, z, K, hi);
  Integrand I = make_integrand(f.vars.size(), o.B);
  I.f = [&](const std::vector<LF>& x) {
    Acc v = eval(Pf, x, o.params);
    if (v.empty()) return v;
    std::vector<LF> u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = lf_sub(zs[i], x[i]);
    return v.times(eval(Pg, u, o.params));
  };
  add_centers(I, Pf, o.B);
  Integrand J = make_integrand(f.vars.size(), o.B);
  add_centers(J, Pg, o.B);
  for (size_t i = 0; i < J.centers.size(); ++i) {
    for (auto& c : J.centers[i]) I.centers[i].push_back(lf_sub(zs[i], c));
    I.conductor[i] = std::max(I.conductor[i], J.conductor[i]);
  }
  return integrate(I, K, o, hi);
}

}  // namespace mk
