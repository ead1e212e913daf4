#include <algorithm>

#include "mk/lexer.hpp"
#include "mk/presburger.hpp"

namespace mk {

// ---------------------------------------------------------------- Poly

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  std::map<std::string, int> e;
  for (auto& [v, k] : a) e[v] += k;
  for (auto& [v, k] : b) e[v] += k;
  return Monomial(e.begin(), e.end());
}

std::string mono_str(const Monomial& m) {
  std::string out;
  for (auto& [v, k] : m) {
    if (!out.empty()) out += "*";
    out += v;
    if (k != 1) out += "^" + std::to_string(k);
  }
  return out;
}

}  // namespace

Poly::Poly(const Rat& c) { add_term({}, c); }

Poly Poly::var(const std::string& v) {
  Poly p;
  p.add_term({{v, 1}}, 1);
  return p;
}

Poly Poly::from_linform(const LinForm& f) {
  Poly p(f.constant());
  for (auto& [v, c] : f.coeffs()) p.add_term({{v, 1}}, c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rat Poly::constant() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rat(0) : it->second;
}

int Poly::degree(const std::string& v) const {
  int d = 0;
  for (auto& [m, c] : terms_)
    for (auto& [w, k] : m)
      if (w == v) d = std::max(d, k);
  return d;
}

std::set<std::string> Poly::vars() const {
  std::set<std::string> out;
  for (auto& [m, c] : terms_)
    for (auto& [w, k] : m) out.insert(w);
  return out;
}

std::map<int, Poly> Poly::by_power(const std::string& v) const {
  std::map<int, Poly> out;
  for (auto& [m, c] : terms_) {
    int k = 0;
    Monomial rest;
    for (auto& [w, e] : m) {
      if (w == v)
        k = e;
      else
        rest.emplace_back(w, e);
    }
    out[k].add_term(rest, c);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

Poly Poly::substitute(const std::string& v, const Poly& by) const {
  Poly out;
  for (auto& [k, p] : by_power(v)) out += p * by.pow(k);
  return out;
}

Poly Poly::renamed(const std::map<std::string, std::string>& m) const {
  Poly out;
  for (auto& [mono, c] : terms_) {
    Poly t(c);
    for (auto& [w, e] : mono) {
      auto it = m.find(w);
      t = t * var(it == m.end() ? w : it->second).pow(e);
    }
    out += t;
  }
  return out;
}

Rat Poly::eval(const Assignment& a) const {
  Rat r = 0;
  for (auto& [m, c] : terms_) {
    Rat t = c;
    for (auto& [w, e] : m) {
      auto it = a.find(w);
      if (it == a.end()) throw Error("unassigned variable " + w);
      for (int i = 0; i < e; ++i) t *= Rat(it->second);
    }
    r += t;
  }
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (auto& [ma, ca] : a.terms_)
    for (auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

Poly Poly::pow(int k) const {
  Poly r(1);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  // highest total degree first
  std::vector<std::pair<Monomial, Rat>> ts(terms_.begin(), terms_.end());
  auto deg = [](const Monomial& m) {
    int d = 0;
    for (auto& [w, e] : m) d += e;
    return d;
  };
  std::stable_sort(ts.begin(), ts.end(), [&](auto& x, auto& y) { return deg(x.first) > deg(y.first); });
  for (auto& [m, c0] : ts) {
    Rat c = c0;
    if (!out.empty()) {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    } else if (c == -1 && !m.empty()) {
      out += "-";
      c = 1;
    }
    if (m.empty())
      out += to_string(c);
    else
      out += (c == 1 ? "" : to_string(c) + "*") + mono_str(m);
  }
  return out;
}

namespace {

Poly parse_poly_sum(TokenStream& ts);

Poly parse_poly_atom(TokenStream& ts) {
  Poly base;
  if (ts.eat_op("(")) {
    base = parse_poly_sum(ts);
    ts.expect_op(")");
  } else if (ts.peek().kind == Token::Num) {
    base = Poly(Rat(ts.integer()));
  } else if (ts.peek().kind == Token::Ident) {
    base = Poly::var(ts.ident());
  } else {
    ts.fail("expected polynomial term");
  }
  if (ts.eat_op("^")) base = base.pow(static_cast<int>(to_long(ts.integer())));
  return base;
}

Poly parse_poly_product(TokenStream& ts) {
  Poly p = parse_poly_atom(ts);
  for (;;) {
    if (ts.eat_op("*")) {
      p = p * parse_poly_atom(ts);
    } else if (ts.is_op("/") && ts.peek(1).kind == Token::Num) {
      ts.next();
      p = p * Poly(Rat(1) / Rat(ts.integer()));
    } else {
      return p;
    }
  }
}

Poly parse_poly_sum(TokenStream& ts) {
  Poly p = ts.eat_op("-") ? -parse_poly_product(ts) : (ts.eat_op("+"), parse_poly_product(ts));
  for (;;) {
    if (ts.eat_op("+"))
      p += parse_poly_product(ts);
    else if (ts.eat_op("-"))
      p += -parse_poly_product(ts);
    else
      return p;
  }
}

}  // namespace

Poly Poly::parse(const std::string& s) {
  TokenStream ts(s);
  Poly p = parse_poly_sum(ts);
  if (!ts.at_end()) ts.fail("trailing input");
  return p;
}

// ---------------------------------------------------------------- closed forms

namespace {

Int binom(int n, int k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

const std::vector<Rat>& bernoulli(int upto) {
  static std::vector<Rat> b{Rat(1)};
  while (static_cast<int>(b.size()) <= upto) {
    int m = static_cast<int>(b.size());
    Rat s = 0;
    for (int i = 0; i < m; ++i) s += Rat(binom(m + 1, i)) * b[i];
    b.push_back(-s / Rat(m + 1));
  }
  return b;
}

}  // namespace

Poly faulhaber(int k, const Poly& n) {
  const auto& B = bernoulli(k);
  Poly out;
  for (int i = 0; i <= k; ++i) out += Poly(Rat(binom(k + 1, i)) * B[i] / Rat(k + 1)) * n.pow(k + 1 - i);
  return out;
}

LFraction geometric_moment(int k, int m) {
  // sum_j j^k r^j = N_k(r) / (1 - r)^{k+1},  N_0 = 1,  N_i = r (N_{i-1}' (1 - r) + i N_{i-1})
  std::vector<Int> N{Int(1)};
  for (int i = 1; i <= k; ++i) {
    std::vector<Int> d(std::max<size_t>(N.size(), 1) + 1);
    // N' (1 - r)
    for (size_t j = 1; j < N.size(); ++j) {
      d[j - 1] += N[j] * Int(static_cast<long>(j));
      d[j] -= N[j] * Int(static_cast<long>(j));
    }
    for (size_t j = 0; j < N.size(); ++j) d[j] += N[j] * i;
    std::vector<Int> next(d.size() + 1);
    for (size_t j = 0; j < d.size(); ++j) next[j + 1] = d[j];
    while (!next.empty() && next.back() == 0) next.pop_back();
    N = next;
  }
  LFraction num;
  for (size_t j = 0; j < N.size(); ++j)
    if (N[j] != 0) num += LFraction(N[j]) * LFraction::Lpow(m * static_cast<int>(j));
  return num * LFraction::geom(m).pow(k + 1);
}

std::vector<SumTerm> sum_over(const SumTerm& t, const std::string& v) {
  std::vector<SumTerm> out;
  if (t.coeff.is_zero() || t.poly.is_zero()) return out;
  const std::string J = "__j";
  const Rat e = t.lexp.coeff(v);
  const LinForm rest = t.lexp.without(v);
  for (auto& piece : eliminate(t.cond, v)) {
    if (ps_is_empty(piece.cond)) continue;
    if (!piece.start && !piece.end) throw NotIntegrable(v, e >= 0 ? 1 : -1, "unbounded in both directions");
    if (piece.start && piece.end && *piece.start == *piece.end) {
      Poly w = t.poly.substitute(v, Poly::from_linform(*piece.start));
      if (!w.is_zero()) out.push_back({piece.cond, t.lexp.substitute(v, *piece.start), w, t.coeff});
      continue;
    }
    const int sgn = piece.start ? 1 : -1;
    const LinForm& base = piece.start ? *piece.start : *piece.end;
    Rat mr = e * Rat(piece.step) * sgn;
    if (mr.get_den() != 1) throw Error("L-exponent not integral along " + v);
    const int m = static_cast<int>(to_long(mr.get_num()));
    const LinForm lexp0 = rest + base * e;
    Poly sub = Poly::from_linform(base) + Poly::var(J) * Poly(Rat(piece.step * sgn));
    std::map<int, Poly> P = t.poly.substitute(v, sub).by_power(J);
    if (P.empty()) continue;
    const bool finite = piece.start && piece.end;
    if (finite) {
      LinForm nf = (*piece.end - *piece.start) * (Rat(1) / Rat(piece.step)) + Rat(1);
      Poly n = Poly::from_linform(nf);
      if (m == 0) {
        Poly w;
        for (auto& [k, pk] : P) w += pk * faulhaber(k, n);
        if (!w.is_zero()) out.push_back({piece.cond, lexp0, w, t.coeff});
        continue;
      }
      int kmax = P.rbegin()->first;
      for (auto& [k, pk] : P) out.push_back({piece.cond, lexp0, pk, t.coeff * ValueRingElem(geometric_moment(k, m))});
      // minus the tail from n on: r^n sum_i C(k,i) n^{k-i} G_i
      LinForm lexp_n = lexp0 + nf * Rat(m);
      for (int i = 0; i <= kmax; ++i) {
        Poly q;
        for (auto& [k, pk] : P)
          if (k >= i) q += pk * Poly(Rat(binom(k, i))) * n.pow(k - i);
        if (q.is_zero()) continue;
        out.push_back({piece.cond, lexp_n, q, -(t.coeff * ValueRingElem(geometric_moment(i, m)))});
      }
      continue;
    }
    if (m >= 0) throw NotIntegrable(v, sgn, "L-exponent slope " + std::to_string(m) + " on an infinite range");
    for (auto& [k, pk] : P) out.push_back({piece.cond, lexp0, pk, t.coeff * ValueRingElem(geometric_moment(k, m))});
  }
  return out;
}

std::vector<SumTerm> ps_sum(const PresburgerSet& s, const SumTerm& t, const std::vector<std::string>& summed) {
  std::vector<SumTerm> out;
  for (auto& piece : disjointify(s.basics())) {
    SumTerm u = t;
    u.cond.intersect(piece);
    if (u.cond.infeasible()) continue;
    std::vector<SumTerm> cur{u};
    for (auto& v : summed) {
      std::vector<SumTerm> next;
      for (auto& x : cur)
        for (auto& y : sum_over(x, v)) next.push_back(std::move(y));
      cur = std::move(next);
    }
    for (auto& x : cur) out.push_back(std::move(x));
  }
  return out;
}

ValueRingElem sum_value(const std::vector<SumTerm>& terms) {
  Int D = 1;
  for (auto& t : terms) D = lcm(D, t.poly.constant().get_den());
  ValueRingElem acc;
  for (auto& t : terms) {
    if (!t.cond.vars().empty() || !t.lexp.is_constant() || !t.poly.is_constant())
      throw Error("sum_value: free variables remain");
    if (t.cond.infeasible()) continue;
    Rat L = t.lexp.constant();
    if (L.get_den() != 1) throw Error("sum_value: non-integral L exponent");
    Rat c = t.poly.constant() * Rat(D);
    acc += t.coeff * ValueRingElem(LFraction(c.get_num())) *
           ValueRingElem::Lpow(static_cast<int>(to_long(L.get_num())));
  }
  return acc.div_exact(D);
}

}  // namespace mk
