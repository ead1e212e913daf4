#include "mk/presburger.hpp"

#include <algorithm>

#include "mk/lexer.hpp"

namespace mk {

// ---------------------------------------------------------------- LinForm

LinForm LinForm::var(const std::string& v, const Rat& c) {
  LinForm f;
  f.set_coeff(v, c);
  return f;
}

Rat LinForm::coeff(const std::string& v) const {
  auto it = coeffs_.find(v);
  return it == coeffs_.end() ? Rat(0) : it->second;
}

std::set<std::string> LinForm::vars() const {
  std::set<std::string> out;
  for (auto& [v, c] : coeffs_) out.insert(v);
  return out;
}

void LinForm::set_coeff(const std::string& v, const Rat& c) {
  if (c == 0)
    coeffs_.erase(v);
  else
    coeffs_[v] = c;
}

LinForm LinForm::without(const std::string& v) const {
  LinForm r = *this;
  r.coeffs_.erase(v);
  return r;
}

LinForm LinForm::substitute(const std::string& v, const LinForm& by) const {
  Rat c = coeff(v);
  if (c == 0) return *this;
  return without(v) + by * c;
}

LinForm LinForm::renamed(const std::map<std::string, std::string>& m) const {
  LinForm r(constant_);
  for (auto& [v, c] : coeffs_) {
    auto it = m.find(v);
    const std::string& w = it == m.end() ? v : it->second;
    r.set_coeff(w, r.coeff(w) + c);
  }
  return r;
}

Rat LinForm::eval(const Assignment& a) const {
  Rat r = constant_;
  for (auto& [v, c] : coeffs_) {
    auto it = a.find(v);
    if (it == a.end()) throw Error("unassigned variable " + v);
    r += c * Rat(it->second);
  }
  return r;
}

Int LinForm::denominator() const {
  Int d = constant_.get_den();
  for (auto& [v, c] : coeffs_) d = lcm(d, c.get_den());
  return d;
}

LinForm LinForm::operator-() const {
  LinForm r = *this;
  r *= -1;
  return r;
}

LinForm& LinForm::operator+=(const LinForm& o) {
  for (auto& [v, c] : o.coeffs_) set_coeff(v, coeff(v) + c);
  constant_ += o.constant_;
  return *this;
}

LinForm& LinForm::operator-=(const LinForm& o) { return *this += -o; }

LinForm& LinForm::operator*=(const Rat& k) {
  if (k == 0) {
    coeffs_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [v, c] : coeffs_) c *= k;
  constant_ *= k;
  return *this;
}

namespace {

void append_term(std::string& out, Rat c, const std::string& name) {
  if (out.empty()) {
    if (c < 0 && !name.empty() && c == -1) {
      out += "-";
      c = 1;
    }
  } else {
    out += c < 0 ? " - " : " + ";
    if (c < 0) c = -c;
  }
  if (name.empty())
    out += to_string(c);
  else
    out += (c == 1 ? "" : to_string(c) + "*") + name;
}

}  // namespace

std::string LinForm::str() const {
  std::string out;
  for (auto& [v, c] : coeffs_) append_term(out, c, v);
  if (constant_ != 0 || out.empty()) append_term(out, constant_, "");
  return out;
}

namespace {

LinForm parse_lin_sum(TokenStream& ts);

LinForm parse_lin_atom(TokenStream& ts) {
  if (ts.eat_op("(")) {
    LinForm f = parse_lin_sum(ts);
    ts.expect_op(")");
    return f;
  }
  if (ts.peek().kind == Token::Num) return LinForm(Rat(ts.integer()));
  if (ts.peek().kind == Token::Ident) return LinForm::var(ts.ident());
  ts.fail("expected linear term");
}

LinForm parse_lin_product(TokenStream& ts) {
  LinForm f = parse_lin_atom(ts);
  for (;;) {
    if (ts.eat_op("*")) {
      LinForm g = parse_lin_atom(ts);
      if (!f.is_constant() && !g.is_constant()) ts.fail("nonlinear product");
      f = f.is_constant() ? g * f.constant() : f * g.constant();
    } else if (ts.is_op("/") && ts.peek(1).kind == Token::Num) {
      ts.next();
      Int d = ts.integer();
      if (d == 0) ts.fail("division by zero");
      f *= Rat(1) / Rat(d);
    } else {
      return f;
    }
  }
}

LinForm parse_lin_sum(TokenStream& ts) {
  LinForm f = ts.eat_op("-") ? -parse_lin_product(ts) : (ts.eat_op("+"), parse_lin_product(ts));
  for (;;) {
    if (ts.eat_op("+"))
      f += parse_lin_product(ts);
    else if (ts.eat_op("-"))
      f -= parse_lin_product(ts);
    else
      return f;
  }
}

}  // namespace

LinForm LinForm::parse(const std::string& s) {
  TokenStream ts(s);
  LinForm f = parse_lin_sum(ts);
  if (!ts.at_end()) ts.fail("trailing input");
  return f;
}

nlohmann::json LinForm::to_json() const {
  nlohmann::json c = nlohmann::json::object();
  for (auto& [v, x] : coeffs_) c[v] = to_string(x);
  return {{"coeffs", c}, {"const", to_string(constant_)}};
}

LinForm LinForm::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  LinForm f(parse_rat(j.at("const").get<std::string>()));
  for (auto& [v, x] : j.at("coeffs").items()) f.set_coeff(v, parse_rat(x.get<std::string>()));
  return f;
}

// ---------------------------------------------------------------- BasicSet

namespace {

Int gcd_int(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

/// Scales f to integer coefficients (positive factor).
LinForm integral(const LinForm& f) { return f * Rat(f.denominator()); }

Int var_gcd(const LinForm& f) {
  Int g = 0;
  for (auto& [v, c] : f.coeffs()) g = gcd_int(g, c.get_num());
  return g;
}

bool same_dir(const LinForm& a, const LinForm& b) { return a.coeffs() == b.coeffs(); }

bool opposite_dir(const LinForm& a, const LinForm& b) {
  if (a.coeffs().size() != b.coeffs().size()) return false;
  for (auto& [v, c] : a.coeffs())
    if (b.coeff(v) != -c) return false;
  return true;
}

}  // namespace

BasicSet BasicSet::empty_set() {
  BasicSet b;
  b.infeasible_ = true;
  return b;
}

void BasicSet::add_ineq_raw(LinForm f) {
  if (infeasible_) return;
  f = integral(f);
  if (f.is_constant()) {
    if (f.constant() < 0) *this = empty_set();
    return;
  }
  Int g = var_gcd(f);
  if (g != 1) {
    LinForm q(Rat(floor_div(f.constant().get_num(), g)));
    for (auto& [v, c] : f.coeffs()) q.set_coeff(v, c / Rat(g));
    f = q;
  }
  for (auto& h : ineqs_) {
    if (same_dir(h, f)) {
      if (f.constant() < h.constant()) h.set_constant(f.constant());
      return;
    }
  }
  for (auto& h : ineqs_) {
    if (opposite_dir(h, f) && h.constant() + f.constant() < 0) {
      *this = empty_set();
      return;
    }
  }
  ineqs_.push_back(f);
}

BasicSet& BasicSet::add_ineq(const LinForm& f) {
  add_ineq_raw(f);
  sort();
  return *this;
}

BasicSet& BasicSet::add_eq(const LinForm& f) {
  add_ineq_raw(f);
  add_ineq_raw(-f);
  sort();
  return *this;
}

BasicSet& BasicSet::add_cong(const LinForm& f0, const Int& m0) {
  if (infeasible_) return *this;
  if (m0 < 1) throw Error("congruence modulus must be positive");
  Int d = f0.denominator();
  LinForm f = f0 * Rat(d);
  Int m = m0 * d;
  // reduce coefficients into [0, m)
  LinForm r;
  for (auto& [v, c] : f.coeffs()) r.set_coeff(v, Rat(mod_floor(c.get_num(), m)));
  Int c = mod_floor(f.constant().get_num(), m);
  Int g = m;
  for (auto& [v, x] : r.coeffs()) g = gcd_int(g, x.get_num());
  if (r.is_constant() || g == m) {
    if (c % m != 0) *this = empty_set();
    return *this;
  }
  if (c % g != 0) {
    *this = empty_set();
    return *this;
  }
  m /= g;
  c /= g;
  LinForm q;
  for (auto& [v, x] : r.coeffs()) q.set_coeff(v, Rat(x.get_num() / g));
  if (m == 1) return *this;
  // make the leading coefficient 1 when it is a unit mod m
  Int lead = q.coeffs().begin()->second.get_num();
  if (gcd_int(lead, m) == 1) {
    Int u = inv_mod(lead, m);
    LinForm s;
    for (auto& [v, x] : q.coeffs()) s.set_coeff(v, Rat(mod_floor(x.get_num() * u, m)));
    q = s;
    c = c * u;
  }
  q.set_constant(Rat(mod_floor(c, m)));
  for (auto& h : congs_) {
    if (h.m == m && same_dir(h.f, q)) {
      if (h.f.constant() != q.constant()) *this = empty_set();
      return *this;
    }
  }
  congs_.push_back({q, m});
  sort();
  return *this;
}

BasicSet& BasicSet::intersect(const BasicSet& o) {
  if (o.infeasible_) {
    *this = empty_set();
    return *this;
  }
  for (auto& f : o.ineqs_) add_ineq_raw(f);
  sort();
  for (auto& c : o.congs_) add_cong(c.f, c.m);
  return *this;
}

void BasicSet::sort() {
  if (infeasible_) {
    ineqs_.clear();
    congs_.clear();
    return;
  }
  std::sort(ineqs_.begin(), ineqs_.end());
  std::sort(congs_.begin(), congs_.end());
}

std::set<std::string> BasicSet::vars() const {
  std::set<std::string> out;
  for (auto& f : ineqs_)
    for (auto& [v, c] : f.coeffs()) out.insert(v);
  for (auto& g : congs_)
    for (auto& [v, c] : g.f.coeffs()) out.insert(v);
  return out;
}

bool BasicSet::mentions(const std::string& v) const {
  for (auto& f : ineqs_)
    if (f.has(v)) return true;
  for (auto& g : congs_)
    if (g.f.has(v)) return true;
  return false;
}

BasicSet BasicSet::substitute(const std::string& v, const LinForm& by) const {
  if (infeasible_) return *this;
  BasicSet r;
  for (auto& f : ineqs_) r.add_ineq_raw(f.substitute(v, by));
  r.sort();
  for (auto& g : congs_) r.add_cong(g.f.substitute(v, by), g.m);
  return r;
}

BasicSet BasicSet::renamed(const std::map<std::string, std::string>& m) const {
  if (infeasible_) return *this;
  BasicSet r;
  for (auto& f : ineqs_) r.add_ineq_raw(f.renamed(m));
  r.sort();
  for (auto& g : congs_) r.add_cong(g.f.renamed(m), g.m);
  return r;
}

bool BasicSet::contains(const Assignment& a) const {
  if (infeasible_) return false;
  for (auto& f : ineqs_)
    if (f.eval(a) < 0) return false;
  for (auto& g : congs_) {
    Rat x = g.f.eval(a);
    if (x.get_den() != 1 || mod_floor(x.get_num(), g.m) != 0) return false;
  }
  return true;
}

std::vector<LinForm> BasicSet::equalities() const {
  std::vector<LinForm> out;
  for (size_t i = 0; i < ineqs_.size(); ++i)
    for (size_t j = i + 1; j < ineqs_.size(); ++j)
      if (opposite_dir(ineqs_[i], ineqs_[j]) && ineqs_[i].constant() + ineqs_[j].constant() == 0)
        out.push_back(ineqs_[i]);
  return out;
}

bool operator<(const BasicSet& a, const BasicSet& b) {
  if (a.infeasible_ != b.infeasible_) return a.infeasible_ < b.infeasible_;
  if (a.ineqs_ != b.ineqs_) return a.ineqs_ < b.ineqs_;
  return a.congs_ < b.congs_;
}

namespace {

std::string rel_str(const LinForm& f, const std::string& op) {
  LinForm pos, neg;
  for (auto& [v, c] : f.coeffs()) {
    if (c > 0)
      pos.set_coeff(v, c);
    else
      neg.set_coeff(v, -c);
  }
  if (!pos.is_constant()) {
    neg.set_constant(-f.constant());
    return pos.str() + " " + op + " " + neg.str();
  }
  return neg.str() + (op == ">=" ? " <= " : " == ") + to_string(f.constant());
}

}  // namespace

std::string BasicSet::str() const {
  if (infeasible_) return "false";
  std::vector<std::string> parts;
  std::vector<bool> used(ineqs_.size());
  // print opposing pairs that pin a value as equalities
  for (size_t i = 0; i < ineqs_.size(); ++i) {
    if (used[i]) continue;
    for (size_t j = i + 1; j < ineqs_.size(); ++j) {
      if (!used[j] && opposite_dir(ineqs_[i], ineqs_[j]) &&
          ineqs_[i].constant() + ineqs_[j].constant() == 0) {
        parts.push_back(rel_str(ineqs_[i], "=="));
        used[i] = used[j] = true;
        break;
      }
    }
    if (!used[i]) parts.push_back(rel_str(ineqs_[i], ">="));
  }
  for (auto& g : congs_) {
    LinForm lhs = g.f;
    lhs.set_constant(0);
    parts.push_back(lhs.str() + " % " + to_string(g.m) + " == " +
                    to_string(mod_floor(-g.f.constant().get_num(), g.m)));
  }
  if (parts.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? " && " : "") + parts[i];
  return out;
}

nlohmann::json BasicSet::to_json() const {
  nlohmann::json ineqs = nlohmann::json::array(), congs = nlohmann::json::array();
  for (auto& f : ineqs_) ineqs.push_back(f.to_json());
  for (auto& g : congs_) congs.push_back({{"f", g.f.to_json()}, {"m", to_string(g.m)}});
  return {{"infeasible", infeasible_}, {"ineqs", ineqs}, {"congs", congs}, {"text", str()}};
}

BasicSet BasicSet::from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    auto v = parse_condition(j.get<std::string>());
    if (v.size() != 1) throw ParseError("expected a conjunction: " + j.get<std::string>());
    return v[0];
  }
  if (j.value("infeasible", false)) return empty_set();
  BasicSet b;
  for (auto& f : j.at("ineqs")) b.add_ineq(LinForm::from_json(f));
  for (auto& g : j.at("congs")) b.add_cong(LinForm::from_json(g.at("f")), Int(g.at("m").get<std::string>()));
  return b;
}

// ---------------------------------------------------------------- conditions

namespace {

using Disj = std::vector<BasicSet>;

Disj conj_of(const Disj& a, const Disj& b) {
  Disj out;
  for (auto& x : a)
    for (auto& y : b) {
      BasicSet z = x;
      z.intersect(y);
      if (!z.infeasible()) out.push_back(z);
    }
  return out;
}

Disj parse_disj(TokenStream& ts);

Disj parse_comparison(TokenStream& ts) {
  LinForm lhs = parse_lin_sum(ts);
  if (ts.eat_op("%")) {
    Int m = ts.integer();
    bool eq = ts.eat_op("==");
    if (!eq) ts.expect_op("!=");
    LinForm rhs = parse_lin_sum(ts);
    LinForm f = lhs - rhs;
    if (eq) return {BasicSet().add_cong(f, m)};
    Disj out;
    for (Int k = 1; k < m; ++k) out.push_back(BasicSet().add_cong(f - Rat(k), m));
    return out;
  }
  Disj acc{BasicSet()};
  bool any = false;
  for (;;) {
    std::string op;
    for (const char* o : {">=", "<=", "==", "!=", ">", "<"})
      if (ts.is_op(o)) op = o;
    if (op.empty()) break;
    ts.next();
    any = true;
    LinForm rhs = parse_lin_sum(ts);
    LinForm d = lhs - rhs;
    const LinForm eps(Rat(1) / Rat(d.denominator()));
    Disj piece;
    if (op == ">=") piece = {BasicSet().add_ineq(d)};
    if (op == "<=") piece = {BasicSet().add_ineq(-d)};
    if (op == ">") piece = {BasicSet().add_ineq(d - eps)};
    if (op == "<") piece = {BasicSet().add_ineq(-d - eps)};
    if (op == "==") piece = {BasicSet().add_eq(d)};
    if (op == "!=")
      piece = {BasicSet().add_ineq(d - eps),
               BasicSet().add_ineq(-d - eps)};
    acc = conj_of(acc, piece);
    lhs = rhs;
  }
  if (!any) ts.fail("expected comparison");
  return acc;
}

Disj parse_atom(TokenStream& ts) {
  if (ts.is_ident("true")) {
    ts.next();
    return {BasicSet()};
  }
  if (ts.is_ident("false")) {
    ts.next();
    return {};
  }
  if (ts.is_op("(")) {
    size_t m = ts.mark();
    try {
      return parse_comparison(ts);
    } catch (const ParseError&) {
      ts.reset(m);
    }
    ts.expect_op("(");
    Disj d = parse_disj(ts);
    ts.expect_op(")");
    return d;
  }
  return parse_comparison(ts);
}

Disj parse_conj(TokenStream& ts) {
  Disj acc = parse_atom(ts);
  while (ts.eat_op("&&")) acc = conj_of(acc, parse_atom(ts));
  return acc;
}

Disj parse_disj(TokenStream& ts) {
  Disj acc = parse_conj(ts);
  while (ts.eat_op("||")) {
    Disj d = parse_conj(ts);
    acc.insert(acc.end(), d.begin(), d.end());
  }
  return acc;
}

}  // namespace

std::vector<BasicSet> parse_condition(const std::string& s) {
  TokenStream ts(s);
  Disj d = parse_disj(ts);
  if (!ts.at_end()) ts.fail("trailing input");
  return d;
}

// ---------------------------------------------------------------- PresburgerSet

PresburgerSet::PresburgerSet(std::vector<std::string> sig, std::vector<BasicSet> b)
    : sig_(std::move(sig)) {
  for (auto& x : b) add(x);
}

void PresburgerSet::add(const BasicSet& b) {
  if (b.infeasible()) return;
  for (auto& v : b.vars())
    if (std::find(sig_.begin(), sig_.end(), v) == sig_.end())
      throw SignatureMismatch("variable " + v + " not in signature");
  basics_.push_back(b);
}

bool PresburgerSet::contains(const Assignment& a) const {
  for (auto& b : basics_)
    if (b.contains(a)) return true;
  return false;
}

std::string PresburgerSet::str() const {
  if (basics_.empty()) return "false";
  if (basics_.size() == 1) return basics_[0].str();
  std::string out;
  for (size_t i = 0; i < basics_.size(); ++i) out += (i ? " || (" : "(") + basics_[i].str() + ")";
  return out;
}

namespace {

void check_sig(const PresburgerSet& a, const PresburgerSet& b) {
  std::set<std::string> x(a.signature().begin(), a.signature().end());
  std::set<std::string> y(b.signature().begin(), b.signature().end());
  if (x != y) throw SignatureMismatch("Presburger sets over different signatures");
}

}  // namespace

PresburgerSet ps_intersect(const PresburgerSet& a, const PresburgerSet& b) {
  check_sig(a, b);
  PresburgerSet r(a.signature());
  for (auto& x : a.basics())
    for (auto& y : b.basics()) {
      BasicSet z = x;
      z.intersect(y);
      r.add(z);
    }
  return r;
}

PresburgerSet ps_union(const PresburgerSet& a, const PresburgerSet& b) {
  check_sig(a, b);
  PresburgerSet r = a;
  for (auto& y : b.basics()) r.add(y);
  return r;
}

std::vector<BasicSet> bs_subtract(const BasicSet& a, const BasicSet& b) {
  if (a.infeasible()) return {};
  if (b.infeasible()) return {a};
  std::vector<BasicSet> out;
  BasicSet cur = a;
  for (auto& f : b.ineqs()) {
    BasicSet n = cur;
    n.add_ineq(-f - Rat(1));
    if (!n.infeasible()) out.push_back(n);
    cur.add_ineq(f);
    if (cur.infeasible()) return out;
  }
  for (auto& g : b.congs()) {
    for (Int k = 1; k < g.m; ++k) {
      BasicSet n = cur;
      n.add_cong(g.f - Rat(k), g.m);
      if (!n.infeasible()) out.push_back(n);
    }
    cur.add_cong(g.f, g.m);
    if (cur.infeasible()) return out;
  }
  return out;
}

std::vector<BasicSet> bs_complement(const BasicSet& b) { return bs_subtract(BasicSet(), b); }

PresburgerSet ps_subtract(const PresburgerSet& a, const PresburgerSet& b) {
  check_sig(a, b);
  PresburgerSet r(a.signature());
  for (auto& x : a.basics()) {
    std::vector<BasicSet> pieces{x};
    for (auto& y : b.basics()) {
      std::vector<BasicSet> next;
      for (auto& p : pieces)
        for (auto& q : bs_subtract(p, y)) next.push_back(q);
      pieces = std::move(next);
    }
    for (auto& p : pieces)
      if (!ps_is_empty(p)) r.add(p);
  }
  return r;
}

std::vector<BasicSet> disjointify(const std::vector<BasicSet>& bs) {
  std::vector<BasicSet> out;
  for (size_t i = 0; i < bs.size(); ++i) {
    std::vector<BasicSet> pieces{bs[i]};
    for (size_t j = 0; j < i && !pieces.empty(); ++j) {
      std::vector<BasicSet> next;
      for (auto& p : pieces)
        for (auto& q : bs_subtract(p, bs[j])) next.push_back(q);
      pieces = std::move(next);
    }
    for (auto& p : pieces)
      if (!ps_is_empty(p)) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- elimination

std::vector<ElimPiece> eliminate(const BasicSet& s, const std::string& v) {
  std::vector<ElimPiece> out;
  if (s.infeasible()) return out;
  // an equality a*v + h == 0 pins v = -h/a on the class h == 0 mod a
  for (auto& eq : s.equalities()) {
    Rat a = eq.coeff(v);
    if (a == 0) continue;
    LinForm h = eq.without(v);
    LinForm val = h * (Rat(-1) / a);
    ElimPiece p;
    p.cond = s.substitute(v, val);
    p.cond.add_cong(h, abs(a.get_num()));
    if (p.cond.infeasible()) return out;
    p.start = val;
    p.end = val;
    out.push_back(std::move(p));
    return out;
  }
  BasicSet rest;
  std::vector<std::pair<Int, LinForm>> lowers, uppers;  // (b, h): b*v + h >= 0
  std::vector<BasicSet::Cong> congs;
  for (auto& f : s.ineqs()) {
    Rat b = f.coeff(v);
    if (b == 0)
      rest.add_ineq(f);
    else if (b > 0)
      lowers.emplace_back(b.get_num(), f.without(v));
    else
      uppers.emplace_back(b.get_num(), f.without(v));
  }
  Int M = 1;
  for (auto& g : s.congs()) {
    if (g.f.has(v)) {
      congs.push_back(g);
      M = lcm(M, g.m);
    } else {
      rest.add_cong(g.f, g.m);
    }
  }
  for (Int r = 0; r < M; ++r) {
    BasicSet base = rest;
    for (auto& g : congs) base.add_cong(g.f.substitute(v, LinForm(Rat(r))), g.m);
    if (base.infeasible()) continue;
    // bounds on w where v = r + M w:  B w + H >= 0
    struct Bound {
      Int B;
      LinForm H;
    };
    std::vector<Bound> lo, hi;
    for (auto& [b, h] : lowers) lo.push_back({b * M, h + Rat(b * r)});
    for (auto& [b, h] : uppers) hi.push_back({-b * M, h + Rat(b * r)});
    // exact (rational) bounds: w >= -H/B and w <= H/B
    auto lo_exact = [&](size_t i) { return lo[i].H * (Rat(-1) / Rat(lo[i].B)); };
    auto hi_exact = [&](size_t i) { return hi[i].H * (Rat(1) / Rat(hi[i].B)); };
    std::vector<std::pair<BasicSet, std::optional<LinForm>>> lo_choices, hi_choices;
    if (lo.empty()) lo_choices.push_back({BasicSet(), std::nullopt});
    for (size_t i = 0; i < lo.size(); ++i) {
      for (Int rho = 0; rho < lo[i].B; ++rho) {
        BasicSet c;
        c.add_cong(lo[i].H - Rat(rho), lo[i].B);
        if (c.infeasible()) continue;
        LinForm bound = (LinForm(Rat(rho)) - lo[i].H) * (Rat(1) / Rat(lo[i].B));  // = ceil(-H/B)
        for (size_t j = 0; j < lo.size() && !c.infeasible(); ++j) {
          if (j == i) continue;
          LinForm d = bound - lo_exact(j);
          if (j < i) d -= Rat(1);
          c.add_ineq(d);
        }
        if (!c.infeasible()) lo_choices.push_back({c, bound});
      }
    }
    if (hi.empty()) hi_choices.push_back({BasicSet(), std::nullopt});
    for (size_t i = 0; i < hi.size(); ++i) {
      for (Int rho = 0; rho < hi[i].B; ++rho) {
        BasicSet c;
        c.add_cong(hi[i].H - Rat(rho), hi[i].B);
        if (c.infeasible()) continue;
        LinForm bound = (hi[i].H - Rat(rho)) * (Rat(1) / Rat(hi[i].B));  // = floor(H/B)
        for (size_t j = 0; j < hi.size() && !c.infeasible(); ++j) {
          if (j == i) continue;
          LinForm d = hi_exact(j) - bound;
          if (j < i) d -= Rat(1);
          c.add_ineq(d);
        }
        if (!c.infeasible()) hi_choices.push_back({c, bound});
      }
    }
    for (auto& [lc, lb] : lo_choices) {
      for (auto& [hc, hb] : hi_choices) {
        ElimPiece p;
        p.cond = base;
        p.cond.intersect(lc);
        p.cond.intersect(hc);
        if (lb && hb) p.cond.add_ineq(*hb - *lb);
        if (p.cond.infeasible()) continue;
        if (lb) p.start = LinForm(Rat(r)) + *lb * Rat(M);
        if (hb) p.end = LinForm(Rat(r)) + *hb * Rat(M);
        p.step = M;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

namespace {

bool is_empty_uncached(const BasicSet& s);

}  // namespace

bool ps_is_empty(const BasicSet& s) {
  if (s.infeasible()) return true;
  if (s.ineqs().empty() && s.congs().empty()) return false;
  thread_local std::map<BasicSet, bool> cache;
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  bool r = is_empty_uncached(s);
  if (cache.size() > 200000) cache.clear();
  cache.emplace(s, r);
  return r;
}

namespace {

bool is_empty_uncached(const BasicSet& s) {
  auto vars = s.vars();
  // eliminate the variable producing the fewest pieces
  std::string best;
  size_t best_n = SIZE_MAX;
  for (auto& v : vars) {
    size_t lo = 0, hi = 0, m = 1;
    for (auto& f : s.ineqs()) {
      if (f.coeff(v) > 0) lo += to_long(abs(f.coeff(v).get_num()));
      if (f.coeff(v) < 0) hi += to_long(abs(f.coeff(v).get_num()));
    }
    for (auto& g : s.congs())
      if (g.f.has(v)) m *= to_long(g.m);
    size_t n = m * std::max<size_t>(lo, 1) * std::max<size_t>(hi, 1);
    for (auto& eq : s.equalities())
      if (eq.has(v)) n = std::min<size_t>(n, to_long(abs(eq.coeff(v).get_num())));
    if (n < best_n) {
      best_n = n;
      best = v;
    }
  }
  for (auto& p : eliminate(s, best))
    if (!ps_is_empty(p.cond)) return false;
  return true;
}

}  // namespace

bool ps_is_empty(const PresburgerSet& s) {
  for (auto& b : s.basics())
    if (!ps_is_empty(b)) return false;
  return true;
}

std::vector<BasicSet> project_out(const BasicSet& s, const std::string& v) {
  std::vector<BasicSet> out;
  for (auto& p : eliminate(s, v))
    if (!ps_is_empty(p.cond)) out.push_back(p.cond);
  return out;
}

MinResult ps_min(const BasicSet& s, const LinForm& f) {
  if (ps_is_empty(s)) return EmptySet{};
  const std::string z = "__min";
  Int D = f.denominator();
  BasicSet t = s;
  t.add_eq(LinForm::var(z) - f * Rat(D));
  // Elimination is exact, so intermediate pieces need no emptiness test:
  // the final pieces are variable-free and decided by normalization.
  std::vector<BasicSet> sets{t};
  for (auto& v : t.vars()) {
    if (v == z) continue;
    std::vector<BasicSet> next;
    for (auto& b : sets)
      for (auto& p : eliminate(b, v)) next.push_back(p.cond);
    sets = std::move(next);
  }
  std::optional<Rat> best;
  for (auto& b : sets) {
    for (auto& p : eliminate(b, z)) {
      if (ps_is_empty(p.cond)) continue;
      if (!p.start) return Unbounded{};
      Rat x = p.start->constant();
      if (!best || x < *best) best = x;
    }
  }
  if (!best) return EmptySet{};
  return *best / Rat(D);
}

MinResult ps_min(const PresburgerSet& s, const LinForm& f) {
  MinResult acc = EmptySet{};
  for (auto& b : s.basics()) {
    MinResult r = ps_min(b, f);
    if (std::holds_alternative<Unbounded>(r)) return r;
    if (auto* x = std::get_if<Rat>(&r)) {
      if (auto* y = std::get_if<Rat>(&acc)) {
        if (*x < *y) acc = *x;
      } else {
        acc = *x;
      }
    }
  }
  return acc;
}

MinResult ps_max(const BasicSet& s, const LinForm& f) {
  MinResult r = ps_min(s, -f);
  if (auto* x = std::get_if<Rat>(&r)) return Rat(-*x);
  return r;
}

}  // namespace mk
