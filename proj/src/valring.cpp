#include "mk/valring.hpp"

#include <cctype>
#include <mutex>

namespace mk {

// ---------------------------------------------------------------- LPoly

void LPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

LPoly LPoly::monomial(const Int& c, int deg) {
  std::vector<Int> v(deg + 1);
  v[deg] = c;
  return LPoly(std::move(v));
}

int LPoly::low_degree() const {
  for (size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0) return static_cast<int>(i);
  return 0;
}

LPoly LPoly::operator-() const {
  LPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

LPoly operator+(const LPoly& a, const LPoly& b) {
  std::vector<Int> v(std::max(a.c_.size(), b.c_.size()));
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return LPoly(std::move(v));
}

LPoly operator*(const LPoly& a, const LPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Int> v(a.c_.size() + b.c_.size() - 1);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  }
  return LPoly(std::move(v));
}

LPoly LPoly::shifted(int k) const {
  if (is_zero()) return {};
  if (k >= 0) {
    std::vector<Int> v(k, Int(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return LPoly(std::move(v));
  }
  if (-k > low_degree()) throw Error("LPoly shift below degree 0");
  return LPoly(std::vector<Int>(c_.begin() + (-k), c_.end()));
}

bool LPoly::div_exact(const LPoly& d, LPoly& quot) const {
  if (is_zero()) {
    quot = {};
    return true;
  }
  const int dd = d.degree();
  if (degree() < dd) return false;
  std::vector<Int> r = c_;
  std::vector<Int> q(degree() - dd + 1);
  for (int k = degree(); k >= dd; --k) {
    Int c = r[k];
    if (c == 0) continue;
    q[k - dd] = c;
    for (int i = 0; i <= dd; ++i) r[k - dd + i] -= c * d.c_[i];
  }
  for (int i = 0; i < dd; ++i)
    if (r[i] != 0) return false;
  quot = LPoly(std::move(q));
  return true;
}

Rat LPoly::eval(const Rat& q) const {
  Rat acc = 0;
  for (int i = degree(); i >= 0; --i) acc = acc * q + Rat(c_[i]);
  return acc;
}

std::string LPoly::str() const {
  if (is_zero()) return "0";
  std::string out;
  for (int i = degree(); i >= 0; --i) {
    Int c = c_[i];
    if (c == 0) continue;
    if (!out.empty()) {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    } else if (c < 0 && i > 0 && c == -1) {
      out += "-";
      c = 1;
    }
    if (i == 0) {
      out += c.get_str();
    } else {
      if (c != 1) out += c.get_str() + "*";
      out += i == 1 ? "L" : "L^" + std::to_string(i);
    }
  }
  return out;
}

const LPoly& cyclotomic_poly(int n) {
  static std::mutex mu;
  static std::map<int, LPoly> cache;
  if (n < 1) throw Error("cyclotomic index must be positive");
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  LPoly p = LPoly::monomial(1, n) - LPoly(Int(1));
  for (int d = 1; d < n; ++d) {
    if (n % d) continue;
    LPoly q;
    if (!p.div_exact(cyclotomic_poly(d), q)) throw Error("cyclotomic division failed");
    p = q;
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(n, std::move(p)).first->second;
}

// ---------------------------------------------------------------- LFraction

LFraction::LFraction(LPoly num, int s, std::map<int, int> den)
    : num_(std::move(num)), s_(s), den_(std::move(den)) {
  normalize();
}

void LFraction::normalize() {
  if (num_.is_zero()) {
    s_ = 0;
    den_.clear();
    return;
  }
  int k = num_.low_degree();
  if (k) {
    num_ = num_.shifted(-k);
    s_ -= k;
  }
  for (auto it = den_.begin(); it != den_.end();) {
    if (it->second < 0) throw Error("negative cyclotomic exponent in denominator");
    LPoly q;
    while (it->second > 0 && num_.div_exact(cyclotomic_poly(it->first), q)) {
      num_ = q;
      --it->second;
    }
    it = it->second == 0 ? den_.erase(it) : std::next(it);
  }
}

LFraction LFraction::Lpow(int k) { return LFraction(LPoly(Int(1)), -k, {}); }

LFraction LFraction::inv_Lk_minus_1(int k) {
  if (k < 1) throw Error("inv_Lk_minus_1 needs k >= 1");
  std::map<int, int> den;
  for (int d = 1; d <= k; ++d)
    if (k % d == 0) den[d] = 1;
  return LFraction(LPoly(Int(1)), 0, std::move(den));
}

LFraction LFraction::geom(int k) {
  if (k == 0) throw Error("geom(0) diverges");
  if (k > 0) return -inv_Lk_minus_1(k);
  return Lpow(-k) * inv_Lk_minus_1(-k);
}

bool LFraction::is_one() const {
  return s_ == 0 && den_.empty() && num_ == LPoly(Int(1));
}

LFraction LFraction::operator-() const {
  LFraction r = *this;
  r.num_ = -r.num_;
  return r;
}

LFraction operator+(const LFraction& a, const LFraction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::map<int, int> den = a.den_;
  for (auto& [n, e] : b.den_) den[n] = std::max(den[n], e);
  const int s = std::max(a.s_, b.s_);
  auto lift = [&](const LFraction& x) {
    LPoly p = x.num_.shifted(s - x.s_);
    for (auto& [n, e] : den) {
      auto it = x.den_.find(n);
      int have = it == x.den_.end() ? 0 : it->second;
      for (int i = have; i < e; ++i) p = p * cyclotomic_poly(n);
    }
    return p;
  };
  LPoly num = lift(a) + lift(b);
  return LFraction(std::move(num), s, std::move(den));
}

LFraction operator*(const LFraction& a, const LFraction& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::map<int, int> den = a.den_;
  for (auto& [n, e] : b.den_) den[n] += e;
  return LFraction(a.num_ * b.num_, a.s_ + b.s_, std::move(den));
}

LFraction LFraction::pow(int k) const {
  if (k < 0) {
    LFraction inv;
    if (!try_inverse(inv)) throw Error("not a unit in the value ring: " + str());
    return inv.pow(-k);
  }
  LFraction r(1), b = *this;
  while (k) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

LFraction LFraction::div_exact(const Int& d) const {
  std::vector<Int> c = num_.coeffs();
  for (auto& x : c) {
    if (x % d != 0) throw Error("inexact division of " + str() + " by " + d.get_str());
    x /= d;
  }
  LFraction r = *this;
  r.num_ = LPoly(std::move(c));
  return r;
}

namespace {

int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

}  // namespace

bool LFraction::try_inverse(LFraction& out) const {
  if (is_zero()) return false;
  LPoly rem = num_;
  std::map<int, int> fac;
  const int deg = rem.degree();
  const int bound = 2 * deg * deg + 2;
  for (int n = 1; n <= bound && rem.degree() > 0; ++n) {
    if (euler_phi(n) > rem.degree()) continue;
    LPoly q;
    while (rem.degree() > 0 && rem.div_exact(cyclotomic_poly(n), q)) {
      rem = q;
      ++fac[n];
    }
  }
  if (rem.degree() != 0 || (rem.coeff(0) != 1 && rem.coeff(0) != -1)) return false;
  LPoly top = rem;
  for (auto& [n, e] : den_)
    for (int i = 0; i < e; ++i) top = top * cyclotomic_poly(n);
  out = LFraction(top, -s_, fac);
  return true;
}

Rat LFraction::eval(const Rat& q) const {
  Rat v = num_.eval(q);
  Rat qs = 1;
  for (int i = 0; i < std::abs(s_); ++i) qs *= q;
  if (s_ > 0) v /= qs;
  if (s_ < 0) v *= qs;
  for (auto& [n, e] : den_) {
    Rat d = cyclotomic_poly(n).eval(q);
    if (d == 0) throw Error("evaluation at a root of a denominator");
    for (int i = 0; i < e; ++i) v /= d;
  }
  return v;
}

std::string LFraction::str() const {
  if (is_zero()) return "0";
  std::vector<std::string> parts;
  for (auto& [n, e] : den_) parts.push_back("Phi(" + std::to_string(n) + ")^-" + std::to_string(e));
  if (s_ == -1)
    parts.push_back("L");
  else if (s_ != 0)
    parts.push_back("L^" + std::to_string(-s_));
  std::string head;
  if (num_.degree() > 0) {
    parts.insert(parts.begin(), "(" + num_.str() + ")");
  } else {
    Int c = num_.coeff(0);
    if (parts.empty())
      return c.get_str();
    if (c == -1)
      head = "-";
    else if (c != 1)
      parts.insert(parts.begin(), c.get_str());
  }
  std::string out = head;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? " * " : "") + parts[i];
  return out;
}

// ---------------------------------------------------------------- CharSymbol

CharSymbol CharSymbol::of(const LaurentConst& a) {
  CharSymbol s;
  for (auto& [j, c] : a.coeffs())
    if (j <= 0) s.tail_[j] = c;
  return s;
}

CharSymbol CharSymbol::residue(const Rat& u) {
  CharSymbol s;
  if (u != 0) s.tail_[0] = u;
  return s;
}

Rat CharSymbol::coeff(int j) const {
  auto it = tail_.find(j);
  return it == tail_.end() ? Rat(0) : it->second;
}

CharSymbol CharSymbol::operator-() const {
  CharSymbol r = *this;
  for (auto& [j, c] : r.tail_) c = -c;
  return r;
}

CharSymbol operator+(const CharSymbol& a, const CharSymbol& b) {
  CharSymbol r = a;
  for (auto& [j, c] : b.tail_) {
    Rat v = r.coeff(j) + c;
    if (v == 0)
      r.tail_.erase(j);
    else
      r.tail_[j] = v;
  }
  return r;
}

std::string CharSymbol::str() const {
  std::string out;
  auto it0 = tail_.find(0);
  if (it0 != tail_.end()) out += "e[" + to_string(it0->second) + "]";
  std::string neg;
  for (auto it = tail_.rbegin(); it != tail_.rend(); ++it) {
    if (it->first == 0) continue;
    if (!neg.empty()) neg += ",";
    neg += std::to_string(it->first) + ":" + to_string(it->second);
  }
  if (!neg.empty()) out += "E[" + neg + "]";
  return out;
}

// ---------------------------------------------------------------- ValueRingElem

ValueRingElem::ValueRingElem(const LFraction& f) { add_term(f, CharSymbol()); }

ValueRingElem::ValueRingElem(const LFraction& f, const CharSymbol& s) { add_term(f, s); }

void ValueRingElem::add_term(const LFraction& f, const CharSymbol& s) {
  if (f.is_zero()) return;
  auto it = terms_.find(s);
  if (it == terms_.end()) {
    terms_.emplace(s, f);
    return;
  }
  it->second += f;
  if (it->second.is_zero()) terms_.erase(it);
}

ValueRingElem ValueRingElem::operator-() const {
  ValueRingElem r = *this;
  for (auto& [s, f] : r.terms_) f = -f;
  return r;
}

ValueRingElem& ValueRingElem::operator+=(const ValueRingElem& o) {
  for (auto& [s, f] : o.terms_) add_term(f, s);
  return *this;
}

ValueRingElem operator+(const ValueRingElem& a, const ValueRingElem& b) {
  ValueRingElem r = a;
  return r += b;
}

ValueRingElem operator*(const ValueRingElem& a, const ValueRingElem& b) {
  ValueRingElem r;
  for (auto& [sa, fa] : a.terms_)
    for (auto& [sb, fb] : b.terms_) r.add_term(fa * fb, sa + sb);
  return r;
}

bool ValueRingElem::try_inverse(ValueRingElem& out) const {
  if (terms_.size() != 1) return false;
  LFraction inv;
  if (!terms_.begin()->second.try_inverse(inv)) return false;
  out = ValueRingElem(inv, -terms_.begin()->first);
  return true;
}

ValueRingElem ValueRingElem::div_exact(const Int& d) const {
  ValueRingElem r;
  for (auto& [s, f] : terms_) r.terms_.emplace(s, f.div_exact(d));
  return r;
}

std::string ValueRingElem::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto& [s, f] : terms_) {
    std::string t;
    if (s.is_trivial())
      t = f.str();
    else if (f.is_one())
      t = s.str();
    else if (f == LFraction(-1))
      t = "-" + s.str();
    else
      t = f.str() + " * " + s.str();
    if (!out.empty()) out += " + ";
    out += t;
  }
  return out;
}

namespace {

struct VrReader {
  const std::string& s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw Error("value ring parse error at " + std::to_string(i) + " (" + what + "): " + s);
  }
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool peek(char c) {
    ws();
    return i < s.size() && s[i] == c;
  }
  bool eat(char c) {
    if (!peek(c)) return false;
    ++i;
    return true;
  }
  bool eat_word(const std::string& w) {
    ws();
    if (s.compare(i, w.size(), w) == 0) {
      i += w.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  long integer() {
    ws();
    size_t st = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (digits == i || i - digits > 9) fail("integer");
    return std::stol(s.substr(st, i - st));
  }
  Rat rational() {
    ws();
    size_t st = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
    std::string tok = s.substr(st, i - st);
    if (!tok.empty() && tok[0] == '+') tok = tok.substr(1);
    return parse_rat(tok);
  }

  ValueRingElem expr() {
    ValueRingElem v = eat('-') ? -term() : term();
    for (;;) {
      if (eat('+'))
        v += term();
      else if (eat('-'))
        v += -term();
      else
        return v;
    }
  }
  ValueRingElem term() {
    if (eat('-')) return -term();
    ValueRingElem v = factor();
    // symbols may be juxtaposed: e[2]E[-1:1]
    while (eat('*') || peek('E') || peek('e')) v *= factor();
    return v;
  }
  ValueRingElem factor() {
    ValueRingElem b = primary();
    if (!eat('^')) return b;
    long k;
    if (eat('(')) {
      k = integer();
      expect(')');
    } else {
      k = integer();
    }
    if (k < 0) {
      ValueRingElem inv;
      if (!b.try_inverse(inv)) fail("negative power of a non-unit");
      b = inv;
      k = -k;
    }
    ValueRingElem r(1);
    for (long j = 0; j < k; ++j) r *= b;
    return r;
  }
  ValueRingElem primary() {
    ws();
    if (i >= s.size()) fail("unexpected end");
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t st = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      return ValueRingElem(LFraction(Int(s.substr(st, i - st))));
    }
    if (eat_word("Phi(")) {
      long n = integer();
      expect(')');
      return ValueRingElem(LFraction(cyclotomic_poly(static_cast<int>(n)), 0, {}));
    }
    if (eat_word("e[")) {
      Rat u = rational();
      expect(']');
      return ValueRingElem::e(u);
    }
    if (eat_word("E[")) {
      LaurentConst a;
      if (!peek(']')) {
        do {
          long j = integer();
          expect(':');
          Rat c = rational();
          if (j > 0) fail("positive exponent in character tail");
          a += LaurentConst::monomial(c, static_cast<int>(j));
        } while (eat(','));
      }
      expect(']');
      return ValueRingElem::E(a);
    }
    if (eat('L')) return ValueRingElem::Lpow(1);
    if (eat('(')) {
      ValueRingElem v = expr();
      expect(')');
      return v;
    }
    fail("unexpected character");
  }
};

nlohmann::json int_json(const Int& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

nlohmann::json rat_json(const Rat& x) {
  if (x.get_den() == 1) return int_json(x.get_num());
  return to_string(x);
}

Rat json_rat(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  return parse_rat(j.get<std::string>());
}

}  // namespace

ValueRingElem ValueRingElem::parse(const std::string& s) {
  VrReader r{s};
  ValueRingElem v = r.expr();
  r.ws();
  if (r.i != s.size()) r.fail("trailing input");
  return v;
}

nlohmann::json ValueRingElem::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [sym, f] : terms_) {
    nlohmann::json num = nlohmann::json::array();
    for (auto& c : f.num().coeffs()) num.push_back(int_json(c));
    nlohmann::json den = nlohmann::json::array();
    for (auto& [n, e] : f.den()) den.push_back({n, e});
    nlohmann::json tail = nlohmann::json::object();
    for (auto& [j, c] : sym.tail()) tail[std::to_string(j)] = rat_json(c);
    terms.push_back({{"num", num}, {"denL", f.denL()}, {"denFactors", den}, {"tail", tail}});
  }
  return {{"terms", terms}, {"text", str()}};
}

ValueRingElem ValueRingElem::from_json(const nlohmann::json& j) {
  ValueRingElem v;
  for (auto& t : j.at("terms")) {
    std::vector<Int> num;
    for (auto& c : t.at("num")) num.push_back(c.is_number_integer() ? Int(c.get<long>()) : Int(c.get<std::string>()));
    std::map<int, int> den;
    for (auto& d : t.at("denFactors")) den[d.at(0).get<int>()] += d.at(1).get<int>();
    LaurentConst a;
    for (auto& [k, c] : t.at("tail").items()) a += LaurentConst::monomial(json_rat(c), std::stoi(k));
    v.add_term(LFraction(LPoly(std::move(num)), t.at("denL").get<int>(), std::move(den)), CharSymbol::of(a));
  }
  return v;
}

ValueRingElem vr_normalize(const RawSum& raw) {
  ValueRingElem v;
  for (auto& [f, s] : raw) v.add_term(f, s);
  return v;
}

Cyclotomic vr_eval_at(const ValueRingElem& v, const Rat& q, const CharAssignment& sigma) {
  Cyclotomic out;
  for (auto& [s, f] : v.terms()) {
    Cyclotomic c(f.eval(q));
    if (!s.is_trivial()) c *= sigma(s);
    out += c;
  }
  return out;
}

}  // namespace mk
