#include "mk/laurent.hpp"

#include <cctype>

namespace mk {

LaurentConst LaurentConst::monomial(const Rat& c, int exp) {
  LaurentConst r;
  r.set(exp, c);
  return r;
}

Rat LaurentConst::coeff(int j) const {
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? Rat(0) : it->second;
}

void LaurentConst::set(int j, const Rat& c) {
  if (c == 0)
    coeffs_.erase(j);
  else
    coeffs_[j] = c;
}

int LaurentConst::ord() const {
  if (coeffs_.empty()) throw Error("ord of zero Laurent constant");
  return coeffs_.begin()->first;
}

Rat LaurentConst::ac() const {
  if (coeffs_.empty()) throw Error("ac of zero Laurent constant");
  return coeffs_.begin()->second;
}

LaurentConst LaurentConst::truncated_above(int k) const {
  LaurentConst r;
  for (auto& [j, c] : coeffs_)
    if (j <= k) r.coeffs_.emplace(j, c);
  return r;
}

LaurentConst LaurentConst::operator-() const {
  LaurentConst r = *this;
  for (auto& [j, c] : r.coeffs_) c = -c;
  return r;
}

LaurentConst& LaurentConst::operator+=(const LaurentConst& o) {
  for (auto& [j, c] : o.coeffs_) set(j, coeff(j) + c);
  return *this;
}

LaurentConst& LaurentConst::operator-=(const LaurentConst& o) {
  for (auto& [j, c] : o.coeffs_) set(j, coeff(j) - c);
  return *this;
}

LaurentConst operator*(const LaurentConst& a, const LaurentConst& b) {
  LaurentConst r;
  for (auto& [i, x] : a.coeffs_)
    for (auto& [j, y] : b.coeffs_) r.set(i + j, r.coeff(i + j) + x * y);
  return r;
}

LaurentConst LaurentConst::div_monomial(const LaurentConst& m) const {
  if (!m.is_monomial()) throw Error("division by a non-monomial Laurent constant");
  auto [k, c] = *m.coeffs_.begin();
  LaurentConst r;
  for (auto& [j, x] : coeffs_) r.coeffs_.emplace(j - k, x / c);
  return r;
}

std::string LaurentConst::str() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& [j, c] : coeffs_) {
    Rat a = c;
    if (!first) {
      out += a < 0 ? " - " : " + ";
      if (a < 0) a = -a;
    } else if (a < 0 && j != 0 && a == -1) {
      out += "-";
      a = 1;
    }
    first = false;
    if (j == 0) {
      out += to_string(a);
    } else {
      if (a != 1) out += to_string(a) + "*";
      out += j == 1 ? "t" : "t^" + std::to_string(j);
    }
  }
  return out;
}

namespace {

struct LaurentReader {
  const std::string& s;
  size_t i = 0;

  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char ch) {
    ws();
    if (i < s.size() && s[i] == ch) {
      ++i;
      return true;
    }
    return false;
  }
  long integer() {
    ws();
    size_t st = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (digits == i || i - digits > 9) throw Error("bad exponent in Laurent constant: " + s);
    return std::stol(s.substr(st, i - st));
  }
  Rat number() {
    ws();
    size_t st = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
    return parse_rat(s.substr(st, i - st));
  }
  // term := [number ['*']] ['t' ['^' int]]
  LaurentConst term() {
    ws();
    Rat c = 1;
    bool have_num = false;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      c = number();
      have_num = true;
      eat('*');
    }
    ws();
    if (i < s.size() && s[i] == 't') {
      ++i;
      int e = 1;
      if (eat('^')) {
        if (eat('(')) {
          e = static_cast<int>(integer());
          if (!eat(')')) throw Error("expected ')' in " + s);
        } else {
          e = static_cast<int>(integer());
        }
      }
      return LaurentConst::monomial(c, e);
    }
    if (!have_num) throw Error("bad Laurent constant: " + s);
    return LaurentConst(c);
  }
};

}  // namespace

LaurentConst LaurentConst::parse(const std::string& s) {
  LaurentReader r{s};
  LaurentConst out;
  bool neg = r.eat('-');
  if (!neg) r.eat('+');
  out += neg ? -r.term() : r.term();
  for (;;) {
    if (r.eat('+'))
      out += r.term();
    else if (r.eat('-'))
      out -= r.term();
    else
      break;
  }
  r.ws();
  if (r.i != s.size()) throw Error("trailing input in Laurent constant: " + s);
  return out;
}

}  // namespace mk
