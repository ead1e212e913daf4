#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mk/arith.hpp"
#include "mk/cyclotomic.hpp"
#include "mk/laurent.hpp"

namespace mk {

/// Dense integer polynomial in L, lowest degree first, no trailing zeros.
class LPoly {
 public:
  LPoly() = default;
  LPoly(const Int& c) {  // NOLINT
    if (c != 0) c_.push_back(c);
  }
  explicit LPoly(std::vector<Int> c) : c_(std::move(c)) { trim(); }
  static LPoly monomial(const Int& c, int deg);

  const std::vector<Int>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Int coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Int(0); }
  /// Lowest index with a nonzero coefficient.
  int low_degree() const;

  LPoly operator-() const;
  friend LPoly operator+(const LPoly& a, const LPoly& b);
  friend LPoly operator-(const LPoly& a, const LPoly& b) { return a + (-b); }
  friend LPoly operator*(const LPoly& a, const LPoly& b);
  LPoly shifted(int k) const;  // multiply by L^k, k >= -low_degree()
  /// Exact quotient by a monic divisor, or false if it does not divide.
  bool div_exact(const LPoly& monic, LPoly& quot) const;
  Rat eval(const Rat& q) const;

  friend bool operator==(const LPoly& a, const LPoly& b) { return a.c_ == b.c_; }
  friend bool operator<(const LPoly& a, const LPoly& b) { return a.c_ < b.c_; }

  std::string str() const;

 private:
  void trim();
  std::vector<Int> c_;
};

/// n-th cyclotomic polynomial in L.
const LPoly& cyclotomic_poly(int n);

/// num / (L^s * prod_n Phi_n^{e_n}); s may be negative.
class LFraction {
 public:
  LFraction() = default;
  LFraction(const Int& c) : num_(c) {}  // NOLINT
  LFraction(long c) : num_(Int(c)) {}   // NOLINT
  LFraction(LPoly num, int s, std::map<int, int> den);

  /// L^k
  static LFraction Lpow(int k);
  /// 1 / (1 - L^k), k != 0
  static LFraction geom(int k);
  /// 1 / (L^k - 1), k >= 1
  static LFraction inv_Lk_minus_1(int k);

  const LPoly& num() const { return num_; }
  int denL() const { return s_; }
  const std::map<int, int>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;

  LFraction operator-() const;
  friend LFraction operator+(const LFraction& a, const LFraction& b);
  friend LFraction operator-(const LFraction& a, const LFraction& b) { return a + (-b); }
  friend LFraction operator*(const LFraction& a, const LFraction& b);
  LFraction& operator+=(const LFraction& o) { return *this = *this + o; }
  LFraction& operator*=(const LFraction& o) { return *this = *this * o; }
  LFraction pow(int k) const;
  /// Exact division of the numerator by an integer; throws if inexact.
  LFraction div_exact(const Int& d) const;
  /// Inverse when the numerator is +-L^j times cyclotomic factors.
  bool try_inverse(LFraction& out) const;

  Rat eval(const Rat& q) const;

  friend bool operator==(const LFraction& a, const LFraction& b) {
    return a.num_ == b.num_ && a.s_ == b.s_ && a.den_ == b.den_;
  }

  std::string str() const;

 private:
  void normalize();
  LPoly num_;
  int s_ = 0;
  std::map<int, int> den_;
};

/// Formal character value E(tail): exponents <= 0, t^0 part is the residue character.
class CharSymbol {
 public:
  CharSymbol() = default;
  /// Truncates exponents > 0.
  static CharSymbol of(const LaurentConst& a);
  /// e^u
  static CharSymbol residue(const Rat& u);

  const std::map<int, Rat>& tail() const { return tail_; }
  bool is_trivial() const { return tail_.empty(); }
  Rat coeff(int j) const;

  CharSymbol operator-() const;
  friend CharSymbol operator+(const CharSymbol& a, const CharSymbol& b);
  friend bool operator==(const CharSymbol& a, const CharSymbol& b) { return a.tail_ == b.tail_; }
  friend bool operator<(const CharSymbol& a, const CharSymbol& b) { return a.tail_ < b.tail_; }

  /// "e[2]E[-1:1]", "" for the identity
  std::string str() const;

 private:
  std::map<int, Rat> tail_;
};

class ValueRingElem {
 public:
  ValueRingElem() = default;
  ValueRingElem(const LFraction& f);  // NOLINT
  ValueRingElem(long c) : ValueRingElem(LFraction(c)) {}  // NOLINT
  ValueRingElem(const LFraction& f, const CharSymbol& s);
  static ValueRingElem symbol(const CharSymbol& s) { return ValueRingElem(LFraction(1), s); }
  /// E(a) with truncation
  static ValueRingElem E(const LaurentConst& a) { return symbol(CharSymbol::of(a)); }
  static ValueRingElem e(const Rat& u) { return symbol(CharSymbol::residue(u)); }
  static ValueRingElem Lpow(int k) { return ValueRingElem(LFraction::Lpow(k)); }

  const std::map<CharSymbol, LFraction>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const LFraction& f, const CharSymbol& s);

  ValueRingElem operator-() const;
  friend ValueRingElem operator+(const ValueRingElem& a, const ValueRingElem& b);
  friend ValueRingElem operator-(const ValueRingElem& a, const ValueRingElem& b) { return a + (-b); }
  friend ValueRingElem operator*(const ValueRingElem& a, const ValueRingElem& b);
  ValueRingElem& operator+=(const ValueRingElem& o);
  ValueRingElem& operator*=(const ValueRingElem& o) { return *this = *this * o; }
  bool try_inverse(ValueRingElem& out) const;
  ValueRingElem div_exact(const Int& d) const;

  friend bool operator==(const ValueRingElem& a, const ValueRingElem& b) { return a.terms_ == b.terms_; }

  std::string str() const;
  static ValueRingElem parse(const std::string& s);
  nlohmann::json to_json() const;
  static ValueRingElem from_json(const nlohmann::json& j);

 private:
  std::map<CharSymbol, LFraction> terms_;
};

using RawSum = std::vector<std::pair<LFraction, CharSymbol>>;

ValueRingElem vr_normalize(const RawSum& raw);
inline ValueRingElem vr_add(const ValueRingElem& u, const ValueRingElem& v) { return u + v; }
inline ValueRingElem vr_mul(const ValueRingElem& u, const ValueRingElem& v) { return u * v; }
inline ValueRingElem vr_neg(const ValueRingElem& u) { return -u; }
inline bool vr_eq(const ValueRingElem& u, const ValueRingElem& v) { return u == v; }

using CharAssignment = std::function<Cyclotomic(const CharSymbol&)>;
Cyclotomic vr_eval_at(const ValueRingElem& v, const Rat& q, const CharAssignment& sigma);

}  // namespace mk
