#pragma once

#include <map>
#include <optional>
#include <string>

#include "mk/arith.hpp"

namespace mk {

/// A finite Laurent polynomial sum_j c_j t^j with rational coefficients.
/// Houses centers, phase coefficients and symbolic points of K((t)).
class LaurentConst {
 public:
  LaurentConst() = default;
  LaurentConst(const Rat& c) { set(0, c); }  // NOLINT: constants convert
  LaurentConst(long c) : LaurentConst(Rat(c)) {}

  static LaurentConst monomial(const Rat& c, int exp);
  /// t^k
  static LaurentConst t(int k) { return monomial(1, k); }

  const std::map<int, Rat>& coeffs() const { return coeffs_; }
  Rat coeff(int j) const;
  void set(int j, const Rat& c);

  bool is_zero() const { return coeffs_.empty(); }
  bool is_monomial() const { return coeffs_.size() == 1; }

  /// Lowest exponent; throws on zero.
  int ord() const;
  /// Leading coefficient (the angular component); throws on zero.
  Rat ac() const;

  /// Keeps only exponents <= k.
  LaurentConst truncated_above(int k) const;

  LaurentConst operator-() const;
  LaurentConst& operator+=(const LaurentConst& o);
  LaurentConst& operator-=(const LaurentConst& o);
  friend LaurentConst operator+(LaurentConst a, const LaurentConst& b) { return a += b; }
  friend LaurentConst operator-(LaurentConst a, const LaurentConst& b) { return a -= b; }
  friend LaurentConst operator*(const LaurentConst& a, const LaurentConst& b);

  /// Exact division by a monomial c t^k.
  LaurentConst div_monomial(const LaurentConst& m) const;

  friend bool operator==(const LaurentConst& a, const LaurentConst& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator<(const LaurentConst& a, const LaurentConst& b) {
    return a.coeffs_ < b.coeffs_;
  }

  /// "2 + 3*t - t^-1" style, lowest exponent first.
  std::string str() const;
  /// Parses the output of str() and simple variants ("t^-2", "1/2*t", "-t").
  static LaurentConst parse(const std::string& s);

 private:
  std::map<int, Rat> coeffs_;
};

}  // namespace mk
