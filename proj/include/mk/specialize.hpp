#pragma once

#include <map>
#include <string>

#include "mk/cef.hpp"
#include "mk/cyclotomic.hpp"

namespace mk {

/// A local field with residue field F_p and a chosen additive character.
struct FieldSpec {
  enum Kind { Qp, Fpt };
  long p = 2;
  Kind kind = Qp;
  /// Q_p: psi(x) = exp(2 pi i frac(unit * x / p)); unit = 1 mod p.
  Rat unit = 1;
  /// F_p((t)): psi(x) = exp(2 pi i (x_0 + sum_j mult[j] x_j) / p), j < 0.
  std::map<int, long> mult;

  /// Throws Error on a non-prime p or invalid twist data.
  void validate() const;
  std::string str() const;
  /// "qp" / "fpt"
  static Kind parse_kind(const std::string& s);
};

/// psi_K(a) for the symbol E(a) (only exponents <= 0 matter).
Cyclotomic spec_char(const CharSymbol& s, const FieldSpec& K);

/// L -> p and characters through psi_K. Throws BadPrime when p is in bad.
Cyclotomic spec_value(const ValueRingElem& v, const FieldSpec& K, const PrimeSet& bad = {});

/// Pointwise value over K. Points are Laurent polynomials read through
/// t -> p on Q_p and coefficientwise mod p on F_p((t)).
Cyclotomic spec_cef_at(const CEF& f, const FieldSpec& K, const Point& pt,
                       const Assignment& params = {});

/// Bad primes of a function: its recorded set plus the primes of every constant it mentions.
PrimeSet bad_primes(const CEF& f);
PrimeSet bad_primes(const ValueRingElem& v);

}  // namespace mk
