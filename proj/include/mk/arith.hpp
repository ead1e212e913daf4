#pragma once

#include <gmpxx.h>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mk {

using Int = mpz_class;
using Rat = mpq_class;

/// Finite set of primes collected while a symbolic computation decided that
/// some rational constant is nonzero or invertible.
using PrimeSet = std::set<Int>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SignatureMismatch : Error {
  using Error::Error;
};

struct UnsupportedPhase : Error {
  using Error::Error;
};

struct CenterCoincident : Error {
  using Error::Error;
};

struct PrecisionExhausted : Error {
  using Error::Error;
};

struct TailNotConvergent : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

/// A sum diverging for some q > 1: along `var` in direction `direction`
/// (+1 or -1) the L-exponent does not decrease.
struct NotIntegrable : Error {
  NotIntegrable(std::string var, int direction, const std::string& detail = "")
      : Error("not integrable along " + std::string(direction > 0 ? "+" : "-") + var +
              (detail.empty() ? "" : ": " + detail)),
        var(std::move(var)),
        direction(direction) {}
  std::string var;
  int direction;
};

struct BadPrime : Error {
  BadPrime(long p, std::string witness)
      : Error("bad prime " + std::to_string(p) + ": " + witness), prime(p),
        witness(std::move(witness)) {}
  long prime;
  std::string witness;
};

inline std::string to_string(const Int& x) { return x.get_str(); }

inline std::string to_string(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

/// Parses "a" or "a/b" into a canonical rational.
Rat parse_rat(const std::string& s);

/// Prime factors of |n| (n != 0), by trial division; any cofactor left after
/// the trial bound is returned as-is.
std::vector<Int> prime_factors(Int n);

/// Adds the primes dividing the numerator and denominator of x.
void note_primes(PrimeSet& out, const Rat& x);

bool is_prime(long p);

/// a mod m in [0, m).
Int mod_floor(const Int& a, const Int& m);

/// ceil(a / b) and floor(a / b) for b > 0.
Int ceil_div(const Int& a, const Int& b);
Int floor_div(const Int& a, const Int& b);

Int lcm(const Int& a, const Int& b);

/// Inverse of a modulo m, gcd(a, m) = 1.
Int inv_mod(const Int& a, const Int& m);

/// Reduction of a rational with denominator prime to p into [0, p^k).
Int rat_mod(const Rat& x, const Int& modulus);

long to_long(const Int& x);

/// Exact p-adic valuation of a nonzero rational.
long padic_val(const Rat& x, long p);

}  // namespace mk
