#include "mk/arith.hpp"

#include <limits>

namespace mk {

Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw Error("not a rational: " + s);
  r.canonicalize();
  if (r.get_den() == 0) throw Error("zero denominator: " + s);
  return r;
}

std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  if (n < 0) n = -n;
  if (n == 0) return out;
  for (unsigned long d = 2; d < 100000; d += (d == 2 ? 1 : 2)) {
    Int dd = d;
    if (dd * dd > n) break;
    if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
      out.push_back(dd);
      while (mpz_divisible_ui_p(n.get_mpz_t(), d)) n /= dd;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

void note_primes(PrimeSet& out, const Rat& x) {
  for (auto& p : prime_factors(x.get_num())) out.insert(p);
  for (auto& p : prime_factors(x.get_den())) out.insert(p);
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int ceil_div(const Int& a, const Int& b) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int floor_div(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int inv_mod(const Int& a, const Int& m) {
  Int r;
  if (m == 1) return 0;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error("not invertible modulo " + m.get_str());
  return r;
}

Int rat_mod(const Rat& x, const Int& modulus) {
  Int num = mod_floor(x.get_num(), modulus);
  return mod_floor(num * inv_mod(x.get_den(), modulus), modulus);
}

long to_long(const Int& x) {
  if (!x.fits_slong_p()) throw Error("integer overflow: " + x.get_str());
  return x.get_si();
}

long padic_val(const Rat& x, long p) {
  if (x == 0) throw Error("valuation of zero");
  long v = 0;
  Int n = x.get_num(), d = x.get_den();
  while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
    n /= p;
    ++v;
  }
  while (mpz_divisible_ui_p(d.get_mpz_t(), p)) {
    d /= p;
    --v;
  }
  return v;
}

}  // namespace mk
