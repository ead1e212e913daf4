#pragma once

#include <vector>

#include "mk/cef.hpp"
#include "mk/cyclotomic.hpp"
#include "mk/specialize.hpp"

namespace mk {

/// sum_i d[i] w^(v + i), known modulo w^hi(). Digits carry on Q_p and are
/// added coefficientwise on F_p((t)). Zero has no digits and v = hi().
struct LocalFieldElem {
  long p = 2;
  bool carry = true;
  long v = 0;
  std::vector<int> d;

  long hi() const { return v + static_cast<long>(d.size()); }
  bool is_zero() const { return d.empty(); }
  std::string str() const;
};

LocalFieldElem lf_zero(const FieldSpec& K, long hi);
/// Image of t -> w with absolute precision hi (exponents < hi kept).
LocalFieldElem lf_from(const LaurentConst& a, const FieldSpec& K, long hi);
LocalFieldElem lf_add(const LocalFieldElem& a, const LocalFieldElem& b);
LocalFieldElem lf_neg(const LocalFieldElem& a);
LocalFieldElem lf_sub(const LocalFieldElem& a, const LocalFieldElem& b);
LocalFieldElem lf_mul(const LocalFieldElem& a, const LocalFieldElem& b);
/// Throws PrecisionExhausted on zero.
long lf_ord(const LocalFieldElem& a);
int lf_ac(const LocalFieldElem& a);
/// psi_K(a) from the digits.
Cyclotomic lf_psi(const LocalFieldElem& a, const FieldSpec& K);

struct OracleOptions {
  int B = 3;  // region ord x >= -B
  int N = 8;  // classes modulo w^(N - B)
  int tail = 16;  // explicit annuli around a center before extrapolating
  Assignment params;
};

/// Value of f at a point, through the oracle's own digit arithmetic.
Cyclotomic oracle_eval(const CEF& f, const FieldSpec& K, const std::vector<LocalFieldElem>& x,
                       const Assignment& params = {});

Cyclotomic oracle_integrate(const CEF& f, const FieldSpec& K, const OracleOptions& o = {});
/// integral of E(x.y) f(x) dx at a concrete y.
Cyclotomic oracle_fourier_at(const CEF& f, const FieldSpec& K, const Point& y,
                             const OracleOptions& o = {});
/// integral of f(x) g(z - x) dx at a concrete z.
Cyclotomic oracle_convolve_at(const CEF& f, const CEF& g, const FieldSpec& K, const Point& z,
                              const OracleOptions& o = {});

}  // namespace mk
