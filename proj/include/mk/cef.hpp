#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mk/arith.hpp"
#include "mk/laurent.hpp"
#include "mk/presburger.hpp"
#include "mk/valring.hpp"

namespace mk {

/// Order variable of a valued variable: ord(x - center).
std::string theta_name(const std::string& var);
bool is_theta_name(const std::string& name);

/// ord(x - center) = ord_x, optionally ac(x - center) = acfix, and a residue
/// character factor e^{acchar * ac(x - center)}.
struct Binding {
  std::string var;
  LaurentConst center;
  std::optional<Rat> acfix;
  Rat acchar = 0;

  std::string theta() const { return theta_name(var); }
  friend bool operator==(const Binding& a, const Binding& b) {
    return a.var == b.var && a.center == b.center && a.acfix == b.acfix && a.acchar == b.acchar;
  }
  friend bool operator<(const Binding& a, const Binding& b);
};

/// E(a*x) when y is empty, E(a*x*y) otherwise (x < y).
struct Phase {
  std::string x, y;
  LaurentConst a;
  bool bilinear() const { return !y.empty(); }
  friend bool operator==(const Phase& p, const Phase& q) {
    return p.x == q.x && p.y == q.y && p.a == q.a;
  }
  friend bool operator<(const Phase& p, const Phase& q);
};

struct Term {
  std::vector<Binding> bindings;  // sorted by var
  BasicSet cond;                  // over ord_* and parameters
  ValueRingElem coeff = ValueRingElem(1);
  LinForm lexp;
  Poly poly = Poly(1);
  std::vector<Phase> phases;  // sorted, merged

  const Binding* binding(const std::string& v) const;
  Binding* binding(const std::string& v);
  void bind(Binding b);
  void unbind(const std::string& v);
  /// Substitutes an integer variable in cond, lexp and poly.
  void subst(const std::string& v, const LinForm& by);

  std::string str() const;
  nlohmann::json to_json() const;
  static Term from_json(const nlohmann::json& j);
};

/// Folds acchar into acfix, merges phases; false when the term is zero.
bool normalize_term(Term& t);

struct CEF {
  std::vector<std::string> vars;    // valued variables
  std::vector<std::string> params;  // integer parameters
  std::vector<Term> terms;
  PrimeSet bad;

  std::string str() const;
  nlohmann::json to_json() const;
  static CEF from_json(const nlohmann::json& j);
};

CEF cef_zero(std::vector<std::string> vars, std::vector<std::string> params = {});
CEF cef_const(const ValueRingElem& c, std::vector<std::string> vars = {},
              std::vector<std::string> params = {});
/// Same function over a larger signature.
CEF cef_extend(const CEF& f, const std::vector<std::string>& vars,
               const std::vector<std::string>& params);

/// Indicator of ord x_i >= alpha for all i; d = 1 uses "x", otherwise x1..xd.
CEF cef_phi_alpha(int d, const LinForm& alpha);
CEF cef_phi_alpha(const std::vector<std::string>& vars, const LinForm& alpha);
CEF cef_ball(const std::string& x, const LaurentConst& c, const LinForm& alpha);
CEF cef_ann(const std::string& x, const LaurentConst& c);
CEF cef_acfix(const std::string& x, const LaurentConst& c, const Rat& u);
CEF cef_echar(const std::string& x, const LaurentConst& c, const Rat& w);
CEF cef_phase(const std::string& x, const LaurentConst& a);
CEF cef_bilinear(const std::string& x, const std::string& y, const LaurentConst& a);

CEF cef_add(const CEF& f, const CEF& g);
CEF cef_sub(const CEF& f, const CEF& g);
CEF cef_scale(const CEF& f, const ValueRingElem& c);
CEF cef_neg(const CEF& f);
CEF cef_mul(const CEF& f, const CEF& g);
/// Multiplies every term by cond / L^lexp / poly (data factors).
CEF cef_restrict(const CEF& f, const std::vector<BasicSet>& cond);
CEF cef_lpow(const CEF& f, const LinForm& lexp);
CEF cef_polyfactor(const CEF& f, const Poly& p);
/// x -> sign*x + shift.
CEF cef_affine(const CEF& f, const std::string& var, int sign, const LaurentConst& shift);
/// Renames valued variables.
CEF cef_rename(const CEF& f, const std::map<std::string, std::string>& m);
/// Merges terms that differ only in coefficient and drops empty ones.
CEF cef_simplify(const CEF& f);

/// Splits terms of equal shape into disjoint cells and drops cancelling parts.
CEF cef_normal_form(const CEF& f);

using Point = std::map<std::string, LaurentConst>;
ValueRingElem cef_eval(const CEF& f, const Point& pt, const Assignment& params = {});

/// When no valued variable and no parameter is left.
ValueRingElem cef_value(const CEF& f);

struct EqResult {
  enum Kind { Equal, NotEqual, Undecided } kind = Undecided;
  Point witness;
  Assignment witness_params;
  std::string detail;
  explicit operator bool() const { return kind == Equal; }
};
std::string to_string(EqResult::Kind k);
EqResult cef_eq_ae(const CEF& f, const CEF& g, unsigned seed = 1, int samples = 60);

struct SchwartzLevel {
  int support;   // f vanishes off ord x_i >= support
  int constant;  // f invariant under translation by t^constant R
};
std::optional<SchwartzLevel> schwartz_level(const CEF& f);

// Internal pieces shared by integrate and fourier.

/// Full-space binding at center c for every valued variable the term lacks.
void bind_missing(Term& t, const std::vector<std::string>& vars, const LaurentConst& c = {});
/// Products of two terms over one signature, with center merging.
std::vector<Term> term_mul(const Term& a, const Term& b, PrimeSet& bad);
/// Records primes of a rational constant.
void note_const(PrimeSet& bad, const LaurentConst& c);

}  // namespace mk
