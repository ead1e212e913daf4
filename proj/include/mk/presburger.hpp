#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mk/arith.hpp"
#include "mk/valring.hpp"

namespace mk {

using Assignment = std::map<std::string, Int>;

/// sum_v c_v * v + constant. Coefficients are rational so that closed forms
/// such as (th - 1)/2 on a congruence class stay linear.
class LinForm {
 public:
  LinForm() = default;
  LinForm(const Rat& c) : constant_(c) {}  // NOLINT
  LinForm(long c) : constant_(c) {}        // NOLINT
  static LinForm var(const std::string& v, const Rat& c = 1);

  const std::map<std::string, Rat>& coeffs() const { return coeffs_; }
  const Rat& constant() const { return constant_; }
  Rat coeff(const std::string& v) const;
  bool has(const std::string& v) const { return coeffs_.count(v) > 0; }
  bool is_constant() const { return coeffs_.empty(); }
  std::set<std::string> vars() const;

  void set_coeff(const std::string& v, const Rat& c);
  void set_constant(const Rat& c) { constant_ = c; }
  LinForm without(const std::string& v) const;
  LinForm substitute(const std::string& v, const LinForm& by) const;
  LinForm renamed(const std::map<std::string, std::string>& m) const;
  Rat eval(const Assignment& a) const;
  /// Least common denominator of all coefficients and the constant.
  Int denominator() const;

  LinForm operator-() const;
  LinForm& operator+=(const LinForm& o);
  LinForm& operator-=(const LinForm& o);
  LinForm& operator*=(const Rat& k);
  friend LinForm operator+(LinForm a, const LinForm& b) { return a += b; }
  friend LinForm operator-(LinForm a, const LinForm& b) { return a -= b; }
  friend LinForm operator*(LinForm a, const Rat& k) { return a *= k; }
  friend LinForm operator*(const Rat& k, LinForm a) { return a *= k; }
  friend bool operator==(const LinForm& a, const LinForm& b) {
    return a.coeffs_ == b.coeffs_ && a.constant_ == b.constant_;
  }
  friend bool operator<(const LinForm& a, const LinForm& b) {
    return a.coeffs_ != b.coeffs_ ? a.coeffs_ < b.coeffs_ : a.constant_ < b.constant_;
  }

  std::string str() const;
  static LinForm parse(const std::string& s);
  nlohmann::json to_json() const;
  static LinForm from_json(const nlohmann::json& j);

 private:
  std::map<std::string, Rat> coeffs_;
  Rat constant_ = 0;
};

/// Conjunction of f >= 0 and f == 0 (mod m) constraints, kept normalized:
/// integer coefficients, gcd-tightened, one inequality per direction.
class BasicSet {
 public:
  struct Cong {
    LinForm f;  // integer coefficients in [0, m)
    Int m;      // >= 2
    friend bool operator==(const Cong& a, const Cong& b) { return a.f == b.f && a.m == b.m; }
    friend bool operator<(const Cong& a, const Cong& b) {
      return a.m != b.m ? a.m < b.m : a.f < b.f;
    }
  };

  BasicSet() = default;
  static BasicSet universe() { return {}; }
  static BasicSet empty_set();

  /// f >= 0
  BasicSet& add_ineq(const LinForm& f);
  /// f == 0
  BasicSet& add_eq(const LinForm& f);
  /// f == 0 (mod m)
  BasicSet& add_cong(const LinForm& f, const Int& m);
  BasicSet& intersect(const BasicSet& o);

  bool infeasible() const { return infeasible_; }
  const std::vector<LinForm>& ineqs() const { return ineqs_; }
  const std::vector<Cong>& congs() const { return congs_; }
  std::set<std::string> vars() const;
  bool mentions(const std::string& v) const;

  BasicSet substitute(const std::string& v, const LinForm& by) const;
  BasicSet renamed(const std::map<std::string, std::string>& m) const;
  bool contains(const Assignment& a) const;
  /// Equalities v == form implied by opposing inequality pairs.
  std::vector<LinForm> equalities() const;

  friend bool operator==(const BasicSet& a, const BasicSet& b) {
    return a.infeasible_ == b.infeasible_ && a.ineqs_ == b.ineqs_ && a.congs_ == b.congs_;
  }
  friend bool operator<(const BasicSet& a, const BasicSet& b);

  std::string str() const;
  nlohmann::json to_json() const;
  static BasicSet from_json(const nlohmann::json& j);

 private:
  void add_ineq_raw(LinForm f);
  void sort();
  bool infeasible_ = false;
  std::vector<LinForm> ineqs_;
  std::vector<Cong> congs_;
};

/// Finite union of BasicSets over a declared signature.
class PresburgerSet {
 public:
  PresburgerSet() = default;
  explicit PresburgerSet(std::vector<std::string> sig) : sig_(std::move(sig)) {}
  PresburgerSet(std::vector<std::string> sig, std::vector<BasicSet> b);

  const std::vector<std::string>& signature() const { return sig_; }
  const std::vector<BasicSet>& basics() const { return basics_; }
  void add(const BasicSet& b);
  bool contains(const Assignment& a) const;
  std::string str() const;

 private:
  std::vector<std::string> sig_;
  std::vector<BasicSet> basics_;
};

/// Parses `th >= 0 && th % 2 == 0 || th < -3` (|| binds weakest).
std::vector<BasicSet> parse_condition(const std::string& s);

PresburgerSet ps_intersect(const PresburgerSet& a, const PresburgerSet& b);
PresburgerSet ps_union(const PresburgerSet& a, const PresburgerSet& b);
PresburgerSet ps_subtract(const PresburgerSet& a, const PresburgerSet& b);
bool ps_is_empty(const PresburgerSet& s);
bool ps_is_empty(const BasicSet& s);
/// Pairwise disjoint pieces with the same union.
std::vector<BasicSet> disjointify(const std::vector<BasicSet>& bs);
/// a \ b as disjoint pieces of a.
std::vector<BasicSet> bs_subtract(const BasicSet& a, const BasicSet& b);
/// Complement as disjoint pieces.
std::vector<BasicSet> bs_complement(const BasicSet& b);

struct Unbounded {};
struct EmptySet {};
using MinResult = std::variant<Rat, Unbounded, EmptySet>;
MinResult ps_min(const PresburgerSet& s, const LinForm& f);
MinResult ps_min(const BasicSet& s, const LinForm& f);
MinResult ps_max(const BasicSet& s, const LinForm& f);

/// One piece of eliminating v: for points of cond, v runs over
/// start, start + step, ..., end (either end may be infinite).
struct ElimPiece {
  BasicSet cond;
  std::optional<LinForm> start, end;
  Int step = 1;
};
std::vector<ElimPiece> eliminate(const BasicSet& s, const std::string& v);
/// Existential projection of v as a union of pieces.
std::vector<BasicSet> project_out(const BasicSet& s, const std::string& v);

// ---------------------------------------------------------------- polynomials

using Monomial = std::vector<std::pair<std::string, int>>;  // sorted, positive exponents

class Poly {
 public:
  Poly() = default;
  Poly(const Rat& c);  // NOLINT
  Poly(long c) : Poly(Rat(c)) {}  // NOLINT
  static Poly var(const std::string& v);
  static Poly from_linform(const LinForm& f);

  const std::map<Monomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant() const;
  int degree(const std::string& v) const;
  std::set<std::string> vars() const;
  /// Coefficients of powers of v.
  std::map<int, Poly> by_power(const std::string& v) const;
  Poly substitute(const std::string& v, const Poly& by) const;
  Poly renamed(const std::map<std::string, std::string>& m) const;
  Rat eval(const Assignment& a) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a += -b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly pow(int k) const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

  std::string str() const;
  static Poly parse(const std::string& s);
  nlohmann::json to_json() const { return str(); }
  static Poly from_json(const nlohmann::json& j) { return parse(j.get<std::string>()); }

 private:
  void add_term(const Monomial& m, const Rat& c);
  std::map<Monomial, Rat> terms_;
};

/// coeff * L^lexp * poly restricted to cond.
struct SumTerm {
  BasicSet cond;
  LinForm lexp;
  Poly poly = Poly(1);
  ValueRingElem coeff = ValueRingElem(1);
};

/// Closed-form sum over the listed variables, innermost (first) first.
/// Throws NotIntegrable when some piece diverges for q > 1.
std::vector<SumTerm> ps_sum(const PresburgerSet& s, const SumTerm& t,
                            const std::vector<std::string>& summed);
std::vector<SumTerm> sum_over(const SumTerm& t, const std::string& v);

/// Total value when no free variables remain.
ValueRingElem sum_value(const std::vector<SumTerm>& terms);

/// sum_{j >= 0} j^k r^j with r = L^m (m != 0) as a rational function.
LFraction geometric_moment(int k, int m);
/// sum_{j=0}^{n-1} j^k as a polynomial in n.
Poly faulhaber(int k, const Poly& n);

}  // namespace mk
