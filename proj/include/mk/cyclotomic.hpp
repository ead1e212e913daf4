#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mk/arith.hpp"

namespace mk {

/// Exact element of Q(zeta_M) with M = p^s, stored in the power basis
/// 1, zeta, ..., zeta^{phi(M)-1} and always reduced to the smallest conductor.
class Cyclotomic {
 public:
  Cyclotomic() : coeffs_{Rat(0)} {}
  Cyclotomic(const Rat& r) : coeffs_{r} {}  // NOLINT: rationals embed
  Cyclotomic(long r) : coeffs_{Rat(r)} {}   // NOLINT

  /// zeta_{p^s}^k
  static Cyclotomic root(long p, int s, const Int& k);

  long prime() const { return p_; }
  int level() const { return s_; }
  Int conductor() const;
  const std::vector<Rat>& coeffs() const { return coeffs_; }

  bool is_rational() const { return s_ == 0; }
  Rat rational() const;
  bool is_zero() const { return s_ == 0 && coeffs_[0] == 0; }

  Cyclotomic operator-() const;
  friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b);
  Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
  Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
    return a.p_ == b.p_ && a.s_ == b.s_ && a.coeffs_ == b.coeffs_;
  }

  /// Builds from counts: sum_k w[k] zeta_{p^s}^k, k in [0, p^s).
  static Cyclotomic from_root_weights(long p, int s, const std::vector<Rat>& w);

  /// "-1/3", "1/5*zeta(5)^2", "zeta(25) + 2"
  std::string str() const;
  nlohmann::json to_json() const;
  static Cyclotomic from_json(const nlohmann::json& j);

  /// Complex approximation (display only).
  std::pair<double, double> approx() const;

 private:
  Cyclotomic(long p, int s, std::vector<Rat> c) : p_(p), s_(s), coeffs_(std::move(c)) {}
  static Cyclotomic reduce(long p, int s, std::vector<Rat> full);
  Cyclotomic lifted(long p, int s) const;
  void shrink();

  long p_ = 1;
  int s_ = 0;
  std::vector<Rat> coeffs_;
};

}  // namespace mk
