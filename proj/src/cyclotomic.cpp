#include "mk/cyclotomic.hpp"

#include <cmath>

namespace mk {

namespace {

long ipow(long p, int s) {
  long r = 1;
  for (int i = 0; i < s; ++i) r *= p;
  return r;
}

long totient(long p, int s) { return s == 0 ? 1 : (p - 1) * ipow(p, s - 1); }

}  // namespace

Int Cyclotomic::conductor() const { return Int(ipow(p_, s_)); }

Rat Cyclotomic::rational() const {
  if (s_ != 0) throw Error("cyclotomic number is not rational: " + str());
  return coeffs_[0];
}

Cyclotomic Cyclotomic::reduce(long p, int s, std::vector<Rat> full) {
  if (s == 0) {
    Rat t = 0;
    for (auto& x : full) t += x;
    return Cyclotomic(t);
  }
  const long m = ipow(p, s);
  std::vector<Rat> v(m);
  for (size_t k = 0; k < full.size(); ++k) v[k % m] += full[k];
  const long phi = totient(p, s);
  const long step = ipow(p, s - 1);
  // zeta^phi = -sum_{i=0}^{p-2} zeta^{i*step}
  for (long k = m - 1; k >= phi; --k) {
    if (v[k] == 0) continue;
    Rat c = v[k];
    v[k] = 0;
    for (long i = 0; i <= p - 2; ++i) v[k - phi + i * step] -= c;
  }
  v.resize(phi);
  Cyclotomic r(p, s, std::move(v));
  r.shrink();
  return r;
}

void Cyclotomic::shrink() {
  while (s_ > 0) {
    if (s_ == 1) {
      for (size_t i = 1; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return;
      coeffs_.resize(1);
      s_ = 0;
      p_ = 1;
      return;
    }
    for (size_t i = 0; i < coeffs_.size(); ++i)
      if (i % p_ != 0 && coeffs_[i] != 0) return;
    std::vector<Rat> c(totient(p_, s_ - 1));
    for (size_t j = 0; j < c.size(); ++j) c[j] = coeffs_[j * p_];
    coeffs_ = std::move(c);
    --s_;
  }
}

Cyclotomic Cyclotomic::root(long p, int s, const Int& k) {
  if (s == 0) return Cyclotomic(1);
  const long m = ipow(p, s);
  std::vector<Rat> full(m);
  full[to_long(mod_floor(k, m))] = 1;
  return reduce(p, s, std::move(full));
}

Cyclotomic Cyclotomic::from_root_weights(long p, int s, const std::vector<Rat>& w) {
  return reduce(p, s, w);
}

Cyclotomic Cyclotomic::lifted(long p, int s) const {
  if (s_ == s) return *this;
  const long m = ipow(p, s);
  const long f = ipow(p, s - s_);
  std::vector<Rat> full(m);
  for (size_t i = 0; i < coeffs_.size(); ++i) full[i * f] = coeffs_[i];
  Cyclotomic r(p, s, {});
  // Embedding preserves reducedness of the power basis, so no reduction needed
  // beyond truncation to phi(m).
  full.resize(totient(p, s));
  r.coeffs_ = std::move(full);
  return r;
}

namespace {

void common(const Cyclotomic& a, const Cyclotomic& b, long& p, int& s) {
  if (a.level() > 0 && b.level() > 0 && a.prime() != b.prime())
    throw Error("cyclotomic numbers over different primes");
  p = a.level() > 0 ? a.prime() : b.prime();
  s = std::max(a.level(), b.level());
}

}  // namespace

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
  long p;
  int s;
  common(a, b, p, s);
  Cyclotomic x = a.lifted(p, s), y = b.lifted(p, s);
  for (size_t i = 0; i < x.coeffs_.size(); ++i) x.coeffs_[i] += y.coeffs_[i];
  x.shrink();
  return x;
}

Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
  if (a.s_ == 0 || b.s_ == 0) {
    const Cyclotomic& r = a.s_ == 0 ? a : b;
    const Cyclotomic& o = a.s_ == 0 ? b : a;
    Rat k = r.coeffs_[0];
    Cyclotomic out = o;
    for (auto& c : out.coeffs_) c *= k;
    out.shrink();
    return out;
  }
  long p;
  int s;
  common(a, b, p, s);
  Cyclotomic x = a.lifted(p, s), y = b.lifted(p, s);
  std::vector<Rat> full(x.coeffs_.size() + y.coeffs_.size());
  for (size_t i = 0; i < x.coeffs_.size(); ++i) {
    if (x.coeffs_[i] == 0) continue;
    for (size_t j = 0; j < y.coeffs_.size(); ++j)
      if (y.coeffs_[j] != 0) full[i + j] += x.coeffs_[i] * y.coeffs_[j];
  }
  return Cyclotomic::reduce(p, s, std::move(full));
}

std::string Cyclotomic::str() const {
  if (s_ == 0) return to_string(coeffs_[0]);
  std::string out;
  const std::string z = "zeta(" + std::to_string(ipow(p_, s_)) + ")";
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    Rat c = coeffs_[i];
    if (c == 0) continue;
    if (!out.empty()) {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    } else if (c < 0 && i > 0 && c == -1) {
      out += "-";
      c = 1;
    }
    if (i == 0) {
      out += to_string(c);
    } else {
      if (c != 1) out += to_string(c) + "*";
      out += z;
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out.empty() ? "0" : out;
}

nlohmann::json Cyclotomic::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (auto& x : coeffs_) c.push_back(to_string(x));
  return {{"conductor", ipow(p_, s_)}, {"coeffs", c}, {"text", str()}};
}

Cyclotomic Cyclotomic::from_json(const nlohmann::json& j) {
  long m = j.at("conductor").get<long>();
  std::vector<Rat> w;
  for (auto& c : j.at("coeffs")) w.push_back(parse_rat(c.get<std::string>()));
  if (m == 1) return Cyclotomic(w.at(0));
  long p = 2;
  while (m % p != 0) ++p;
  int s = 0;
  for (long t = m; t > 1; t /= p) ++s;
  return reduce(p, s, w);
}

std::pair<double, double> Cyclotomic::approx() const {
  double re = 0, im = 0;
  const double m = static_cast<double>(ipow(p_, s_));
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    double c = coeffs_[i].get_d();
    re += c * std::cos(2 * M_PI * static_cast<double>(i) / m);
    im += c * std::sin(2 * M_PI * static_cast<double>(i) / m);
  }
  return {re, im};
}

}  // namespace mk
