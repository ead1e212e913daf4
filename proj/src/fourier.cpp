#include "mk/fourier.hpp"

#include <algorithm>

namespace mk {

namespace {

// Adds ac data to a binding; false when two fixed values clash.
bool merge_ac(Binding& b, std::optional<Rat> fix, const Rat& chr) {
  if (fix) {
    if (b.acfix && *b.acfix != *fix) return false;
    b.acfix = fix;
  }
  b.acchar += chr;
  return true;
}

// Rewrites every phase in s through s = z - r.
void subst_phases(Term& t, const std::string& s, const std::string& z, const std::string& r) {
  std::vector<Phase> out;
  for (auto& p : t.phases) {
    if (p.x != s && p.y != s) {
      out.push_back(p);
      continue;
    }
    std::string other = p.x == s ? p.y : p.x;
    if (other == r) throw UnsupportedPhase("phase couples " + s + " with " + r);
    out.push_back({z, other, p.a});
    out.push_back({r, other, -p.a});
  }
  t.phases = out;
}

struct ConvNames {
  std::string x, u, z;
};

// Splits a product term in x (from f) and u (from g) along u = z - x. Pieces in
// xs keep x as the integration variable, pieces in us use u instead.
void split_term(const Term& t0, const ConvNames& n, std::vector<Term>& xs, std::vector<Term>& us,
                PrimeSet& bad) {
  Term T = t0;
  bind_missing(T, {n.x, n.u});
  const Binding bf = *T.binding(n.x), bg = *T.binding(n.u);
  T.unbind(n.x);
  T.unbind(n.u);
  const LaurentConst C = bf.center + bg.center;
  note_const(bad, C);
  const LinForm thx = LinForm::var(theta_name(n.x)), thu = LinForm::var(theta_name(n.u)),
                thz = LinForm::var(theta_name(n.z));
  const Binding zb{n.z, C, std::nullopt, 0};

  auto push_x = [&](Term p) {
    subst_phases(p, n.u, n.z, n.x);
    if (normalize_term(p)) xs.push_back(std::move(p));
  };
  auto push_u = [&](Term p) {
    subst_phases(p, n.x, n.z, n.u);
    if (normalize_term(p)) us.push_back(std::move(p));
  };
  auto neg_opt = [](const std::optional<Rat>& r) -> std::optional<Rat> {
    if (!r) return std::nullopt;
    return Rat(-*r);
  };

  {  // ord x' < ord z': u' = -x' to leading order
    Term p = T;
    p.cond.add_ineq(thz - thx - LinForm(1));
    p.subst(theta_name(n.u), thx);
    Binding xb = bf;
    if (merge_ac(xb, neg_opt(bg.acfix), -bg.acchar)) {
      p.bind(xb);
      p.bind(zb);
      push_x(p);
    }
  }
  {  // ord x' > ord z': u' = z' to leading order
    Term p = T;
    p.cond.add_ineq(thx - thz - LinForm(1));
    p.subst(theta_name(n.u), thz);
    Binding z2 = zb;
    merge_ac(z2, bg.acfix, bg.acchar);
    p.bind(bf);
    p.bind(z2);
    push_x(p);
  }
  // ord x' = ord z' = ord u'
  if (bg.acfix) {
    const Rat ug = *bg.acfix;
    Term p = T;
    p.subst(theta_name(n.x), thz);
    p.cond.add_eq(thu - thz);
    p.bind(bg);
    Binding z2 = zb;
    bool ok = true;
    if (bf.acfix) {
      Rat s = *bf.acfix + ug;
      note_primes(bad, s);
      ok = s != 0;
      z2.acfix = s;
    } else {
      z2.acchar = bf.acchar;
      p.coeff *= ValueRingElem::e(-bf.acchar * ug);
    }
    if (ok) {
      p.bind(z2);
      if (!bf.acfix) {
        // ac(z') = ac(u') leaves ord x' > ord z'
        Term c = p;
        Binding zc = z2;
        zc.acfix = ug;
        c.bind(zc);
        c.coeff = -c.coeff;
        push_u(c);
      }
      push_u(p);
    }
  } else {
    Term p = T;
    p.cond.add_eq(thx - thz);
    p.subst(theta_name(n.u), thz);
    Binding xb = bf, z2 = zb;
    xb.acchar -= bg.acchar;
    z2.acchar = bg.acchar;
    p.bind(xb);
    p.bind(z2);
    if (bf.acfix) {
      Term c = p;
      Binding zc = z2;
      zc.acfix = *bf.acfix;
      c.bind(zc);
      c.coeff = -c.coeff;
      push_x(c);
    } else {
      // the formula also covers ac(x') = ac(z'), where u' is a ball of level ord z' + 1
      Term c = T;
      c.subst(theta_name(n.x), thz);
      c.subst(theta_name(n.u), thz);
      c.cond.add_ineq(thu - thz - LinForm(1));
      c.bind({n.u, bg.center, std::nullopt, 0});
      Binding zc = zb;
      zc.acchar = bf.acchar;
      c.bind(zc);
      c.coeff = -c.coeff;
      push_u(c);
    }
    push_x(p);
  }
  {  // ac(x') = ac(z'): ord u' > ord z'
    Term p = T;
    p.subst(theta_name(n.x), thz);
    p.cond.add_ineq(thu - thz - LinForm(1));
    p.bind(bg);
    Binding z2 = zb;
    merge_ac(z2, bf.acfix, bf.acchar);
    p.bind(z2);
    push_u(p);
  }
}

std::vector<std::string> replaced(std::vector<std::string> vs, const std::string& a,
                                  const std::string& b) {
  for (auto& v : vs)
    if (v == a) v = b;
  std::sort(vs.begin(), vs.end());
  return vs;
}

CEF scaled_by_L(const CEF& f, int k) { return cef_scale(f, ValueRingElem::Lpow(k)); }

}  // namespace

IntegrationResult fourier(const CEF& f) {
  std::vector<std::string> all = f.vars;
  std::map<std::string, std::string> back;
  for (auto& v : f.vars) {
    all.push_back(v + "'");
    back[v + "'"] = v;
  }
  std::sort(all.begin(), all.end());
  CEF h = cef_extend(f, all, f.params);
  for (auto& v : f.vars)
    h = cef_mul(h, cef_extend(cef_bilinear(v, v + "'", LaurentConst(1)), all, f.params));
  std::set<std::string> keep;
  for (auto& [y, v] : back) keep.insert(y);
  IntegrationResult r = integrate_rel(h, keep);
  r.value = cef_normal_form(cef_extend(cef_rename(r.value, back), f.vars, f.params));
  return r;
}

IntegrationResult convolve(const CEF& f, const CEF& g) {
  if (f.vars != g.vars || f.params != g.params)
    throw SignatureMismatch("convolution needs equal signatures");
  std::map<std::string, std::string> to_u;
  std::vector<std::string> all = f.vars;
  for (auto& v : f.vars) {
    to_u[v] = v + "~u";
    all.push_back(v + "~u");
  }
  std::sort(all.begin(), all.end());
  CEF h = cef_mul(cef_extend(f, all, f.params), cef_extend(cef_rename(g, to_u), all, f.params));
  PrimeSet bad = h.bad;
  for (auto& v : f.vars) {
    ConvNames n{v, v + "~u", v + "~z"};
    std::vector<Term> xs, us;
    for (auto& t : h.terms) split_term(t, n, xs, us, bad);
    CEF X = cef_zero(replaced(h.vars, n.u, n.z), h.params);
    X.terms = xs;
    CEF U = cef_zero(replaced(h.vars, n.x, n.z), h.params);
    U.terms = us;
    U = cef_rename(U, {{n.u, n.x}});
    X.bad = U.bad = bad;
    IntegrationResult r = integrate_var(cef_add(X, U), n.x);
    bad.insert(r.bad.begin(), r.bad.end());
    h = cef_rename(r.value, {{n.z, n.x}});
  }
  h.bad = bad;
  return {cef_normal_form(cef_extend(h, f.vars, f.params)), bad};
}

CEF reflect(const CEF& f) {
  CEF h = f;
  for (auto& v : f.vars) h = cef_affine(h, v, -1, {});
  return h;
}

EqResult check_inversion(const CEF& f, unsigned seed) {
  CEF lhs = fourier(fourier(f).value).value;
  CEF rhs = scaled_by_L(reflect(f), -static_cast<int>(f.vars.size()));
  return cef_eq_ae(lhs, rhs, seed);
}

EqResult check_partial_inversion(const CEF& f, int alpha, unsigned seed) {
  int d = static_cast<int>(f.vars.size());
  CEF pa = cef_extend(cef_phi_alpha(f.vars, LinForm(alpha)), f.vars, f.params);
  CEF lhs = fourier(cef_mul(pa, fourier(f).value)).value;
  CEF pb = cef_extend(cef_phi_alpha(f.vars, LinForm(1 - alpha)), f.vars, f.params);
  CEF rhs = scaled_by_L(convolve(reflect(f), pb).value, -alpha * d);
  return cef_eq_ae(lhs, rhs, seed);
}

EqResult check_convolution_theorem(const CEF& f, const CEF& g, unsigned seed) {
  CEF lhs = fourier(convolve(f, g).value).value;
  CEF rhs = cef_mul(fourier(f).value, fourier(g).value);
  return cef_eq_ae(lhs, rhs, seed);
}

}  // namespace mk
