#include "mk/cef.hpp"

#include <algorithm>
#include <sstream>

namespace mk {

std::string theta_name(const std::string& var) { return "ord_" + var; }

bool is_theta_name(const std::string& name) { return name.rfind("ord_", 0) == 0; }

bool operator<(const Binding& a, const Binding& b) {
  if (a.var != b.var) return a.var < b.var;
  if (!(a.center == b.center)) return a.center < b.center;
  if (a.acfix != b.acfix) return a.acfix < b.acfix;
  return a.acchar < b.acchar;
}

bool operator<(const Phase& p, const Phase& q) {
  if (p.x != q.x) return p.x < q.x;
  if (p.y != q.y) return p.y < q.y;
  return p.a < q.a;
}

void note_const(PrimeSet& bad, const LaurentConst& c) {
  if (c.is_zero()) return;
  for (auto& [j, a] : c.coeffs()) note_primes(bad, Rat(1, 1) / Rat(a.get_den()));
  note_primes(bad, Rat(c.ac().get_num()));
}

// ---------------------------------------------------------------- Term

const Binding* Term::binding(const std::string& v) const {
  for (auto& b : bindings)
    if (b.var == v) return &b;
  return nullptr;
}

Binding* Term::binding(const std::string& v) {
  for (auto& b : bindings)
    if (b.var == v) return &b;
  return nullptr;
}

void Term::bind(Binding b) {
  unbind(b.var);
  auto it = std::lower_bound(bindings.begin(), bindings.end(), b,
                             [](const Binding& x, const Binding& y) { return x.var < y.var; });
  bindings.insert(it, std::move(b));
}

void Term::unbind(const std::string& v) {
  bindings.erase(std::remove_if(bindings.begin(), bindings.end(),
                                [&](const Binding& b) { return b.var == v; }),
                 bindings.end());
}

void Term::subst(const std::string& v, const LinForm& by) {
  cond = cond.substitute(v, by);
  lexp = lexp.substitute(v, by);
  poly = poly.substitute(v, Poly::from_linform(by));
}

bool normalize_term(Term& t) {
  if (t.coeff.is_zero() || t.poly.is_zero() || t.cond.infeasible()) return false;
  std::sort(t.bindings.begin(), t.bindings.end());
  for (auto& b : t.bindings) {
    if (b.acfix) {
      if (*b.acfix == 0) return false;
      if (b.acchar != 0) {
        t.coeff *= ValueRingElem::e(b.acchar * *b.acfix);
        b.acchar = 0;
      }
    }
  }
  std::map<std::pair<std::string, std::string>, LaurentConst> ph;
  for (auto& p : t.phases) {
    auto key = p.y.empty() || p.x < p.y ? std::make_pair(p.x, p.y) : std::make_pair(p.y, p.x);
    ph[key] += p.a;
  }
  t.phases.clear();
  for (auto& [k, a] : ph)
    if (!a.is_zero()) t.phases.push_back({k.first, k.second, a});
  if (t.poly.is_constant()) {
    Rat c = t.poly.constant();
    if (c.get_den() == 1 && c != 1) {
      t.coeff = t.coeff * ValueRingElem(LFraction(c.get_num()));
      t.poly = Poly(1);
    }
  }
  Rat k = t.lexp.constant();
  if (k != 0) {
    Int fl = floor_div(k.get_num(), k.get_den());
    if (fl != 0) {
      t.coeff *= ValueRingElem::Lpow(to_long(fl));
      t.lexp.set_constant(k - Rat(fl));
    }
  }
  return !t.coeff.is_zero();
}

namespace {

std::string rat_str(const Rat& r) { return r.get_str(); }

std::string center_arg(const LaurentConst& c) { return c.is_zero() ? "0" : c.str(); }

std::string coeff_factor(const ValueRingElem& c) {
  if (c.terms().size() == 1) {
    auto& [sym, fr] = *c.terms().begin();
    if (sym.is_trivial() && fr.denL() == 0 && fr.den().empty() && fr.num().degree() == 0)
      return fr.num().coeff(0).get_str();
  }
  return "val(" + c.str() + ")";
}

}  // namespace

std::string Term::str() const {
  std::vector<std::string> parts;
  std::string c = coeff_factor(coeff);
  if (c != "1") parts.push_back(c);
  for (auto& b : bindings) {
    if (b.acfix)
      parts.push_back("acfix(" + b.var + "; " + center_arg(b.center) + "; " + rat_str(*b.acfix) + ")");
    else
      parts.push_back("ann(" + b.var + "; " + center_arg(b.center) + ")");
    if (b.acchar != 0)
      parts.push_back("echar(" + b.var + "; " + (b.center.is_zero() ? "" : center_arg(b.center) + "; ") +
                      rat_str(b.acchar) + ")");
  }
  for (auto& p : phases) {
    std::string arg = "(" + p.a.str() + ")*" + p.x;
    if (p.bilinear()) arg += "*" + p.y;
    parts.push_back("E(" + arg + ")");
  }
  if (!cond.ineqs().empty() || !cond.congs().empty()) parts.push_back("indicator(" + cond.str() + ")");
  if (!lexp.is_constant() || lexp.constant() != 0) parts.push_back("L^(" + lexp.str() + ")");
  if (!(poly == Poly(1))) parts.push_back("poly(" + poly.str() + ")");
  if (parts.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? " * " : "") + parts[i];
  return out;
}

nlohmann::json Term::to_json() const {
  nlohmann::json bs = nlohmann::json::array();
  for (auto& b : bindings) {
    nlohmann::json jb = {{"var", b.var}, {"center", b.center.str()}};
    if (b.acfix) jb["acfix"] = rat_str(*b.acfix);
    if (b.acchar != 0) jb["acchar"] = rat_str(b.acchar);
    bs.push_back(jb);
  }
  nlohmann::json ph = nlohmann::json::array();
  for (auto& p : phases) ph.push_back({{"x", p.x}, {"y", p.y}, {"a", p.a.str()}});
  return {{"bindings", bs},   {"cond", cond.str()},   {"coeff", coeff.to_json()},
          {"lexp", lexp.str()}, {"poly", poly.str()}, {"phases", ph}};
}

Term Term::from_json(const nlohmann::json& j) {
  Term t;
  for (auto& jb : j.at("bindings")) {
    Binding b;
    b.var = jb.at("var").get<std::string>();
    b.center = LaurentConst::parse(jb.at("center").get<std::string>());
    if (jb.contains("acfix")) b.acfix = parse_rat(jb.at("acfix").get<std::string>());
    if (jb.contains("acchar")) b.acchar = parse_rat(jb.at("acchar").get<std::string>());
    t.bind(b);
  }
  t.cond = BasicSet::from_json(j.at("cond"));
  t.coeff = ValueRingElem::from_json(j.at("coeff"));
  t.lexp = LinForm::parse(j.at("lexp").get<std::string>());
  t.poly = Poly::parse(j.at("poly").get<std::string>());
  for (auto& p : j.at("phases"))
    t.phases.push_back({p.at("x").get<std::string>(), p.at("y").get<std::string>(),
                        LaurentConst::parse(p.at("a").get<std::string>())});
  return t;
}

// ---------------------------------------------------------------- CEF basics

std::string CEF::str() const {
  if (terms.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) out += (i ? " + " : "") + terms[i].str();
  return out;
}

nlohmann::json CEF::to_json() const {
  nlohmann::json ts = nlohmann::json::array();
  for (auto& t : terms) ts.push_back(t.to_json());
  nlohmann::json bp = nlohmann::json::array();
  for (auto& p : bad) bp.push_back(to_long(p));
  return {{"vars", vars}, {"params", params}, {"badPrimes", bp}, {"terms", ts}, {"text", str()}};
}

CEF CEF::from_json(const nlohmann::json& j) {
  CEF f;
  f.vars = j.at("vars").get<std::vector<std::string>>();
  f.params = j.at("params").get<std::vector<std::string>>();
  if (j.contains("badPrimes"))
    for (auto& p : j.at("badPrimes")) f.bad.insert(Int(p.get<long>()));
  for (auto& t : j.at("terms")) f.terms.push_back(Term::from_json(t));
  return f;
}

namespace {

std::vector<std::string> merged(std::vector<std::string> a, const std::vector<std::string>& b) {
  for (auto& v : b)
    if (std::find(a.begin(), a.end(), v) == a.end()) a.push_back(v);
  std::sort(a.begin(), a.end());
  return a;
}

void check_same(const CEF& f, const CEF& g) {
  if (f.vars != g.vars || f.params != g.params)
    throw SignatureMismatch("signature mismatch between CEFs");
}

CEF one_term(Term t, std::vector<std::string> vars, std::vector<std::string> params = {}) {
  CEF f;
  f.vars = std::move(vars);
  f.params = std::move(params);
  std::sort(f.vars.begin(), f.vars.end());
  std::sort(f.params.begin(), f.params.end());
  if (normalize_term(t)) f.terms.push_back(std::move(t));
  return f;
}

std::vector<std::string> params_of(const LinForm& f) {
  std::vector<std::string> out;
  for (auto& v : f.vars())
    if (!is_theta_name(v)) out.push_back(v);
  return out;
}

}  // namespace

CEF cef_zero(std::vector<std::string> vars, std::vector<std::string> params) {
  CEF f;
  f.vars = std::move(vars);
  f.params = std::move(params);
  std::sort(f.vars.begin(), f.vars.end());
  std::sort(f.params.begin(), f.params.end());
  return f;
}

CEF cef_const(const ValueRingElem& c, std::vector<std::string> vars,
              std::vector<std::string> params) {
  Term t;
  t.coeff = c;
  return one_term(t, std::move(vars), std::move(params));
}

CEF cef_extend(const CEF& f, const std::vector<std::string>& vars,
               const std::vector<std::string>& params) {
  CEF g = f;
  g.vars = merged(f.vars, vars);
  g.params = merged(f.params, params);
  return g;
}

CEF cef_ball(const std::string& x, const LaurentConst& c, const LinForm& alpha) {
  Term t;
  t.bind({x, c, std::nullopt, 0});
  t.cond.add_ineq(LinForm::var(theta_name(x)) - alpha);
  return one_term(t, {x}, params_of(alpha));
}

CEF cef_phi_alpha(const std::vector<std::string>& vars, const LinForm& alpha) {
  Term t;
  for (auto& x : vars) {
    t.bind({x, {}, std::nullopt, 0});
    t.cond.add_ineq(LinForm::var(theta_name(x)) - alpha);
  }
  return one_term(t, vars, params_of(alpha));
}

CEF cef_phi_alpha(int d, const LinForm& alpha) {
  std::vector<std::string> vars;
  if (d == 1)
    vars = {"x"};
  else
    for (int i = 1; i <= d; ++i) vars.push_back("x" + std::to_string(i));
  return cef_phi_alpha(vars, alpha);
}

CEF cef_ann(const std::string& x, const LaurentConst& c) {
  Term t;
  t.bind({x, c, std::nullopt, 0});
  return one_term(t, {x});
}

CEF cef_acfix(const std::string& x, const LaurentConst& c, const Rat& u) {
  Term t;
  t.bind({x, c, u, 0});
  CEF f = one_term(t, {x});
  note_primes(f.bad, u);
  return f;
}

CEF cef_echar(const std::string& x, const LaurentConst& c, const Rat& w) {
  Term t;
  t.bind({x, c, std::nullopt, w});
  CEF f = one_term(t, {x});
  note_primes(f.bad, w);
  return f;
}

CEF cef_phase(const std::string& x, const LaurentConst& a) {
  Term t;
  t.phases.push_back({x, "", a});
  return one_term(t, {x});
}

CEF cef_bilinear(const std::string& x, const std::string& y, const LaurentConst& a) {
  if (x == y) throw UnsupportedPhase("bilinear phase needs two distinct variables");
  Term t;
  t.phases.push_back({x, y, a});
  return one_term(t, {x, y});
}

CEF cef_add(const CEF& f, const CEF& g) {
  check_same(f, g);
  CEF h = f;
  h.terms.insert(h.terms.end(), g.terms.begin(), g.terms.end());
  h.bad.insert(g.bad.begin(), g.bad.end());
  return cef_simplify(h);
}

CEF cef_neg(const CEF& f) { return cef_scale(f, ValueRingElem(-1)); }

CEF cef_sub(const CEF& f, const CEF& g) { return cef_add(f, cef_neg(g)); }

CEF cef_scale(const CEF& f, const ValueRingElem& c) {
  CEF h = f;
  h.terms.clear();
  for (auto t : f.terms) {
    t.coeff = t.coeff * c;
    if (normalize_term(t)) h.terms.push_back(std::move(t));
  }
  return h;
}

// ---------------------------------------------------------------- products

void bind_missing(Term& t, const std::vector<std::string>& vars, const LaurentConst& c) {
  for (auto& v : vars)
    if (!t.binding(v)) t.bind({v, c, std::nullopt, 0});
}

namespace {

using TermPair = std::pair<Term, Term>;

/// ac(x - c) data of `from` moved onto `to` where both ac's coincide.
bool merge_ac(Binding& to, const Binding& from, Term& coeff_holder, PrimeSet& bad) {
  if (to.acfix && from.acfix) {
    note_primes(bad, *to.acfix - *from.acfix);
    return *to.acfix == *from.acfix;
  }
  if (from.acfix) {
    if (to.acchar != 0) coeff_holder.coeff *= ValueRingElem::e(to.acchar * *from.acfix);
    to.acfix = from.acfix;
    to.acchar = 0;
    return true;
  }
  if (to.acfix) {
    if (from.acchar != 0) coeff_holder.coeff *= ValueRingElem::e(from.acchar * *to.acfix);
    return true;
  }
  to.acchar += from.acchar;
  return true;
}

/// Aligns the bindings of v in a and b; afterwards at most one of them binds v.
std::vector<TermPair> align(TermPair p, const std::string& v, PrimeSet& bad) {
  Term& A = p.first;
  Term& B = p.second;
  const Binding* ba = A.binding(v);
  const Binding* bb = B.binding(v);
  if (!ba || !bb) return {p};
  const std::string th = theta_name(v);
  LaurentConst D = bb->center - ba->center;
  std::vector<TermPair> out;
  if (D.is_zero()) {
    Binding merged_b = *ba;
    Binding from = *bb;
    B.unbind(v);
    if (!merge_ac(merged_b, from, A, bad)) return {};
    A.bind(merged_b);
    out.push_back(std::move(p));
    return out;
  }
  note_const(bad, D);
  int w = D.ord();
  Rat delta = D.ac();
  Binding b1 = *ba, b2 = *bb;

  {  // ord(x - c) < w: ord and ac agree
    TermPair q = p;
    q.second.unbind(v);
    q.first.cond.add_ineq(LinForm(w - 1) - LinForm::var(th));
    Binding m = b1;
    if (merge_ac(m, b2, q.first, bad)) {
      q.first.bind(m);
      out.push_back(std::move(q));
    }
  }
  {  // ord(x - c) > w: x - c' has ord w and ac -delta
    TermPair q = p;
    q.second.unbind(v);
    q.second.subst(th, LinForm(w));
    q.first.cond.add_ineq(LinForm::var(th) - LinForm(w + 1));
    bool ok = true;
    if (b2.acfix) {
      note_primes(bad, *b2.acfix + delta);
      ok = *b2.acfix == -delta;
    } else if (b2.acchar != 0) {
      q.second.coeff *= ValueRingElem::e(-b2.acchar * delta);
    }
    if (ok) out.push_back(std::move(q));
  }
  {  // ord = w, ac(x - c) = delta: recenter on c'
    TermPair q = p;
    q.first.unbind(v);
    q.first.subst(th, LinForm(w));
    q.second.cond.add_ineq(LinForm::var(th) - LinForm(w + 1));
    bool ok = true;
    if (b1.acfix) {
      note_primes(bad, *b1.acfix - delta);
      ok = *b1.acfix == delta;
    } else if (b1.acchar != 0) {
      q.first.coeff *= ValueRingElem::e(b1.acchar * delta);
    }
    if (ok) out.push_back(std::move(q));
  }
  {  // ord = w, ac(x - c) != delta: ac(x - c') = ac(x - c) - delta
    TermPair q = p;
    q.second.unbind(v);
    q.second.subst(th, LinForm(w));
    q.first.cond.add_eq(LinForm::var(th) - LinForm(w));
    Binding m = b1;
    if (b1.acfix) {
      note_primes(bad, *b1.acfix - delta);
      bool ok = *b1.acfix != delta;
      if (ok && b2.acfix) {
        note_primes(bad, *b1.acfix - delta - *b2.acfix);
        ok = *b1.acfix - delta == *b2.acfix;
      } else if (ok && b2.acchar != 0) {
        q.second.coeff *= ValueRingElem::e(b2.acchar * (*b1.acfix - delta));
      }
      if (ok) {
        q.first.bind(m);
        out.push_back(std::move(q));
      }
    } else if (b2.acfix) {
      Rat u = *b2.acfix + delta;
      note_primes(bad, u);
      if (u != 0) {
        m.acfix = u;
        q.first.bind(m);
        out.push_back(std::move(q));
      }
    } else {
      m.acchar = b1.acchar + b2.acchar;
      q.second.coeff *= ValueRingElem::e(-b2.acchar * delta);
      q.first.bind(m);
      TermPair corr = q;
      Binding mc = m;
      mc.acfix = delta;
      corr.first.bind(mc);
      corr.first.coeff = -corr.first.coeff;
      out.push_back(std::move(q));
      out.push_back(std::move(corr));
    }
  }
  return out;
}

Term combine(const Term& a, const Term& b) {
  Term t = a;
  for (auto& bb : b.bindings) t.bind(bb);
  t.cond.intersect(b.cond);
  t.coeff = a.coeff * b.coeff;
  t.lexp = a.lexp + b.lexp;
  t.poly = a.poly * b.poly;
  t.phases.insert(t.phases.end(), b.phases.begin(), b.phases.end());
  return t;
}

}  // namespace

std::vector<Term> term_mul(const Term& a, const Term& b, PrimeSet& bad) {
  std::set<std::string> vs;
  for (auto& x : a.bindings) vs.insert(x.var);
  for (auto& x : b.bindings) vs.insert(x.var);
  std::vector<TermPair> cur{{a, b}};
  for (auto& v : vs) {
    std::vector<TermPair> next;
    for (auto& p : cur)
      for (auto& q : align(p, v, bad)) {
        if (q.first.cond.infeasible() || q.second.cond.infeasible()) continue;
        next.push_back(std::move(q));
      }
    cur = std::move(next);
  }
  std::vector<Term> out;
  for (auto& [x, y] : cur) {
    Term t = combine(x, y);
    if (!normalize_term(t)) continue;
    if (ps_is_empty(t.cond)) continue;
    out.push_back(std::move(t));
  }
  return out;
}

CEF cef_mul(const CEF& f, const CEF& g) {
  check_same(f, g);
  CEF h = cef_zero(f.vars, f.params);
  h.bad = f.bad;
  h.bad.insert(g.bad.begin(), g.bad.end());
  for (auto& a : f.terms)
    for (auto& b : g.terms)
      for (auto& t : term_mul(a, b, h.bad)) h.terms.push_back(std::move(t));
  return cef_simplify(h);
}

namespace {

CEF apply_data(const CEF& f, const std::function<void(Term&)>& fn,
               const std::vector<std::string>& extra_params) {
  CEF h = cef_extend(f, {}, extra_params);
  h.terms.clear();
  for (auto t : f.terms) {
    fn(t);
    if (normalize_term(t)) h.terms.push_back(std::move(t));
  }
  return h;
}

void bind_mentioned(Term& t, const std::set<std::string>& names) {
  for (auto& n : names)
    if (is_theta_name(n)) {
      std::string v = n.substr(4);
      if (!t.binding(v)) t.bind({v, {}, std::nullopt, 0});
    }
}

std::vector<std::string> params_in(const std::set<std::string>& names) {
  std::vector<std::string> out;
  for (auto& n : names)
    if (!is_theta_name(n)) out.push_back(n);
  return out;
}

std::vector<std::string> vars_in(const std::set<std::string>& names) {
  std::vector<std::string> out;
  for (auto& n : names)
    if (is_theta_name(n)) out.push_back(n.substr(4));
  return out;
}

}  // namespace

CEF cef_restrict(const CEF& f, const std::vector<BasicSet>& cond) {
  std::set<std::string> names;
  for (auto& b : cond) {
    auto vs = b.vars();
    names.insert(vs.begin(), vs.end());
  }
  CEF base = cef_extend(f, vars_in(names), params_in(names));
  CEF h = cef_zero(base.vars, base.params);
  h.bad = f.bad;
  for (auto& b : cond) {
    CEF piece = apply_data(
        base,
        [&](Term& t) {
          bind_mentioned(t, b.vars());
          t.cond.intersect(b);
        },
        {});
    h.terms.insert(h.terms.end(), piece.terms.begin(), piece.terms.end());
  }
  return cef_simplify(h);
}

CEF cef_lpow(const CEF& f, const LinForm& lexp) {
  auto names = lexp.vars();
  CEF base = cef_extend(f, vars_in(names), params_in(names));
  return apply_data(
      base,
      [&](Term& t) {
        bind_mentioned(t, names);
        t.lexp += lexp;
      },
      {});
}

CEF cef_polyfactor(const CEF& f, const Poly& p) {
  auto names = p.vars();
  CEF base = cef_extend(f, vars_in(names), params_in(names));
  return apply_data(
      base,
      [&](Term& t) {
        bind_mentioned(t, names);
        t.poly = t.poly * p;
      },
      {});
}

CEF cef_affine(const CEF& f, const std::string& var, int sign, const LaurentConst& shift) {
  CEF h = f;
  h.terms.clear();
  LaurentConst s(sign);
  for (auto t : f.terms) {
    if (Binding* b = t.binding(var)) {
      b->center = s * (b->center - shift);
      if (b->acfix) *b->acfix *= sign;
      b->acchar *= sign;
    }
    std::vector<Phase> extra;
    for (auto& p : t.phases) {
      if (p.x != var && p.y != var) continue;
      if (!p.bilinear()) {
        t.coeff *= ValueRingElem::E(p.a * shift);
      } else {
        const std::string& other = p.x == var ? p.y : p.x;
        if (!shift.is_zero()) extra.push_back({other, "", p.a * shift});
      }
      p.a = s * p.a;
    }
    t.phases.insert(t.phases.end(), extra.begin(), extra.end());
    if (normalize_term(t)) h.terms.push_back(std::move(t));
  }
  if (!shift.is_zero()) note_const(h.bad, shift);
  return cef_simplify(h);
}

CEF cef_rename(const CEF& f, const std::map<std::string, std::string>& m) {
  auto rn = [&](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  std::map<std::string, std::string> th;
  for (auto& [a, b] : m) th[theta_name(a)] = theta_name(b);
  CEF h = f;
  for (auto& v : h.vars) v = rn(v);
  std::sort(h.vars.begin(), h.vars.end());
  for (auto& t : h.terms) {
    for (auto& b : t.bindings) b.var = rn(b.var);
    for (auto& p : t.phases) {
      p.x = rn(p.x);
      if (p.bilinear()) p.y = rn(p.y);
    }
    t.cond = t.cond.renamed(th);
    t.lexp = t.lexp.renamed(th);
    t.poly = t.poly.renamed(th);
    normalize_term(t);
  }
  return h;
}

namespace {

std::string term_key(const Term& t) {
  Term k = t;
  k.coeff = ValueRingElem(1);
  return k.to_json().dump();
}

}  // namespace

CEF cef_simplify(const CEF& f) {
  std::map<std::string, Term> acc;
  std::vector<std::string> order;
  for (auto& t : f.terms) {
    std::string k = term_key(t);
    auto it = acc.find(k);
    if (it == acc.end()) {
      acc.emplace(k, t);
      order.push_back(k);
    } else {
      it->second.coeff += t.coeff;
    }
  }
  CEF h = f;
  h.terms.clear();
  std::sort(order.begin(), order.end());
  for (auto& k : order) {
    Term& t = acc.at(k);
    if (!normalize_term(t)) continue;
    if (ps_is_empty(t.cond)) continue;
    h.terms.push_back(std::move(t));
  }
  return h;
}

// ---------------------------------------------------------------- evaluation

ValueRingElem cef_eval(const CEF& f, const Point& pt, const Assignment& params) {
  std::vector<std::pair<ValueRingElem, Int>> parts;
  for (auto& t : f.terms) {
    Assignment a = params;
    ValueRingElem w = t.coeff;
    bool alive = true;
    for (auto& b : t.bindings) {
      auto it = pt.find(b.var);
      if (it == pt.end()) throw Error("no value for variable " + b.var);
      LaurentConst d = it->second - b.center;
      if (d.is_zero())
        throw CenterCoincident(b.var + " evaluated at the center " + b.center.str());
      a[b.theta()] = d.ord();
      Rat eta = d.ac();
      if (b.acfix && *b.acfix != eta) {
        alive = false;
        break;
      }
      if (b.acchar != 0) w *= ValueRingElem::e(b.acchar * eta);
    }
    if (!alive || !t.cond.contains(a)) continue;
    Rat le = t.lexp.eval(a);
    if (le.get_den() != 1) throw Error("non-integral L exponent " + le.get_str());
    w *= ValueRingElem::Lpow(to_long(le.get_num()));
    Rat pv = t.poly.eval(a);
    if (pv == 0) continue;
    for (auto& p : t.phases) {
      LaurentConst arg = p.a * pt.at(p.x);
      if (p.bilinear()) arg = arg * pt.at(p.y);
      w *= ValueRingElem::E(arg);
    }
    parts.push_back({w * ValueRingElem(LFraction(pv.get_num())), pv.get_den()});
  }
  // rational weights: clear the common denominator, divide exactly at the end
  Int D = 1;
  for (auto& [w, d] : parts) D = lcm(D, d);
  ValueRingElem total;
  for (auto& [w, d] : parts) total += w * ValueRingElem(LFraction(Int(D / d)));
  return D == 1 ? total : total.div_exact(D);
}

ValueRingElem cef_value(const CEF& f) {
  if (!f.vars.empty() || !f.params.empty())
    throw Error("cef_value needs a CEF without variables");
  return cef_eval(f, {}, {});
}

}  // namespace mk
