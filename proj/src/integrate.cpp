#include "mk/integrate.hpp"

#include <algorithm>

namespace mk {

namespace {

/// Total phase coefficient on the integration variable after centering:
/// ord(A) = ordA, ac(A) = kappa * ac(y - c_y) + mu; zero when A = 0.
struct PhaseInfo {
  bool zero = true;
  LinForm ordA;
  Rat mu = 0, kappa = 0;
  std::string y;
};

struct Piece {
  Term t;
  PhaseInfo ph;
};

ValueRingElem Lminus1() { return ValueRingElem::parse("L - 1"); }

/// Haar measure of the x-annulus (or ac-ball) times the residue character sum.
void emit_measure(Term t, const Binding& bx, std::vector<Term>& out) {
  const std::string th = bx.theta();
  t.lexp -= LinForm::var(th) + LinForm(1);
  if (!bx.acfix) {
    if (bx.acchar != 0)
      t.coeff = -t.coeff;
    else
      t.coeff *= Lminus1();
  }
  if (normalize_term(t)) out.push_back(std::move(t));
}

void emit_regimes(Piece pc, const Binding& bx, std::vector<Term>& out, PrimeSet& bad) {
  PhaseInfo& ph = pc.ph;
  if (ph.zero) {
    emit_measure(pc.t, bx, out);
    return;
  }
  if (ph.kappa != 0) {
    const Binding* by = pc.t.binding(ph.y);
    if (by->acfix) {
      ph.mu += ph.kappa * *by->acfix;
      ph.kappa = 0;
    }
  }
  const std::string th = bx.theta();
  LinForm s = ph.ordA + LinForm::var(th);
  {  // s >= 1: the phase is trivial on the ac-balls
    Term t = pc.t;
    t.cond.add_ineq(s - LinForm(1));
    if (!t.cond.infeasible()) emit_measure(t, bx, out);
  }
  // s = 0: residue character sum; s <= -1 contributes nothing
  Term t = pc.t;
  t.cond.add_eq(s);
  if (t.cond.infeasible()) return;
  t.lexp -= LinForm::var(th) + LinForm(1);
  if (bx.acfix) {
    Rat u = *bx.acfix;
    t.coeff *= ValueRingElem::e(ph.mu * u);
    if (ph.kappa != 0) {
      Binding by = *t.binding(ph.y);
      by.acchar += ph.kappa * u;
      note_primes(bad, ph.kappa * u);
      t.bind(by);
    }
    if (normalize_term(t)) out.push_back(std::move(t));
    return;
  }
  Rat w = bx.acchar;
  if (ph.kappa == 0) {
    note_primes(bad, w + ph.mu);
    if (w + ph.mu != 0)
      t.coeff = -t.coeff;
    else
      t.coeff *= Lminus1();
    if (normalize_term(t)) out.push_back(std::move(t));
    return;
  }
  // sum over rho != 0 of e^{(w + mu + kappa*eta) rho}: -1, or L - 1 at the solving eta
  Rat u0 = -(w + ph.mu) / ph.kappa;
  note_primes(bad, u0);
  note_primes(bad, ph.kappa);
  Term gen = t;
  gen.coeff = -gen.coeff;
  if (normalize_term(gen)) out.push_back(std::move(gen));
  if (u0 != 0) {
    Term sp = t;
    Binding by = *sp.binding(ph.y);
    by.acfix = u0;
    sp.bind(by);
    sp.coeff *= ValueRingElem::Lpow(1);
    if (normalize_term(sp)) out.push_back(std::move(sp));
  }
}

}  // namespace

std::vector<Term> integrate_annulus(const Term& t0, const std::string& x, PrimeSet& bad) {
  Term t = t0;
  if (!t.binding(x)) t.bind({x, {}, std::nullopt, 0});
  const Binding bx = *t.binding(x);
  t.unbind(x);
  const LaurentConst& c = bx.center;

  LaurentConst a_sum;
  std::map<std::string, LaurentConst> partners;
  std::vector<Phase> kept;
  for (auto& p : t.phases) {
    if (!p.bilinear()) {
      if (p.x == x)
        a_sum += p.a;
      else
        kept.push_back(p);
    } else if (p.x == x || p.y == x) {
      partners[p.x == x ? p.y : p.x] += p.a;
    } else {
      kept.push_back(p);
    }
  }
  t.phases = kept;
  if (!c.is_zero()) {
    t.coeff *= ValueRingElem::E(a_sum * c);
    for (auto& [y, b] : partners) t.phases.push_back({y, "", b * c});
  }
  for (auto it = partners.begin(); it != partners.end();)
    it = it->second.is_zero() ? partners.erase(it) : std::next(it);
  if (partners.size() > 1)
    throw UnsupportedPhase("phase couples " + x + " with more than one variable");

  std::vector<Piece> pieces;
  if (partners.empty()) {
    PhaseInfo ph;
    if (!a_sum.is_zero()) {
      note_const(bad, a_sum);
      ph.zero = false;
      ph.ordA = LinForm(a_sum.ord());
      ph.mu = a_sum.ac();
    }
    pieces.push_back({t, ph});
  } else {
    const std::string y = partners.begin()->first;
    const LaurentConst beta = partners.begin()->second;
    note_const(bad, beta);
    const std::string thy = theta_name(y);
    PhaseInfo lin;
    lin.zero = false;
    lin.ordA = LinForm::var(thy) + LinForm(beta.ord());
    lin.kappa = beta.ac();
    lin.y = y;
    const Binding* by0 = t.binding(y);
    LaurentConst alpha = a_sum;
    if (by0) alpha += beta * by0->center;
    auto shift_center = [&](const LaurentConst& base) {
      if (!beta.is_monomial())
        throw UnsupportedPhase("phase coefficient " + beta.str() + " on " + x + "*" + y +
                               " is not a monomial");
      return base - alpha.div_monomial(beta);
    };
    if (!by0) {
      Term p = t;
      LaurentConst cs = alpha.is_zero() ? LaurentConst() : shift_center(LaurentConst());
      note_const(bad, cs);
      p.bind({y, cs, std::nullopt, 0});
      pieces.push_back({p, lin});
    } else if (alpha.is_zero()) {
      pieces.push_back({t, lin});
    } else {
      note_const(bad, alpha);
      const Binding by = *by0;
      int w = alpha.ord() - beta.ord();
      Rat eta0 = -alpha.ac() / beta.ac();
      note_primes(bad, eta0);
      LaurentConst cs = shift_center(by.center);
      PhaseInfo cst;
      cst.zero = false;
      cst.ordA = LinForm(alpha.ord());
      cst.mu = alpha.ac();
      {  // ord(y - c_y) < w: beta*y' dominates
        Term p = t;
        p.cond.add_ineq(LinForm(w - 1) - LinForm::var(thy));
        pieces.push_back({p, lin});
      }
      {  // ord(y - c_y) > w: alpha dominates
        Term p = t;
        p.cond.add_ineq(LinForm::var(thy) - LinForm(w + 1));
        pieces.push_back({p, cst});
      }
      // ord(y - c_y) = w
      auto rebound = [&](const Rat& char_factor) {
        Term p = t;
        p.subst(thy, LinForm(w));
        if (char_factor != 0) p.coeff *= ValueRingElem::e(char_factor * eta0);
        p.bind({y, cs, std::nullopt, 0});
        p.cond.add_ineq(LinForm::var(thy) - LinForm(w + 1));
        note_const(bad, cs);
        pieces.push_back({p, lin});
      };
      if (by.acfix) {
        Rat s = beta.ac() * *by.acfix + alpha.ac();
        note_primes(bad, s);
        if (s != 0) {
          Term p = t;
          p.cond.add_eq(LinForm::var(thy) - LinForm(w));
          PhaseInfo ph = cst;
          ph.mu = s;
          pieces.push_back({p, ph});
        } else {
          rebound(0);
        }
      } else {
        Term p = t;
        p.cond.add_eq(LinForm::var(thy) - LinForm(w));
        PhaseInfo ph = lin;
        ph.ordA = LinForm(alpha.ord());
        ph.mu = alpha.ac();
        pieces.push_back({p, ph});
        Term corr = p;
        Binding bc = by;
        bc.acfix = eta0;
        corr.bind(bc);
        corr.coeff = -corr.coeff;
        pieces.push_back({corr, ph});
        rebound(by.acchar);
      }
    }
  }

  std::vector<Term> out;
  for (auto& pc : pieces) {
    if (!normalize_term(pc.t)) continue;
    emit_regimes(pc, bx, out, bad);
  }
  return out;
}

IntegrationResult integrate_var(const CEF& f, const std::string& x) {
  if (std::find(f.vars.begin(), f.vars.end(), x) == f.vars.end())
    throw Error("cannot integrate " + x + ": not a variable of the function");
  std::vector<std::string> rest;
  for (auto& v : f.vars)
    if (v != x) rest.push_back(v);
  IntegrationResult r{cef_zero(rest, f.params), f.bad};
  const std::string th = theta_name(x);
  for (auto& t : f.terms) {
    for (auto& piece : integrate_annulus(t, x, r.bad)) {
      if (ps_is_empty(piece.cond)) continue;
      SumTerm st{piece.cond, piece.lexp, piece.poly, piece.coeff};
      for (auto& s : sum_over(st, th)) {
        Term nt = piece;
        nt.cond = s.cond;
        nt.lexp = s.lexp;
        nt.poly = s.poly;
        nt.coeff = s.coeff;
        if (normalize_term(nt)) r.value.terms.push_back(std::move(nt));
      }
    }
  }
  r.value.bad = r.bad;
  r.value = cef_simplify(r.value);
  return r;
}

IntegrationResult integrate_in_order(const CEF& f, const std::vector<std::string>& order) {
  IntegrationResult r{f, f.bad};
  for (auto& v : order) r = integrate_var(r.value, v);
  return r;
}

IntegrationResult integrate_rel(const CEF& f, const std::set<std::string>& keep) {
  std::vector<std::string> order;
  for (auto& v : f.vars)
    if (!keep.count(v)) order.push_back(v);
  return integrate_in_order(f, order);
}

IntegrationResult integrate_all(const CEF& f) { return integrate_rel(f, {}); }

ValueRingElem integral_value(const CEF& f) { return cef_value(integrate_all(f).value); }

}  // namespace mk
