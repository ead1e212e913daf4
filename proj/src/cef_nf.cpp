#include <algorithm>
#include <random>

#include "mk/cef.hpp"

namespace mk {

namespace {

/// Sorted list of distinct centers used for each variable.
std::map<std::string, std::vector<LaurentConst>> center_sets(const CEF& f) {
  std::map<std::string, std::set<LaurentConst>> s;
  for (auto& v : f.vars) s[v];
  for (auto& t : f.terms)
    for (auto& b : t.bindings) s[b.var].insert(b.center);
  std::map<std::string, std::vector<LaurentConst>> out;
  for (auto& [v, cs] : s) {
    out[v] = {cs.begin(), cs.end()};
    if (out[v].empty()) out[v].push_back(LaurentConst());
  }
  return out;
}

/// Restricts t (bound at centers[j]) to the cell of points whose nearest
/// center, ties to the lowest index, is centers[j].
void apply_cell(Term t, const std::string& v, const std::vector<LaurentConst>& centers,
                size_t j, std::vector<Term>& out, PrimeSet& bad) {
  const std::string th = theta_name(v);
  const LaurentConst& cj = centers[j];
  std::set<std::pair<int, Rat>> excl;
  for (size_t k = 0; k < centers.size(); ++k) {
    if (k == j) continue;
    LaurentConst D = centers[k] - cj;
    note_const(bad, D);
    if (k < j)
      t.cond.add_ineq(LinForm::var(th) - LinForm(D.ord() + 1));
    else
      excl.insert({D.ord(), D.ac()});
  }
  if (t.cond.infeasible() || ps_is_empty(t.cond)) return;
  out.push_back(t);
  for (auto& [w, delta] : excl) {
    Term c = t;
    c.cond.add_eq(LinForm::var(th) - LinForm(w));
    Binding b = *c.binding(v);
    if (b.acfix) {
      if (*b.acfix != delta) continue;
    } else {
      b.acfix = delta;
    }
    c.bind(b);
    c.coeff = -c.coeff;
    if (!normalize_term(c) || ps_is_empty(c.cond)) continue;
    out.push_back(std::move(c));
  }
}

/// Re-expresses t over the canonical cells of v.
std::vector<Term> canon_var(const Term& t, const std::string& v,
                            const std::vector<LaurentConst>& centers, PrimeSet& bad) {
  std::vector<Term> out;
  const std::string th = theta_name(v);
  const Binding* b0 = t.binding(v);
  for (size_t j = 0; j < centers.size(); ++j) {
    const LaurentConst& cj = centers[j];
    if (!b0) {
      Term p = t;
      p.bind({v, cj, std::nullopt, 0});
      apply_cell(p, v, centers, j, out, bad);
      continue;
    }
    if (b0->center == cj) {
      apply_cell(t, v, centers, j, out, bad);
      continue;
    }
    LaurentConst D = cj - b0->center;
    int w = D.ord();
    Rat delta = D.ac();
    {  // ord(x - cj) > w: x - c has ord w, ac delta
      Term p = t;
      p.subst(th, LinForm(w));
      bool ok = true;
      if (b0->acfix) {
        note_primes(bad, *b0->acfix - delta);
        ok = *b0->acfix == delta;
      } else if (b0->acchar != 0) {
        p.coeff *= ValueRingElem::e(b0->acchar * delta);
      }
      p.bind({v, cj, std::nullopt, 0});
      p.cond.add_ineq(LinForm::var(th) - LinForm(w + 1));
      if (ok && normalize_term(p)) apply_cell(p, v, centers, j, out, bad);
    }
    {  // ord(x - cj) < w: same ord and ac
      Term p = t;
      Binding nb = *b0;
      nb.center = cj;
      p.bind(nb);
      p.cond.add_ineq(LinForm(w - 1) - LinForm::var(th));
      if (normalize_term(p)) apply_cell(p, v, centers, j, out, bad);
    }
    {  // ord = w: ac(x - c) = ac(x - cj) + delta
      Term p = t;
      p.cond.add_eq(LinForm::var(th) - LinForm(w));
      Binding nb{v, cj, std::nullopt, 0};
      bool ok = true;
      if (b0->acfix) {
        Rat u = *b0->acfix - delta;
        note_primes(bad, u);
        ok = u != 0;
        nb.acfix = u;
      } else {
        nb.acchar = b0->acchar;
        if (b0->acchar != 0) p.coeff *= ValueRingElem::e(b0->acchar * delta);
      }
      p.bind(nb);
      if (ok && normalize_term(p)) apply_cell(p, v, centers, j, out, bad);
    }
  }
  return out;
}

/// Replaces the affine phase on v by its truncation relevant at ord(x - c) = th.
std::vector<Term> canon_phase(const Term& t, const std::string& v) {
  const Phase* ph = nullptr;
  for (auto& p : t.phases)
    if (!p.bilinear() && p.x == v) ph = &p;
  if (!ph) return {t};
  const Binding* b = t.binding(v);
  const std::string th = theta_name(v);
  LaurentConst a = ph->a;
  int m = a.ord();
  int M = a.coeffs().rbegin()->first;
  auto without_phase = [&](Term p) {
    p.phases.erase(std::remove_if(p.phases.begin(), p.phases.end(),
                                  [&](const Phase& q) { return !q.bilinear() && q.x == v; }),
                   p.phases.end());
    return p;
  };
  std::vector<Term> out;
  {  // phase trivial
    Term p = without_phase(t);
    p.coeff *= ValueRingElem::E(a * b->center);
    p.cond.add_ineq(LinForm::var(th) - LinForm(1 - m));
    if (normalize_term(p) && !ps_is_empty(p.cond)) out.push_back(std::move(p));
  }
  {  // full phase
    Term p = t;
    p.cond.add_ineq(LinForm(-M - 1) - LinForm::var(th));
    if (!ps_is_empty(p.cond)) out.push_back(std::move(p));
  }
  for (int k = -M; k <= -m; ++k) {
    Term p = without_phase(t);
    LaurentConst K = a.truncated_above(-k - 1);
    p.coeff *= ValueRingElem::E(a * b->center) * ValueRingElem::E(-(K * b->center));
    if (!K.is_zero()) p.phases.push_back({v, "", K});
    Binding nb = *b;
    nb.acchar += a.coeff(-k);
    p.bind(nb);
    p.cond.add_eq(LinForm::var(th) - LinForm(k));
    if (normalize_term(p) && !ps_is_empty(p.cond)) out.push_back(std::move(p));
  }
  return out;
}

bool has_bilinear(const CEF& f) {
  for (auto& t : f.terms)
    for (auto& p : t.phases)
      if (p.bilinear()) return true;
  return false;
}

std::string group_key(const Term& t) {
  nlohmann::json j = nlohmann::json::array();
  for (auto& b : t.bindings) {
    nlohmann::json jb = {b.var, b.center.str(), b.acfix ? b.acfix->get_str() : "", b.acchar.get_str()};
    j.push_back(jb);
  }
  for (auto& p : t.phases) j.push_back({p.x, p.y, p.a.str()});
  return j.dump();
}

std::vector<Term> canonical_pieces(const CEF& h, PrimeSet& bad) {
  auto centers = center_sets(h);
  std::vector<Term> cur = h.terms;
  for (auto& v : h.vars) {
    std::vector<Term> next;
    for (auto& t : cur)
      for (auto& p : canon_var(t, v, centers.at(v), bad))
        for (auto& q : canon_phase(p, v)) next.push_back(std::move(q));
    cur = std::move(next);
  }
  return cur;
}

struct Formula {
  ValueRingElem c;
  LinForm lexp;
  Poly poly;
};

/// Value of sum c L^lexp poly at a point, exactly.
ValueRingElem eval_formulas(const std::vector<Formula>& fs, const Assignment& a) {
  std::vector<std::pair<ValueRingElem, Int>> parts;
  for (auto& f : fs) {
    Rat pv = f.poly.eval(a);
    if (pv == 0) continue;
    Rat le = f.lexp.eval(a);
    if (le.get_den() != 1) throw Error("non-integral L exponent in comparison");
    parts.push_back({f.c * ValueRingElem::Lpow(to_long(le.get_num())) *
                         ValueRingElem(LFraction(pv.get_num())),
                     pv.get_den()});
  }
  Int D = 1;
  for (auto& [w, d] : parts) D = lcm(D, d);
  ValueRingElem total;
  for (auto& [w, d] : parts) total += w * ValueRingElem(LFraction(Int(D / d)));
  return total;
}

/// True when the formulas cancel identically as exponential polynomials.
bool structurally_zero(const std::vector<Formula>& fs) {
  std::map<std::pair<LinForm, Monomial>, std::vector<std::pair<ValueRingElem, Rat>>> buckets;
  for (auto& f : fs) {
    LinForm l = f.lexp;
    ValueRingElem c = f.c;
    Rat k = l.constant();
    Int fl = floor_div(k.get_num(), k.get_den());
    if (fl != 0) {
      c *= ValueRingElem::Lpow(to_long(fl));
      l.set_constant(k - Rat(fl));
    }
    for (auto& [m, r] : f.poly.terms()) buckets[{l, m}].push_back({c, r});
  }
  for (auto& [k, list] : buckets) {
    Int D = 1;
    for (auto& [c, r] : list) D = lcm(D, r.get_den());
    ValueRingElem s;
    for (auto& [c, r] : list) s += c * ValueRingElem(LFraction(Int(r * Rat(D))));
    if (!s.is_zero()) return false;
  }
  return true;
}

/// Substitutes the implicit equalities of the cell into the formulas.
std::vector<Formula> reduce_by_equalities(BasicSet cell, std::vector<Formula> fs) {
  for (int guard = 0; guard < 16; ++guard) {
    std::optional<LinForm> eq;
    for (auto& f : cell.ineqs()) {
      if (f.is_constant()) continue;
      BasicSet probe = cell;
      probe.add_ineq(f - LinForm(1));
      if (ps_is_empty(probe)) {
        eq = f;
        break;
      }
    }
    if (!eq) break;
    auto [v, a] = *eq->coeffs().begin();
    LinForm by = (eq->without(v)) * Rat(Rat(-1) / a);
    for (auto& f : fs) {
      f.lexp = f.lexp.substitute(v, by);
      f.poly = f.poly.substitute(v, Poly::from_linform(by));
    }
    cell = cell.substitute(v, by);
  }
  return fs;
}

struct CellVerdict {
  EqResult::Kind kind = EqResult::Equal;
  Assignment at;
};

std::vector<std::string> formula_vars(const BasicSet& cell, const std::vector<Formula>& fs) {
  std::set<std::string> vs = cell.vars();
  for (auto& f : fs) {
    auto a = f.lexp.vars();
    auto b = f.poly.vars();
    vs.insert(a.begin(), a.end());
    vs.insert(b.begin(), b.end());
  }
  return {vs.begin(), vs.end()};
}

CellVerdict decide_cell(const BasicSet& cell, const std::vector<Formula>& fs, std::mt19937& rng,
                        int samples) {
  CellVerdict out;
  if (structurally_zero(fs)) return out;
  if (structurally_zero(reduce_by_equalities(cell, fs))) return out;
  auto vars = formula_vars(cell, fs);
  // finite cells are enumerated
  std::vector<std::pair<long, long>> box;
  double count = 1;
  bool finite = true;
  for (auto& v : vars) {
    auto lo = ps_min(cell, LinForm::var(v));
    auto hi = ps_max(cell, LinForm::var(v));
    if (!std::holds_alternative<Rat>(lo) || !std::holds_alternative<Rat>(hi)) {
      finite = false;
      break;
    }
    long l = to_long(std::get<Rat>(lo).get_num()), h = to_long(std::get<Rat>(hi).get_num());
    box.push_back({l, h});
    count *= double(h - l + 1);
  }
  if (finite && count <= 20000) {
    Assignment a;
    std::function<bool(size_t)> rec = [&](size_t i) {
      if (i == vars.size()) {
        if (!cell.contains(a)) return false;
        if (!eval_formulas(fs, a).is_zero()) {
          out.kind = EqResult::NotEqual;
          out.at = a;
          return true;
        }
        return false;
      }
      for (long x = box[i].first; x <= box[i].second; ++x) {
        a[vars[i]] = x;
        if (rec(i + 1)) return true;
      }
      return false;
    };
    rec(0);
    return out;
  }
  std::uniform_int_distribution<long> d(-14, 14);
  int hits = 0;
  for (int tries = 0; tries < 40 * samples && hits < samples; ++tries) {
    Assignment a;
    for (auto& v : vars) a[v] = d(rng);
    if (!cell.contains(a)) continue;
    ++hits;
    if (!eval_formulas(fs, a).is_zero()) {
      out.kind = EqResult::NotEqual;
      out.at = a;
      return out;
    }
  }
  out.kind = EqResult::Undecided;
  return out;
}

struct Cell {
  BasicSet set;
  std::vector<int> ids;
};

std::vector<Cell> refine(const std::vector<BasicSet>& sets) {
  std::vector<Cell> cells;
  for (int k = 0; k < static_cast<int>(sets.size()); ++k) {
    std::vector<Cell> next;
    std::vector<BasicSet> rest{sets[k]};
    for (auto& c : cells) {
      BasicSet in = c.set;
      in.intersect(sets[k]);
      if (!ps_is_empty(in)) {
        auto ids = c.ids;
        ids.push_back(k);
        next.push_back({in, ids});
        for (auto& o : bs_subtract(c.set, sets[k]))
          if (!ps_is_empty(o)) next.push_back({o, c.ids});
        std::vector<BasicSet> r2;
        for (auto& r : rest)
          for (auto& o : bs_subtract(r, c.set))
            if (!ps_is_empty(o)) r2.push_back(o);
        rest = std::move(r2);
      } else {
        next.push_back(c);
      }
    }
    for (auto& r : rest)
      if (!ps_is_empty(r)) next.push_back({r, {k}});
    cells = std::move(next);
  }
  return cells;
}

Point witness_point(const Term& t, const Assignment& a, int variant) {
  Point pt;
  for (auto& b : t.bindings) {
    Rat eta = b.acfix ? *b.acfix : Rat(variant + 1);
    int th = static_cast<int>(a.count(b.theta()) ? to_long(a.at(b.theta())) : 0);
    LaurentConst x = b.center + LaurentConst::monomial(eta, th);
    if (variant > 0) x += LaurentConst::monomial(Rat(variant), th + 1);
    pt[b.var] = x;
  }
  return pt;
}

EqResult sample_compare(const CEF& f, const CEF& g, std::mt19937& rng, int samples) {
  EqResult r;
  std::uniform_int_distribution<int> ex(-4, 5), co(-3, 3);
  for (int i = 0; i < samples; ++i) {
    Point pt;
    for (auto& v : f.vars) {
      LaurentConst x;
      for (int k = 0; k < 3; ++k) x += LaurentConst::monomial(Rat(co(rng)), ex(rng));
      if (x.is_zero()) x = LaurentConst::t(ex(rng));
      pt[v] = x;
    }
    Assignment a;
    for (auto& p : f.params) a[p] = co(rng) + 2;
    try {
      if (!(cef_eval(f, pt, a) == cef_eval(g, pt, a))) {
        r.kind = EqResult::NotEqual;
        r.witness = pt;
        r.witness_params = a;
        return r;
      }
    } catch (const CenterCoincident&) {
    }
  }
  r.kind = EqResult::Undecided;
  return r;
}

// Disjoint cells per binding/phase shape, with coefficients added per (lexp, poly).
std::vector<Term> merge_cells(const std::vector<Term>& terms) {
  std::map<std::string, std::vector<const Term*>> groups;
  for (auto& t : terms) groups[group_key(t)].push_back(&t);
  std::vector<Term> out;
  for (auto& [key, ts] : groups) {
    std::map<BasicSet, std::vector<const Term*>> by_cond;
    for (auto* t : ts) by_cond[t->cond].push_back(t);
    std::vector<BasicSet> sets;
    std::vector<std::vector<const Term*>> members;
    for (auto& [c, list] : by_cond) {
      sets.push_back(c);
      members.push_back(list);
    }
    auto cells = sets.size() == 1 ? std::vector<Cell>{{sets[0], {0}}} : refine(sets);
    for (auto& cell : cells) {
      std::map<std::string, Term> acc;
      for (int id : cell.ids)
        for (auto* t : members[id]) {
          std::string k = t->lexp.str() + "|" + t->poly.str();
          auto it = acc.find(k);
          if (it == acc.end()) {
            Term n = *t;
            n.cond = cell.set;
            acc.emplace(k, n);
          } else {
            it->second.coeff += t->coeff;
          }
        }
      for (auto& [k, t] : acc)
        if (!t.coeff.is_zero()) out.push_back(t);
    }
  }
  return out;
}

}  // namespace

CEF cef_normal_form(const CEF& f) {
  CEF h = f;
  h.terms = merge_cells(f.terms);
  return h;
}

std::string to_string(EqResult::Kind k) {
  switch (k) {
    case EqResult::Equal:
      return "Equal";
    case EqResult::NotEqual:
      return "NotEqual";
    default:
      return "Undecided";
  }
}

EqResult cef_eq_ae(const CEF& f0, const CEF& g0, unsigned seed, int samples) {
  std::vector<std::string> vars = f0.vars, params = f0.params;
  CEF f = cef_extend(f0, g0.vars, g0.params), g = cef_extend(g0, f0.vars, f0.params);
  std::mt19937 rng(seed);
  CEF h = cef_sub(f, g);
  EqResult res;
  if (h.terms.empty()) {
    res.kind = EqResult::Equal;
    return res;
  }
  if (has_bilinear(h)) {
    res = sample_compare(f, g, rng, samples);
    res.detail = "bilinear phases: sampled only";
    return res;
  }
  PrimeSet bad;
  auto pieces = canonical_pieces(h, bad);
  std::map<std::string, std::vector<Term>> groups;
  for (auto& p : pieces) groups[group_key(p)].push_back(p);
  bool undecided = false;
  for (auto& [key, ts] : groups) {
    // same condition: add formulas first
    std::map<BasicSet, std::vector<Formula>> by_cond;
    for (auto& t : ts) by_cond[t.cond].push_back({t.coeff, t.lexp, t.poly});
    std::vector<BasicSet> sets;
    std::vector<std::vector<Formula>> forms;
    for (auto& [c, fs] : by_cond) {
      if (structurally_zero(fs)) continue;
      sets.push_back(c);
      forms.push_back(fs);
    }
    if (sets.empty()) continue;
    for (auto& cell : refine(sets)) {
      std::vector<Formula> fs;
      for (int id : cell.ids) fs.insert(fs.end(), forms[id].begin(), forms[id].end());
      CellVerdict v = decide_cell(cell.set, fs, rng, samples);
      if (v.kind == EqResult::Equal) continue;
      if (v.kind == EqResult::Undecided) {
        undecided = true;
        continue;
      }
      res.kind = EqResult::NotEqual;
      const Term& rep = ts.front();
      for (auto& p : params)
        if (v.at.count(p)) res.witness_params[p] = v.at.at(p);
      for (int variant = 0; variant < 6; ++variant) {
        Point pt = witness_point(rep, v.at, variant);
        res.witness = pt;
        try {
          if (!(cef_eval(f, pt, res.witness_params) == cef_eval(g, pt, res.witness_params))) {
            res.detail = "differs at the witness point";
            return res;
          }
        } catch (const Error&) {
        }
      }
      res.witness = witness_point(rep, v.at, 0);
      res.detail = "differs on the ball around the witness point";
      return res;
    }
  }
  if (undecided) {
    res = sample_compare(f, g, rng, samples);
    if (res.kind == EqResult::Undecided) res.detail = "no difference found by sampling";
    return res;
  }
  res.kind = EqResult::Equal;
  return res;
}

namespace {

std::optional<SchwartzLevel> level_of_terms(const CEF& f) {
  std::optional<int> support, constant;
  auto lower = [](std::optional<int>& s, int v) { s = s ? std::min(*s, v) : v; };
  auto upper = [](std::optional<int>& s, int v) { s = s ? std::max(*s, v) : v; };
  for (auto& t : f.terms) {
    if (t.bindings.size() != f.vars.size()) return std::nullopt;
    for (auto& b : t.bindings) {
      const std::string th = b.theta();
      auto lo = ps_min(t.cond, LinForm::var(th));
      if (std::holds_alternative<EmptySet>(lo)) break;
      if (!std::holds_alternative<Rat>(lo)) return std::nullopt;
      int tmin = to_long(std::get<Rat>(lo).get_num());
      int s = tmin;
      if (!b.center.is_zero()) s = std::min(s, b.center.ord());
      lower(support, s);
      auto hi = ps_max(t.cond, LinForm::var(th));
      if (std::holds_alternative<Rat>(hi)) {
        upper(constant, to_long(std::get<Rat>(hi).get_num()) + 1);
        continue;
      }
      // unbounded above: must be a plain ball from tmin on
      if (b.acfix || b.acchar != 0 || t.lexp.has(th) || t.poly.vars().count(th)) return std::nullopt;
      for (auto& g : t.cond.congs())
        if (g.f.has(th)) return std::nullopt;
      for (auto& g : t.cond.ineqs())
        if (g.has(th) && g.coeffs().size() > 1) return std::nullopt;
      upper(constant, tmin);
    }
    for (auto& p : t.phases) upper(constant, 1 - p.a.ord());
  }
  if (!support) return SchwartzLevel{0, 0};
  return SchwartzLevel{*support, constant ? *constant : *support};
}

}  // namespace

std::optional<SchwartzLevel> schwartz_level(const CEF& f) {
  if (has_bilinear(f)) return std::nullopt;
  if (auto l = level_of_terms(f)) return l;
  CEF h = cef_normal_form(f);
  if (auto l = level_of_terms(h)) return l;
  PrimeSet bad;
  h.terms = merge_cells(canonical_pieces(f, bad));
  return level_of_terms(h);
}

}  // namespace mk
