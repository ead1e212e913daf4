#include <algorithm>
#include <random>
#include <sstream>

#include "mk/dsl.hpp"
#include "mk/fourier.hpp"

namespace mk::dsl {

using nlohmann::json;

namespace {

std::vector<std::string> merged(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

void unify(CEF& a, CEF& b) {
  auto vars = merged(a.vars, b.vars), params = merged(a.params, b.params);
  if (a.vars != vars || a.params != params) a = cef_extend(a, vars, params);
  if (b.vars != vars || b.params != params) b = cef_extend(b, vars, params);
}

CEF with_bad(IntegrationResult r) {
  r.value.bad.insert(r.bad.begin(), r.bad.end());
  return r.value;
}

// Text between "name(" and the final ")".
std::string inner(const std::string& text) {
  size_t a = text.find('(');
  return text.substr(a + 1, text.size() - a - 2);
}

NodeP make(Node::Kind k, std::vector<NodeP> kids, int scale = 0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  n->k = scale;
  return n;
}

NodeP phi_node(const std::vector<std::string>& vars, int alpha) {
  std::vector<NodeP> balls;
  for (auto& v : vars) {
    auto n = std::make_shared<Node>();
    n->text = "ball(" + v + "; 0; " + std::to_string(alpha) + ")";
    n->value = cef_ball(v, LaurentConst(), LinForm(alpha));
    balls.push_back(n);
  }
  if (balls.size() == 1) return balls[0];
  return make(Node::Mul, balls);
}

json primes_json(const PrimeSet& s) {
  json out = json::array();
  for (auto& p : s) out.push_back(p.get_str());
  return out;
}

json point_json(const Point& pt) {
  json out = json::object();
  for (auto& [v, c] : pt) out[v] = c.str();
  return out;
}

bool closed(const CEF& f) { return f.vars.empty() && f.params.empty(); }

PrimeSet all_bad(const CEF& f) {
  PrimeSet s = bad_primes(f);
  s.insert(f.bad.begin(), f.bad.end());
  return s;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const BadPrime*>(&e)) return "bad prime";
  if (dynamic_cast<const NotIntegrable*>(&e)) return "not integrable";
  if (dynamic_cast<const UnsupportedPhase*>(&e)) return "unsupported phase";
  if (dynamic_cast<const TailNotConvergent*>(&e)) return "tail not convergent";
  if (dynamic_cast<const PrecisionExhausted*>(&e)) return "precision exhausted";
  if (dynamic_cast<const SignatureMismatch*>(&e)) return "signature mismatch";
  return "error";
}

}  // namespace

CEF Evaluator::sym(const NodeP& e) {
  auto it = cache_.find(e);
  if (it != cache_.end()) return it->second;
  CEF r;
  switch (e->kind) {
    case Node::Atom:
      r = e->value;
      break;
    case Node::Name:
      r = sym(e->def);
      break;
    case Node::Add:
    case Node::Sub: {
      CEF a = sym(e->kids[0]), b = sym(e->kids[1]);
      unify(a, b);
      r = e->kind == Node::Add ? cef_add(a, b) : cef_sub(a, b);
      break;
    }
    case Node::Neg:
      r = cef_neg(sym(e->kids[0]));
      break;
    case Node::Mul: {
      r = cef_const(ValueRingElem(1));
      for (auto& k : e->kids) {
        if (k->kind == Node::Cond || k->kind == Node::LPow || k->kind == Node::PolyF) continue;
        CEF f = sym(k);
        unify(r, f);
        r = cef_mul(r, f);
      }
      for (auto& k : e->kids) {
        if (k->kind == Node::Cond) r = cef_restrict(r, parse_condition(inner(k->text)));
        if (k->kind == Node::LPow) r = cef_lpow(r, LinForm::parse(k->text));
        if (k->kind == Node::PolyF) r = cef_polyfactor(r, Poly::parse(inner(k->text)));
      }
      break;
    }
    case Node::Cond:
      r = cef_restrict(cef_const(ValueRingElem(1)), parse_condition(inner(e->text)));
      break;
    case Node::LPow:
      r = cef_lpow(cef_const(ValueRingElem(1)), LinForm::parse(e->text));
      break;
    case Node::PolyF:
      r = cef_polyfactor(cef_const(ValueRingElem(1)), Poly::parse(inner(e->text)));
      break;
    case Node::Integrate: {
      CEF f = sym(e->kids[0]);
      r = with_bad(e->over.empty() ? integrate_all(f) : integrate_in_order(f, e->over));
      break;
    }
    case Node::Fourier:
      r = with_bad(fourier(sym(e->kids[0])));
      break;
    case Node::Convolve: {
      CEF a = sym(e->kids[0]), b = sym(e->kids[1]);
      unify(a, b);
      r = with_bad(convolve(a, b));
      break;
    }
    case Node::Reflect:
      r = reflect(sym(e->kids[0]));
      break;
    case Node::LScale:
      r = cef_scale(sym(e->kids[0]), ValueRingElem::Lpow(e->k));
      break;
  }
  cache_.emplace(e, r);
  return r;
}

namespace {

// Region and precision large enough for the functions and the point.
OracleOptions fit(const OracleOptions& base, const std::vector<const CEF*>& fs, const Point& pt) {
  OracleOptions o = base;
  // a known support replaces the configured region
  int B = 0, c = 0;
  for (auto* f : fs)
    if (auto lv = schwartz_level(*f)) {
      B = std::max(B, -lv->support);
      c = std::max(c, lv->constant);
    } else {
      // phases do not move the support, and the oracle finds their conductors itself
      CEF bare = *f;
      for (auto& t : bare.terms) t.phases.clear();
      auto lb = schwartz_level(bare);
      B = std::max(B, lb ? -lb->support : base.B);
    }
  for (auto& [v, y] : pt)
    if (!y.is_zero()) {
      B = std::max(B, -y.ord());
      c = std::max(c, 1 - y.ord());
    }
  o.B = B;
  o.N = std::max(o.N, B + c);
  return o;
}

std::vector<LocalFieldElem> coords(const CEF& f, const FieldSpec& K, const Point& pt, long hi) {
  std::vector<LocalFieldElem> x;
  for (auto& v : f.vars) {
    auto it = pt.find(v);
    if (it == pt.end()) throw Error("no coordinate for " + v);
    x.push_back(lf_from(it->second, K, hi));
  }
  return x;
}

}  // namespace

Cyclotomic Evaluator::oracle_at(const NodeP& e, const FieldSpec& K, const Point& pt) {
  const OracleOptions& base = cfg_.oracle;
  switch (e->kind) {
    case Node::Name:
      return oracle_at(e->def, K, pt);
    case Node::Add:
      return oracle_at(e->kids[0], K, pt) + oracle_at(e->kids[1], K, pt);
    case Node::Sub:
      return oracle_at(e->kids[0], K, pt) - oracle_at(e->kids[1], K, pt);
    case Node::Neg:
      return -oracle_at(e->kids[0], K, pt);
    case Node::LScale: {
      Rat q = 1;
      for (int i = 0; i < std::abs(e->k); ++i) q *= K.p;
      return Cyclotomic(e->k >= 0 ? q : 1 / q) * oracle_at(e->kids[0], K, pt);
    }
    case Node::Reflect: {
      Point m;
      for (auto& [v, c] : pt) m[v] = -c;
      return oracle_at(e->kids[0], K, m);
    }
    case Node::Integrate: {
      CEF f = sym(e->kids[0]);
      for (auto& v : e->over)
        if (std::find(f.vars.begin(), f.vars.end(), v) == f.vars.end()) throw Error("no variable " + v);
      if (!e->over.empty() && e->over.size() < f.vars.size())
        throw Error("the oracle integrates over all variables only");
      return oracle_integrate(f, K, fit(base, {&f}, {}));
    }
    case Node::Fourier: {
      CEF f = sym(e->kids[0]);
      return oracle_fourier_at(f, K, pt, fit(base, {&f}, pt));
    }
    case Node::Convolve: {
      CEF a = sym(e->kids[0]), b = sym(e->kids[1]);
      unify(a, b);
      return oracle_convolve_at(a, b, K, pt, fit(base, {&a, &b}, pt));
    }
    case Node::Mul: {
      bool pointwise = std::any_of(e->kids.begin(), e->kids.end(), [](const NodeP& k) {
        return k->kind == Node::Cond || k->kind == Node::LPow || k->kind == Node::PolyF;
      });
      if (!pointwise) {
        Cyclotomic r(1);
        for (auto& k : e->kids) r *= oracle_at(k, K, pt);
        return r;
      }
      break;
    }
    default:
      break;
  }
  CEF f = sym(e);
  long hi = base.N + 16;
  for (auto& [v, c] : pt)
    if (!c.is_zero()) hi = std::max<long>(hi, c.ord() + 16);
  return oracle_eval(f, K, coords(f, K, pt, hi), base.params);
}

std::vector<Point> Evaluator::sample_points(const std::vector<std::string>& vars, unsigned salt) {
  std::mt19937 rng(cfg_.seed * 1000003u + salt);
  long p = cfg_.K.p;
  std::vector<Point> out;
  for (int i = 0; i < 3 * cfg_.samples; ++i) {
    Point pt;
    for (auto& v : vars) {
      int o = static_cast<int>(rng() % 4) - 1;
      long a = 1 + static_cast<long>(rng() % (p - 1)), b = static_cast<long>(rng() % p);
      pt[v] = LaurentConst::monomial(a, o) + LaurentConst::monomial(b, o + 1);
    }
    out.push_back(pt);
  }
  return out;
}

std::pair<NodeP, NodeP> identity_of(const Stmt& s, Evaluator& ev) {
  const NodeP& f = s.args[0];
  if (s.sub == "equal") return {s.args[0], s.args[1]};
  if (s.sub == "convtheorem") {
    const NodeP& g = s.args[1];
    return {make(Node::Fourier, {make(Node::Convolve, {f, g})}),
            make(Node::Mul, {make(Node::Fourier, {f}), make(Node::Fourier, {g})})};
  }
  std::vector<std::string> vars = ev.sym(f).vars;
  int d = static_cast<int>(vars.size());
  if (s.sub == "inversion")
    return {make(Node::Fourier, {make(Node::Fourier, {f})}), make(Node::LScale, {make(Node::Reflect, {f})}, -d)};
  int a = s.alpha;
  return {make(Node::Fourier, {make(Node::Mul, {phi_node(vars, a), make(Node::Fourier, {f})})}),
          make(Node::LScale, {make(Node::Convolve, {make(Node::Reflect, {f}), phi_node(vars, 1 - a)})}, -a * d)};
}

namespace {

json show(const CEF& f, const FieldSpec& K) {
  json j;
  j["value"] = f.str();
  j["bad_primes"] = primes_json(all_bad(f));
  if (closed(f)) {
    ValueRingElem v = cef_value(f);
    j["value"] = v.str();
    try {
      j["specialized"] = spec_value(v, K, all_bad(f)).str();
    } catch (const BadPrime&) {
      j["specialized"] = "excluded: bad prime " + std::to_string(K.p);
    }
  }
  return j;
}

std::string verdict_of(bool equal, bool bad) {
  if (bad) return equal ? "match (bad prime)" : "excluded (bad prime)";
  return equal ? "match" : "mismatch";
}

json oracle_stmt(const Stmt& s, Evaluator& ev, bool& ok) {
  const FieldSpec& K = ev.config().K;
  json j;
  json rows = json::array();
  bool all = true, any_bad = false;
  auto row = [&](json r, const Cyclotomic& spec, const Cyclotomic& orc, bool bad) {
    bool eq = spec == orc;
    r["specialized"] = spec.str();
    r["oracle"] = orc.str();
    r["verdict"] = verdict_of(eq, bad);
    if (!bad) all &= eq;
    any_bad |= bad;
    rows.push_back(r);
  };
  NodeP op;
  if (s.sub == "integrate") {
    op = make(Node::Integrate, {s.args[0]});
    CEF v = ev.sym(op);
    if (!closed(v)) throw Error("integrate left free variables or parameters");
    ValueRingElem sv = cef_value(v);
    bool bad = all_bad(v).count(Int(K.p)) > 0;
    json r;
    r["symbolic"] = sv.str();
    row(r, spec_value(sv, K), ev.oracle_at(op, K, {}), bad);
  } else {
    op = s.sub == "fourier" ? make(Node::Fourier, {s.args[0]}) : make(Node::Convolve, {s.args[0], s.args[1]});
    CEF v = ev.sym(op);
    bool bad = all_bad(v).count(Int(K.p)) > 0;
    j["symbolic"] = v.str();
    int used = 0;
    for (auto& pt : ev.sample_points(v.vars, static_cast<unsigned>(s.line))) {
      if (used == ev.config().samples) break;
      try {
        Cyclotomic sp = spec_cef_at(v, K, pt);
        json r;
        r["point"] = point_json(pt);
        row(r, sp, ev.oracle_at(op, K, pt), bad);
        ++used;
      } catch (const CenterCoincident&) {
      }
    }
  }
  j["field"] = K.str();
  j["rows"] = rows;
  bool eq = true;
  for (auto& r : rows) eq &= r["specialized"] == r["oracle"];
  j["verdict"] = any_bad ? verdict_of(eq, true) : verdict_of(all, false);
  ok &= all;
  return j;
}

}  // namespace

json run(const Script& s, Evaluator& ev, Mode mode, bool& ok) {
  json out = json::array();
  for (auto& st : s.stmts) {
    if (mode == Mode::ChecksOnly && st.kind != Stmt::Check) continue;
    json j;
    j["line"] = st.line;
    j["stmt"] = print_stmt(st);
    try {
      switch (st.kind) {
        case Stmt::Def:
          j["value"] = ev.sym(st.args[0]).str();
          break;
        case Stmt::Show:
          j.update(show(ev.sym(st.args[0]), ev.config().K));
          break;
        case Stmt::Specialize: {
          CEF f = ev.sym(st.args[0]);
          j.update(show(f, ev.config().K));
          if (!closed(f)) {
            if (!f.params.empty()) throw Error("specialize needs a function without parameters");
            json rows = json::array();
            int used = 0;
            for (auto& pt : ev.sample_points(f.vars, static_cast<unsigned>(st.line))) {
              if (used == ev.config().samples) break;
              try {
                rows.push_back({{"point", point_json(pt)}, {"value", spec_cef_at(f, ev.config().K, pt).str()}});
                ++used;
              } catch (const CenterCoincident&) {
              }
            }
            j["samples"] = rows;
          }
          break;
        }
        case Stmt::Check: {
          auto [lhs, rhs] = identity_of(st, ev);
          CEF a = ev.sym(lhs), b = ev.sym(rhs);
          unify(a, b);
          EqResult r = cef_eq_ae(a, b, ev.config().seed);
          j["lhs"] = print_expr(lhs);
          j["rhs"] = print_expr(rhs);
          j["verdict"] = to_string(r.kind);
          if (!r.detail.empty()) j["detail"] = r.detail;
          if (r.kind == EqResult::NotEqual) j["witness"] = point_json(r.witness);
          ok &= r.kind == EqResult::Equal;
          break;
        }
        case Stmt::Oracle:
          j.update(oracle_stmt(st, ev, ok));
          break;
      }
    } catch (const ParseError& e) {
      throw;
    } catch (const Error& e) {
      j["error"] = error_kind(e);
      j["message"] = e.what();
      ok = false;
      j["failed"] = true;
    }
    out.push_back(j);
  }
  return out;
}

json transfer(const Script& s, Evaluator& ev, bool& ok) {
  json out = json::array();
  long p = ev.config().K.p;
  // the configured field keeps its twist; the other kind uses the default character
  FieldSpec kinds[2] = {{p, FieldSpec::Qp, 1, {}}, {p, FieldSpec::Fpt, 1, {}}};
  kinds[ev.config().K.kind == FieldSpec::Qp ? 0 : 1] = ev.config().K;
  for (auto& st : s.stmts) {
    if (st.kind != Stmt::Check) continue;
    json j;
    j["line"] = st.line;
    j["stmt"] = print_stmt(st);
    try {
      auto [lhs, rhs] = identity_of(st, ev);
      CEF a = ev.sym(lhs), b = ev.sym(rhs);
      unify(a, b);
      PrimeSet bad = all_bad(a);
      PrimeSet bb = all_bad(b);
      bad.insert(bb.begin(), bb.end());
      bool is_bad = bad.count(Int(p)) > 0;
      std::vector<Point> pts;
      if (a.vars.empty()) {
        pts.push_back({});
      } else {
        for (auto& pt : ev.sample_points(a.vars, static_cast<unsigned>(st.line))) {
          if (static_cast<int>(pts.size()) == ev.config().samples) break;
          try {
            spec_cef_at(a, kinds[0], pt);
            spec_cef_at(b, kinds[0], pt);
            pts.push_back(pt);
          } catch (const CenterCoincident&) {
          } catch (const BadPrime&) {
            pts.push_back(pt);
          }
        }
      }
      bool holds[2] = {true, true};
      json fields = json::object();
      for (int k = 0; k < 2; ++k) {
        json rows = json::array();
        for (auto& pt : pts) {
          Cyclotomic l = ev.oracle_at(lhs, kinds[k], pt), r = ev.oracle_at(rhs, kinds[k], pt);
          json row = {{"lhs", l.str()}, {"rhs", r.str()}, {"holds", l == r}};
          if (!pt.empty()) row["point"] = point_json(pt);
          rows.push_back(row);
          holds[k] &= l == r;
        }
        fields[kinds[k].kind == FieldSpec::Qp ? "qp" : "fpt"] = {{"holds", holds[k]}, {"rows", rows}};
      }
      j["fields"] = fields;
      j["bad_primes"] = primes_json(bad);
      std::string v;
      if (holds[0] && holds[1])
        v = "match";
      else if (holds[0] != holds[1])
        v = "inconsistent";
      else
        v = is_bad ? "consistent failure (bad prime)" : "mismatch";
      j["verdict"] = v;
      ok &= v == "match" || v == "consistent failure (bad prime)";
    } catch (const Error& e) {
      j["error"] = error_kind(e);
      j["message"] = e.what();
      ok = false;
    }
    out.push_back(j);
  }
  return out;
}

std::string render(const json& report) {
  std::ostringstream os;
  for (auto& j : report) {
    if (j["line"].get<int>() > 0) os << "line " << j["line"].get<int>() << ": ";
    os << j["stmt"].get<std::string>() << "\n";
    auto say = [&](const char* key, const char* label) {
      if (j.contains(key)) os << "  " << label << ": " << j[key].get<std::string>() << "\n";
    };
    say("value", "value");
    say("symbolic", "symbolic");
    say("specialized", "specialized");
    say("lhs", "lhs");
    say("rhs", "rhs");
    if (j.contains("bad_primes") && !j["bad_primes"].empty()) {
      os << "  bad primes:";
      for (auto& p : j["bad_primes"]) os << " " << p.get<std::string>();
      os << "\n";
    }
    if (j.contains("samples"))
      for (auto& r : j["samples"]) os << "  at " << r["point"].dump() << ": " << r["value"].get<std::string>() << "\n";
    if (j.contains("rows"))
      for (auto& r : j["rows"]) {
        os << "  ";
        if (r.contains("point")) os << "at " << r["point"].dump() << ": ";
        os << "specialized " << r["specialized"].get<std::string>() << ", oracle " << r["oracle"].get<std::string>()
           << " -> " << r["verdict"].get<std::string>() << "\n";
      }
    if (j.contains("fields"))
      for (auto& [k, f] : j["fields"].items()) {
        os << "  " << k << ": " << (f["holds"].get<bool>() ? "holds" : "fails") << "\n";
        for (auto& r : f["rows"]) {
          os << "    ";
          if (r.contains("point")) os << "at " << r["point"].dump() << ": ";
          os << r["lhs"].get<std::string>() << " vs " << r["rhs"].get<std::string>() << "\n";
        }
      }
    if (j.contains("witness")) os << "  witness: " << j["witness"].dump() << "\n";
    say("verdict", "verdict");
    if (j.contains("error")) os << "  error (" << j["error"].get<std::string>() << "): " << j["message"].get<std::string>() << "\n";
  }
  return os.str();
}

}  // namespace mk::dsl
