#include <regex>
#include <set>

#include "mk/dsl.hpp"

namespace mk::dsl {

namespace {

const std::set<std::string> kAtoms = {"ball", "ann",    "acfix",     "echar",    "E",       "val",
                                      "indicator", "Lpow", "poly", "integrate", "fourier", "convolve",
                                      "reflect",   "L"};
const std::set<std::string> kVerbs = {"print", "integrate", "fourier", "convolve", "reflect",
                                      "check", "specialize", "oracle"};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::string center_text(const LaurentConst& c) { return c.is_zero() ? "0" : c.str(); }

NodeP leaf(Node::Kind k, std::string text, CEF v = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->text = std::move(text);
  n->value = std::move(v);
  return n;
}

NodeP op(Node::Kind k, std::vector<NodeP> kids) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  return n;
}

// A piece of a statement with its column offset, for error positions.
struct Arg {
  std::string text;
  size_t col;
};

class Parser {
 public:
  Parser(Script& s, std::string src, int line, size_t col0)
      : S_(s), src_(std::move(src)), line_(line), col0_(col0) {}

  [[noreturn]] void fail(const std::string& what, size_t at) const {
    throw ParseError("line " + std::to_string(line_) + ", column " + std::to_string(col0_ + at + 1) + ": " +
                     what);
  }
  [[noreturn]] void fail(const std::string& what) const { fail(what, i_); }

  void ws() {
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t' || src_[i_] == '\r')) ++i_;
  }
  bool at_end() {
    ws();
    return i_ >= src_.size();
  }
  char peek() {
    ws();
    return i_ < src_.size() ? src_[i_] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    ws();
    if (i_ >= src_.size() || !ident_start(src_[i_])) fail("expected a name");
    size_t a = i_;
    while (i_ < src_.size() && ident_char(src_[i_])) ++i_;
    return src_.substr(a, i_ - a);
  }
  // Next identifier without consuming it.
  std::string peek_ident() {
    size_t m = i_;
    ws();
    std::string id;
    if (i_ < src_.size() && ident_start(src_[i_])) id = ident();
    i_ = m;
    return id;
  }
  // Character after the identifier at the cursor.
  char after_ident() {
    size_t m = i_;
    ident();
    char c = peek();
    i_ = m;
    return c;
  }
  void finish() {
    if (!at_end()) fail("unexpected trailing input");
  }

  NodeP expr() {
    NodeP e = term();
    while (true) {
      if (eat('+'))
        e = op(Node::Add, {e, term()});
      else if (peek() == '-')
        ++i_, e = op(Node::Sub, {e, term()});
      else
        return e;
    }
  }

  NodeP term() {
    std::vector<NodeP> fs{unary()};
    while (eat('*')) fs.push_back(unary());
    bool modifier = false;
    for (auto& f : fs)
      modifier |= f->kind == Node::Cond || f->kind == Node::LPow || f->kind == Node::PolyF;
    if (fs.size() == 1 && !modifier) return fs[0];
    return op(Node::Mul, fs);
  }

  NodeP unary() {
    if (eat('-')) return op(Node::Neg, {unary()});
    return atom();
  }

  NodeP atom() {
    char c = peek();
    size_t at = i_;
    if (c == '(') {
      ++i_;
      std::string id = peek_ident();
      if ((id == "integrate" || id == "fourier" || id == "convolve" || id == "reflect") && after_ident() != '(') {
        ident();
        NodeP e = verb_form(id);
        expect(')');
        return e;
      }
      NodeP e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t a = i_;
      while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '/')) ++i_;
      std::string num = src_.substr(a, i_ - a);
      Rat r;
      try {
        r = parse_rat(num);
      } catch (const Error&) {
        fail("bad number '" + num + "'", a);
      }
      return leaf(Node::Atom, to_string(r), cef_const(ValueRingElem::parse(to_string(r))));
    }
    if (!ident_start(c)) fail(c ? std::string("unexpected '") + c + "'" : "unexpected end of input");
    std::string id = ident();
    if (id == "L" && peek() == '^') {
      ++i_;
      std::string lin;
      size_t col;
      if (peek() == '(') {
        ++i_;
        Arg a = balanced();
        lin = a.text;
        col = a.col;
      } else {
        col = i_;
        size_t b = i_;
        if (i_ < src_.size() && src_[i_] == '-') ++i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        lin = src_.substr(b, i_ - b);
      }
      return lpow(lin, col);
    }
    if (kAtoms.count(id) && peek() == '(') {
      ++i_;
      Arg a = balanced();
      return call(id, a, at);
    }
    auto it = S_.defs.find(id);
    if (it == S_.defs.end()) fail("undefined name '" + id + "'", at);
    auto n = std::make_shared<Node>();
    n->kind = Node::Name;
    n->text = id;
    n->def = it->second;
    return n;
  }

  // After '(' has been consumed: text up to the matching ')'.
  Arg balanced() {
    size_t a = i_;
    int depth = 1;
    while (i_ < src_.size()) {
      char c = src_[i_++];
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) return {src_.substr(a, i_ - 1 - a), a};
    }
    fail("unbalanced parenthesis", a - 1);
  }

  NodeP verb_form(const std::string& v) {
    if (v == "convolve") {
      NodeP a = unary(), b = unary();
      return op(Node::Convolve, {a, b});
    }
    if (v == "integrate") return op(Node::Integrate, {expr()});
    if (v == "fourier") return op(Node::Fourier, {expr()});
    return op(Node::Reflect, {expr()});
  }

  Script& S_;
  std::string src_;
  size_t i_ = 0;
  int line_;
  size_t col0_;

 private:
  std::vector<Arg> split(const Arg& a, char sep) const {
    std::vector<Arg> out;
    int depth = 0;
    size_t start = 0;
    for (size_t k = 0; k <= a.text.size(); ++k) {
      char c = k < a.text.size() ? a.text[k] : sep;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == sep && depth == 0) {
        std::string piece = a.text.substr(start, k - start);
        size_t lead = piece.find_first_not_of(" \t");
        out.push_back({trim(piece), a.col + start + (lead == std::string::npos ? 0 : lead)});
        start = k + 1;
      }
    }
    return out;
  }

  std::string subst(const std::string& text) const {
    static const std::regex ord_call(R"(ord\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\))");
    std::string s = std::regex_replace(text, ord_call, "ord_$1");
    for (auto& [alias, theta] : S_.aliases) s = std::regex_replace(s, std::regex("\\b" + alias + "\\b"), theta);
    return s;
  }

  std::string var(const Arg& a) const {
    std::string v = a.text;
    if (v.empty() || !ident_start(v[0]) ||
        !std::all_of(v.begin(), v.end(), [](char c) { return ident_char(c); }) || v == "t")
      fail("expected a variable name", a.col);
    return v;
  }

  template <class F>
  auto guarded(const Arg& a, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError& e) {
      fail(e.what(), a.col);
    } catch (const Error& e) {
      fail(e.what(), a.col);
    }
  }

  LaurentConst constant(const Arg& a) const {
    return guarded(a, [&] { return LaurentConst::parse(a.text); });
  }

  void arity(const std::vector<Arg>& as, size_t lo, size_t hi, const std::string& what, size_t at) const {
    if (as.size() < lo || as.size() > hi) fail(what + " takes " + std::to_string(lo) +
                                                   (hi > lo ? "-" + std::to_string(hi) : "") + " arguments",
                                               at);
  }

  NodeP lpow(const std::string& lin, size_t col) const {
    Arg a{subst(lin), col};
    LinForm f = guarded(a, [&] { return LinForm::parse(a.text); });
    return leaf(Node::LPow, f.str());
  }

  NodeP sub_expr(const Arg& a) const {
    Parser p(S_, a.text, line_, col0_ + a.col);
    NodeP e = p.expr();
    p.finish();
    return e;
  }

  NodeP call(const std::string& id, const Arg& whole, size_t at) const {
    std::vector<Arg> as = split(whole, ';');
    if (id == "ball") {
      arity(as, 3, 3, id, at);
      std::string x = var(as[0]);
      LaurentConst c = constant(as[1]);
      Arg al{subst(as[2].text), as[2].col};
      LinForm alpha = guarded(al, [&] { return LinForm::parse(al.text); });
      return leaf(Node::Atom, "ball(" + x + "; " + center_text(c) + "; " + alpha.str() + ")", cef_ball(x, c, alpha));
    }
    if (id == "ann") {
      arity(as, 2, 2, id, at);
      std::string x = var(as[0]);
      LaurentConst c = constant(as[1]);
      return leaf(Node::Atom, "ann(" + x + "; " + center_text(c) + ")", cef_ann(x, c));
    }
    if (id == "acfix") {
      arity(as, 3, 3, id, at);
      std::string x = var(as[0]);
      LaurentConst c = constant(as[1]);
      Rat u = guarded(as[2], [&] { return parse_rat(as[2].text); });
      if (u == 0) fail("an angular component is never 0", as[2].col);
      return leaf(Node::Atom, "acfix(" + x + "; " + center_text(c) + "; " + to_string(u) + ")", cef_acfix(x, c, u));
    }
    if (id == "echar") {
      arity(as, 2, 3, id, at);
      std::string x = var(as[0]);
      LaurentConst c = as.size() == 3 ? constant(as[1]) : LaurentConst();
      Rat w = guarded(as.back(), [&] { return parse_rat(as.back().text); });
      std::string text = "echar(" + x + "; " + (c.is_zero() ? "" : center_text(c) + "; ") + to_string(w) + ")";
      return leaf(Node::Atom, text, cef_echar(x, c, w));
    }
    if (id == "E") {
      arity(as, 1, 1, id, at);
      return phase(as[0]);
    }
    if (id == "val") {
      arity(as, 1, 1, id, at);
      ValueRingElem v = guarded(as[0], [&] { return ValueRingElem::parse(as[0].text); });
      return leaf(Node::Atom, "val(" + v.str() + ")", cef_const(v));
    }
    if (id == "indicator") {
      arity(as, 1, 1, id, at);
      Arg c{subst(as[0].text), as[0].col};
      guarded(c, [&] { return parse_condition(c.text); });
      return leaf(Node::Cond, "indicator(" + c.text + ")");
    }
    if (id == "Lpow" || id == "L") {
      arity(as, 1, 1, id, at);
      return lpow(as[0].text, as[0].col);
    }
    if (id == "poly") {
      arity(as, 1, 1, id, at);
      Arg c{subst(as[0].text), as[0].col};
      Poly p = guarded(c, [&] { return Poly::parse(c.text); });
      return leaf(Node::PolyF, "poly(" + p.str() + ")");
    }
    if (id == "integrate") {
      arity(as, 1, 2, id, at);
      auto n = std::make_shared<Node>();
      n->kind = Node::Integrate;
      n->kids = {sub_expr(as[0])};
      if (as.size() == 2)
        for (auto& v : split(as[1], ',')) n->over.push_back(var(v));
      return n;
    }
    if (id == "convolve") {
      arity(as, 2, 2, id, at);
      return op(Node::Convolve, {sub_expr(as[0]), sub_expr(as[1])});
    }
    arity(as, 1, 1, id, at);
    return op(id == "fourier" ? Node::Fourier : Node::Reflect, {sub_expr(as[0])});
  }

  // a*x or a*x*y with a a Laurent constant (possibly absent).
  NodeP phase(const Arg& a) const {
    std::string body = a.text;
    bool neg = false;
    if (!body.empty() && body[0] == '-') {
      neg = true;
      body = trim(body.substr(1));
    }
    std::vector<std::string> vars;
    LaurentConst k(1);
    for (auto& f : split({body, a.col}, '*')) {
      bool is_var = !f.text.empty() && ident_start(f.text[0]) && f.text != "t" &&
                    std::all_of(f.text.begin(), f.text.end(), [](char c) { return ident_char(c); });
      if (is_var) {
        vars.push_back(f.text);
        continue;
      }
      Arg c = f;
      if (c.text.size() >= 2 && c.text.front() == '(' && c.text.back() == ')') c.text = c.text.substr(1, c.text.size() - 2);
      k = k * constant(c);
    }
    if (vars.empty() || vars.size() > 2) fail("E(...) needs one or two variables", a.col);
    if (neg) k = -k;
    if (k.is_zero()) return leaf(Node::Atom, "1", cef_const(ValueRingElem(1)));
    if (vars.size() == 1)
      return leaf(Node::Atom, "E((" + k.str() + ")*" + vars[0] + ")", cef_phase(vars[0], k));
    if (vars[0] == vars[1]) fail("E(a*x*x) is not an affine or bilinear phase", a.col);
    std::sort(vars.begin(), vars.end());
    return leaf(Node::Atom, "E((" + k.str() + ")*" + vars[0] + "*" + vars[1] + ")",
                cef_bilinear(vars[0], vars[1], k));
  }
};

void register_aliases(Script& S, const std::string& line, int lineno) {
  static const std::regex fwd(R"(ord\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\)\s*==\s*([A-Za-z_][A-Za-z0-9_']*))");
  static const std::regex rev(R"(([A-Za-z_][A-Za-z0-9_']*)\s*==\s*ord\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\))");
  auto add = [&](const std::string& alias, const std::string& x) {
    if (alias.rfind("ord_", 0) == 0) return;
    std::string th = theta_name(x);
    auto it = S.aliases.find(alias);
    if (it != S.aliases.end() && it->second != th)
      throw ParseError("line " + std::to_string(lineno) + ": '" + alias + "' already names " + it->second);
    S.aliases[alias] = th;
  };
  for (auto it = std::sregex_iterator(line.begin(), line.end(), fwd); it != std::sregex_iterator(); ++it)
    add((*it)[2], (*it)[1]);
  for (auto it = std::sregex_iterator(line.begin(), line.end(), rev); it != std::sregex_iterator(); ++it)
    add((*it)[1], (*it)[2]);
}

Stmt parse_stmt(Script& S, const std::string& line, int lineno) {
  register_aliases(S, line, lineno);
  Parser p(S, line, lineno, 0);
  Stmt st;
  st.line = lineno;
  static const std::regex def(R"(^\s*([A-Za-z_][A-Za-z0-9_']*)\s*=([^=][\s\S]*)$)");
  std::smatch m;
  if (std::regex_match(line, m, def)) {
    std::string name = m[1];
    if (kAtoms.count(name) || kVerbs.count(name) || name == "t" || name == "over")
      p.fail("'" + name + "' is reserved");
    if (S.defs.count(name)) p.fail("'" + name + "' is already defined");
    st.kind = Stmt::Def;
    st.name = name;
    p.i_ = static_cast<size_t>(m.position(2));
    st.args = {p.expr()};
    p.finish();
    S.defs[name] = st.args[0];
    S.prev_def = S.last_def;
    S.last_def = name;
    return st;
  }
  std::string w = p.peek_ident();
  bool verb = kVerbs.count(w) && (!kAtoms.count(w) || p.after_ident() != '(');
  if (!verb) {
    st.kind = Stmt::Show;
    st.args = {p.expr()};
    p.finish();
    return st;
  }
  p.ident();
  if (w == "print") {
    st.args = {p.expr()};
  } else if (w == "integrate" || w == "fourier" || w == "convolve" || w == "reflect") {
    st.args = {p.verb_form(w)};
  } else if (w == "specialize") {
    st.kind = Stmt::Specialize;
    st.args = {p.expr()};
  } else if (w == "check") {
    st.kind = Stmt::Check;
    p.ws();
    size_t at = p.i_;
    st.sub = p.ident();
    if (st.sub == "inversion") {
      st.args = {p.unary()};
    } else if (st.sub == "partial") {
      st.args = {p.unary()};
      p.ws();
      size_t a = p.i_;
      if (p.i_ < p.src_.size() && p.src_[p.i_] == '-') ++p.i_;
      while (p.i_ < p.src_.size() && std::isdigit(static_cast<unsigned char>(p.src_[p.i_]))) ++p.i_;
      std::string num = p.src_.substr(a, p.i_ - a);
      if (num.empty() || num == "-" || num.size() > 9) p.fail("expected the integer alpha", a);
      st.alpha = std::stoi(num);
    } else if (st.sub == "convtheorem" || st.sub == "equal") {
      NodeP a = p.unary();
      st.args = {a, p.unary()};
    } else {
      p.fail("unknown check '" + st.sub + "' (inversion, partial, convtheorem, equal)", at);
    }
  } else {
    st.kind = Stmt::Oracle;
    p.ws();
    size_t at = p.i_;
    st.sub = p.ident();
    if (st.sub == "integrate" || st.sub == "fourier") {
      st.args = {p.unary()};
    } else if (st.sub == "convolve") {
      NodeP a = p.unary();
      st.args = {a, p.unary()};
    } else {
      p.fail("unknown oracle mode '" + st.sub + "' (integrate, fourier, convolve)", at);
    }
  }
  p.finish();
  return st;
}

int prec(const NodeP& e) {
  switch (e->kind) {
    case Node::Add:
    case Node::Sub:
      return 1;
    case Node::Mul:
    case Node::LScale:
      return 2;
    case Node::Neg:
      return 3;
    default:
      return 4;
  }
}

std::string print_at(const NodeP& e, int ctx) {
  std::string s;
  switch (e->kind) {
    case Node::Atom:
    case Node::Cond:
    case Node::PolyF:
    case Node::Name:
      s = e->text;
      if (e->kind == Node::Atom && !s.empty() && s[0] == '-') s = "(" + s + ")";
      break;
    case Node::LPow:
      s = "L^(" + e->text + ")";
      break;
    case Node::Add:
      s = print_at(e->kids[0], 1) + " + " + print_at(e->kids[1], 2);
      break;
    case Node::Sub:
      s = print_at(e->kids[0], 1) + " - " + print_at(e->kids[1], 2);
      break;
    case Node::Neg:
      s = "-" + print_at(e->kids[0], 4);
      break;
    case Node::Mul:
      for (size_t i = 0; i < e->kids.size(); ++i) s += (i ? " * " : "") + print_at(e->kids[i], 3);
      break;
    case Node::LScale:
      s = "L^(" + std::to_string(e->k) + ") * " + print_at(e->kids[0], 3);
      break;
    case Node::Integrate: {
      s = "integrate(" + print_at(e->kids[0], 0);
      for (size_t i = 0; i < e->over.size(); ++i) s += (i ? ", " : "; ") + e->over[i];
      s += ")";
      break;
    }
    case Node::Fourier:
      s = "fourier(" + print_at(e->kids[0], 0) + ")";
      break;
    case Node::Convolve:
      s = "convolve(" + print_at(e->kids[0], 0) + "; " + print_at(e->kids[1], 0) + ")";
      break;
    case Node::Reflect:
      s = "reflect(" + print_at(e->kids[0], 0) + ")";
      break;
  }
  return prec(e) < ctx ? "(" + s + ")" : s;
}

}  // namespace

void parse_into(Script& s, const std::string& src, int first_line) {
  int lineno = first_line - 1;
  size_t a = 0;
  while (a <= src.size()) {
    size_t b = src.find('\n', a);
    if (b == std::string::npos) b = src.size();
    std::string line = src.substr(a, b - a);
    ++lineno;
    a = b + 1;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    s.stmts.push_back(parse_stmt(s, line, lineno));
  }
}

Script parse_script(const std::string& src) {
  Script s;
  parse_into(s, src);
  return s;
}

NodeP parse_expr(Script& s, const std::string& src) {
  register_aliases(s, src, 0);
  Parser p(s, src, 0, 0);
  NodeP e = p.expr();
  p.finish();
  return e;
}

std::string print_expr(const NodeP& e) { return print_at(e, 0); }

std::string print_stmt(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Def:
      return s.name + " = " + print_expr(s.args[0]);
    case Stmt::Show:
      return "print " + print_expr(s.args[0]);
    case Stmt::Specialize:
      return "specialize " + print_expr(s.args[0]);
    case Stmt::Check: {
      std::string out = "check " + s.sub;
      for (auto& a : s.args) out += " " + print_at(a, 4);
      if (s.sub == "partial") out += " " + std::to_string(s.alpha);
      return out;
    }
    case Stmt::Oracle: {
      std::string out = "oracle " + s.sub;
      for (auto& a : s.args) out += " " + print_at(a, 4);
      return out;
    }
  }
  return "";
}

std::string print_script(const Script& s) {
  std::string out;
  for (auto& st : s.stmts) out += print_stmt(st) + "\n";
  return out;
}

}  // namespace mk::dsl
