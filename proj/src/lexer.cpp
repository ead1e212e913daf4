#include "mk/lexer.hpp"

#include <cctype>

namespace mk {

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto is_id = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'';
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    size_t st = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Token::Num, s.substr(st, i - st), st});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && is_id(s[i])) ++i;
      out.push_back({Token::Ident, s.substr(st, i - st), st});
    } else {
      static const char* two[] = {">=", "<=", "==", "!=", "&&", "||"};
      std::string op(1, c);
      for (auto* t : two)
        if (s.compare(i, 2, t) == 0) op = t;
      i += op.size();
      out.push_back({Token::Op, op, st});
    }
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

void TokenStream::fail(const std::string& what) const {
  const Token& t = peek();
  std::string near = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
  throw ParseError("parse error at offset " + std::to_string(t.pos) + " near " + near + ": " +
                   what + " in `" + src_ + "`");
}

std::string TokenStream::ident() {
  if (peek().kind != Token::Ident) fail("expected identifier");
  return next().text;
}

Int TokenStream::integer() {
  if (peek().kind != Token::Num) fail("expected integer");
  return Int(next().text);
}

Int TokenStream::signed_integer() {
  if (eat_op("-")) return -integer();
  eat_op("+");
  return integer();
}

Rat TokenStream::rational() {
  bool neg = eat_op("-");
  Rat r(integer());
  if (is_op("/") && peek(1).kind == Token::Num) {
    next();
    r /= Rat(integer());
  }
  return neg ? Rat(-r) : r;
}

}  // namespace mk
