#pragma once

#include <string>
#include <vector>

#include "mk/arith.hpp"

namespace mk {

struct Token {
  enum Kind { Ident, Num, Op, End } kind;
  std::string text;
  size_t pos;
};

/// Splits DSL text into identifiers, unsigned integers and operators.
/// Two-character operators: >= <= == != && ||.
std::vector<Token> tokenize(const std::string& s);

class TokenStream {
 public:
  explicit TokenStream(const std::string& src) : src_(src), toks_(tokenize(src)) {}

  const Token& peek(size_t k = 0) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::End; }
  bool is_op(const std::string& op, size_t k = 0) const {
    return peek(k).kind == Token::Op && peek(k).text == op;
  }
  bool is_ident(const std::string& id, size_t k = 0) const {
    return peek(k).kind == Token::Ident && peek(k).text == id;
  }
  bool eat_op(const std::string& op) {
    if (!is_op(op)) return false;
    ++i_;
    return true;
  }
  void expect_op(const std::string& op) {
    if (!eat_op(op)) fail("expected '" + op + "'");
  }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  std::string ident();
  Int integer();
  /// Optionally signed integer.
  Int signed_integer();
  /// Integer or a/b.
  Rat rational();

  size_t mark() const { return i_; }
  void reset(size_t m) { i_ = m; }

  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::string src_;
  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace mk
