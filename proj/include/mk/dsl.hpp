#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mk/cef.hpp"
#include "mk/oracle.hpp"
#include "mk/specialize.hpp"

namespace mk::dsl {

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
  enum Kind {
    Atom,   // ball, ann, acfix, echar, E, val, numbers
    Name,
    Add,
    Sub,
    Neg,
    Mul,    // kids may include the modifiers below
    Cond,   // indicator(...)
    LPow,   // L^(...)
    PolyF,  // poly(...)
    Integrate,
    Fourier,
    Convolve,
    Reflect,
    LScale  // L^k * kid, built by identity checks
  };
  Kind kind = Atom;
  std::string text;  // canonical atom / modifier text, or the name
  CEF value;         // Atom
  std::vector<NodeP> kids;
  std::vector<std::string> over;  // Integrate: empty means all variables
  int k = 0;                      // LScale
  NodeP def;                      // Name
};

struct Stmt {
  enum Kind { Def, Show, Check, Specialize, Oracle } kind = Show;
  int line = 0;
  std::string name;  // Def
  std::string sub;   // Check: inversion|partial|convtheorem|equal; Oracle: integrate|fourier|convolve
  std::vector<NodeP> args;
  int alpha = 0;  // Check partial
};

struct Script {
  std::vector<Stmt> stmts;
  std::map<std::string, NodeP> defs;
  std::map<std::string, std::string> aliases;  // th -> ord_x
  std::string last_def, prev_def;
};

/// Parses a whole script; ParseError messages carry "line L, column C".
Script parse_script(const std::string& src);
/// Parses further statements in the context of an existing script.
void parse_into(Script& s, const std::string& src, int first_line = 1);
/// Parses one expression in the script's context.
NodeP parse_expr(Script& s, const std::string& src);

std::string print_expr(const NodeP& e);
std::string print_stmt(const Stmt& s);
std::string print_script(const Script& s);

struct Config {
  FieldSpec K;
  OracleOptions oracle;
  int samples = 4;
  unsigned seed = 1;
};

/// Symbolic and oracle evaluation of expression trees.
class Evaluator {
 public:
  explicit Evaluator(Config c) : cfg_(std::move(c)) {}
  const Config& config() const { return cfg_; }

  CEF sym(const NodeP& e);
  /// Outermost integral, transform or convolution through the oracle, inner
  /// arguments symbolically; other nodes through the oracle's pointwise evaluator.
  Cyclotomic oracle_at(const NodeP& e, const FieldSpec& K, const Point& pt);

  /// Points with small Laurent coordinates, reproducible from the seed.
  std::vector<Point> sample_points(const std::vector<std::string>& vars, unsigned salt);

 private:
  Config cfg_;
  std::map<NodeP, CEF> cache_;  // owning keys, so addresses are never reused
};

/// Two sides of the identity a check statement asserts.
std::pair<NodeP, NodeP> identity_of(const Stmt& s, Evaluator& ev);

enum class Mode { All, ChecksOnly };

/// Runs statements; ok turns false on a failed check or an oracle mismatch.
nlohmann::json run(const Script& s, Evaluator& ev, Mode mode, bool& ok);
/// Evaluates every check identity through the oracle over Q_p and F_p((t)).
nlohmann::json transfer(const Script& s, Evaluator& ev, bool& ok);

/// Human-readable rendering of a report.
std::string render(const nlohmann::json& report);

}  // namespace mk::dsl
