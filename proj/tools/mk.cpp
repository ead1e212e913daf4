#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mk/dsl.hpp"

using namespace mk;
using nlohmann::json;

namespace {

struct Flags {
  long p = 3;
  std::string field = "qp";
  long twist = 0;
  int B = 3, N = 8, samples = 4;
  unsigned seed = 1;
  bool json = false;
  std::vector<std::string> inline_src, exprs, positional;
  std::string mode;
};

void common(CLI::App* sub, Flags& f, bool with_targets) {
  sub->add_option("--p", f.p, "residue characteristic")->envname("MK_PRIME");
  sub->add_option("--field", f.field, "qp or fpt")->check(CLI::IsMember({"qp", "fpt"}));
  sub->add_option("--twist", f.twist, "character twist: unit 1+k*p on Q_p, coefficient k at t^-1 on F_p((t))");
  sub->add_option("--B", f.B, "oracle region ord x >= -B");
  sub->add_option("--N", f.N, "oracle precision")->envname("MK_PRECISION");
  sub->add_option("--samples", f.samples, "sample points per comparison");
  sub->add_option("--seed", f.seed, "seed for sample points");
  sub->add_flag("--json", f.json, "JSON report");
  sub->add_option("-e", f.inline_src, "inline script line")->allow_extra_args(false);
  if (with_targets) sub->add_option("--expr", f.exprs, "target expression")->allow_extra_args(false);
  sub->add_option("args", f.positional, "script file ('-' for stdin) or target expressions");
}

std::string slurp(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mk: exponential constructible functions"};
  app.require_subcommand(1);
  Flags f;
  std::map<std::string, CLI::App*> subs;
  for (auto [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"run", "run every statement"},
           {"check", "run the check statements"},
           {"integrate", "integrate the target over all variables"},
           {"fourier", "Fourier transform of the target"},
           {"convolve", "convolution of two targets"},
           {"specialize", "specialize the target at --p"},
           {"oracle", "compare the symbolic result with the oracle"},
           {"transfer", "evaluate every check over Q_p and F_p((t))"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "oracle")
      sub->add_option("mode", f.mode, "integrate, fourier or convolve")
          ->required()
          ->check(CLI::IsMember({"integrate", "fourier", "convolve"}));
    common(sub, f, name != "run" && name != "check" && name != "transfer");
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  std::string cmd;
  for (auto& [name, sub] : subs)
    if (sub->parsed()) cmd = name;

  dsl::Config cfg;
  try {
    cfg.K.p = f.p;
    cfg.K.kind = FieldSpec::parse_kind(f.field);
    if (f.twist) {
      if (cfg.K.kind == FieldSpec::Qp)
        cfg.K.unit = 1 + Rat(f.twist * f.p);
      else
        cfg.K.mult[-1] = f.twist;
    }
    cfg.K.validate();
  } catch (const Error& e) {
    std::cerr << "mk: " << e.what() << "\n";
    return 2;
  }
  if (f.B < 0 || f.N < 1 || f.samples < 1) {
    std::cerr << "mk: --B must be >= 0, --N and --samples >= 1\n";
    return 2;
  }
  cfg.oracle.B = f.B;
  cfg.oracle.N = f.N;
  cfg.samples = f.samples;
  cfg.seed = f.seed;

  // Positional arguments are files when they exist, target expressions otherwise.
  std::string src;
  std::vector<std::string> targets = f.exprs;
  bool have_file = false;
  for (auto& a : f.positional) {
    if (a == "-") {
      src += slurp(std::cin);
      have_file = true;
    } else if (std::filesystem::is_regular_file(a)) {
      std::ifstream in(a);
      src += slurp(in);
      have_file = true;
    } else if (cmd == "run" || cmd == "check" || cmd == "transfer") {
      std::cerr << "mk: no such file: " << a << "\n";
      return 2;
    } else {
      targets.push_back(a);
    }
  }
  if (!src.empty() && src.back() != '\n') src += '\n';
  for (auto& line : f.inline_src) src += line + "\n";
  if (!have_file && f.inline_src.empty() && targets.empty()) src = slurp(std::cin);

  dsl::Evaluator ev(cfg);
  dsl::Script script;
  json results;
  bool ok = true;
  try {
    dsl::parse_into(script, src);
    if (cmd == "run" || cmd == "check") {
      results = dsl::run(script, ev, cmd == "run" ? dsl::Mode::All : dsl::Mode::ChecksOnly, ok);
    } else if (cmd == "transfer") {
      results = dsl::transfer(script, ev, ok);
    } else {
      std::string op = cmd == "oracle" ? f.mode : cmd;
      size_t need = op == "convolve" ? 2 : 1;
      std::vector<dsl::NodeP> args;
      for (auto& t : targets) args.push_back(dsl::parse_expr(script, t));
      if (args.empty()) {
        std::vector<std::string> names;
        if (need == 2 && !script.prev_def.empty()) names.push_back(script.prev_def);
        if (!script.last_def.empty()) names.push_back(script.last_def);
        for (auto& n : names) args.push_back(dsl::parse_expr(script, n));
      }
      if (args.size() != need) {
        std::cerr << "mk: " << cmd << " needs " << need << " target" << (need == 2 ? "s" : "") << "\n";
        return 2;
      }
      dsl::Script one;
      dsl::Stmt st;
      st.line = 0;
      if (cmd == "oracle") {
        st.kind = dsl::Stmt::Oracle;
        st.sub = op;
        st.args = args;
      } else if (cmd == "specialize") {
        st.kind = dsl::Stmt::Specialize;
        st.args = args;
      } else {
        std::string text = op + (need == 2 ? "((" + dsl::print_expr(args[0]) + "); (" + dsl::print_expr(args[1]) + "))"
                                           : "(" + dsl::print_expr(args[0]) + ")");
        st.args = {dsl::parse_expr(script, text)};
      }
      one.stmts = {st};
      results = dsl::run(one, ev, dsl::Mode::All, ok);
    }
  } catch (const ParseError& e) {
    std::cerr << "mk: parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "mk: " << e.what() << "\n";
    return 3;
  }

  bool errored = false;
  for (auto& r : results) errored |= r.contains("error");
  if (f.json) {
    json out = {{"command", cmd}, {"field", cfg.K.str()}, {"ok", ok && !errored}, {"results", results}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << dsl::render(results);
  }
  if (errored) return 3;
  return ok ? 0 : 1;
}
