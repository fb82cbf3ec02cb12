#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "msrr/synth.hpp"

namespace msrr {

Expr Expr::unary(Op op, Expr a) {
  Expr e{op, -1, false, {}};
  e.kids.push_back(std::move(a));
  return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  Expr e{op, -1, false, {}};
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}

bool Expr::eval(Valuation cur, Valuation nxt) const {
  switch (op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Var: return (((next ? nxt : cur) >> var) & 1u) != 0;
    case Op::Not: return !kids[0].eval(cur, nxt);
    case Op::And: return kids[0].eval(cur, nxt) && kids[1].eval(cur, nxt);
    case Op::Or: return kids[0].eval(cur, nxt) || kids[1].eval(cur, nxt);
    case Op::Implies: return !kids[0].eval(cur, nxt) || kids[1].eval(cur, nxt);
    case Op::Iff: return kids[0].eval(cur, nxt) == kids[1].eval(cur, nxt);
  }
  return false;
}

bool Expr::mentions_next() const {
  return any_next_var([](int) { return true; });
}

int MissionSpec::env_count() const {
  return static_cast<int>(std::count_if(props.begin(), props.end(), [](const Proposition& p) { return p.side == Side::Env; }));
}

int MissionSpec::sys_count() const { return static_cast<int>(props.size()) - env_count(); }

std::optional<int> MissionSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < props.size(); ++i)
    if (props[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::string MissionSpec::describe(Valuation v, std::optional<Side> side) const {
  std::string out;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (side && props[i].side != *side) continue;
    if (!out.empty()) out += ' ';
    if (!((v >> i) & 1u)) out += '!';
    out += props[i].name;
  }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

enum class Section { None, EnvInit, EnvTrans, EnvLive, SysInit, SysTrans, SysLive, Bindings, Complete };

const std::vector<std::pair<std::string, Section>>& section_names() {
  static const std::vector<std::pair<std::string, Section>> names{
      {"ENV INIT", Section::EnvInit},   {"ENV TRANS", Section::EnvTrans}, {"ENV LIVE", Section::EnvLive},
      {"SYS INIT", Section::SysInit},   {"SYS TRANS", Section::SysTrans}, {"SYS LIVE", Section::SysLive},
      {"BINDINGS", Section::Bindings},  {"COMPLETE", Section::Complete}};
  return names;
}

struct Token {
  enum class Kind { Ident, Not, And, Or, Implies, Iff, LParen, RParen, Prime, End };
  Kind kind;
  std::string text;
  int column;
};

std::vector<Token> lex(const std::string& s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, s.substr(i, j - i), col});
      i = j;
    } else if (s.compare(i, 3, "<->") == 0) {
      out.push_back({Token::Kind::Iff, "<->", col});
      i += 3;
    } else if (s.compare(i, 2, "->") == 0) {
      out.push_back({Token::Kind::Implies, "->", col});
      i += 2;
    } else {
      Token::Kind k;
      switch (c) {
        case '!': k = Token::Kind::Not; break;
        case '&': k = Token::Kind::And; break;
        case '|': k = Token::Kind::Or; break;
        case '(': k = Token::Kind::LParen; break;
        case ')': k = Token::Kind::RParen; break;
        case '\'': k = Token::Kind::Prime; break;
        default: throw SyntaxError(std::string("unexpected character '") + c + "'", line, col,
                                   {"proposition", "!", "(", "true", "false", "next"});
      }
      out.push_back({k, std::string(1, c), col});
      ++i;
    }
  }
  out.push_back({Token::Kind::End, "", static_cast<int>(s.size()) + 1});
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::vector<Token> toks, int line, const std::map<std::string, int>& names)
      : toks_(std::move(toks)), line_(line), names_(names) {}

  bool peek_ident(std::string_view w) const { return at().kind == Token::Kind::Ident && at().text == w; }
  void take_ident(std::string_view w) {
    if (!peek_ident(w)) fail({std::string(w)});
    ++pos_;
  }
  bool done() const { return at().kind == Token::Kind::End; }
  void expect_end() {
    if (!done()) fail({"end of formula", "&", "|", "->", "<->"});
  }

  // iff := imp ('<->' imp)*
  Expr formula() {
    Expr e = implication();
    while (at().kind == Token::Kind::Iff) {
      ++pos_;
      e = Expr::binary(Expr::Op::Iff, std::move(e), implication());
    }
    return e;
  }

  // Parses up to (not including) the keyword `stop`.
  Expr formula_until(std::string_view stop) {
    stop_ = std::string(stop);
    Expr e = formula();
    stop_.clear();
    return e;
  }

 private:
  const Token& at() const { return toks_[pos_]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = at();
    const std::string found = t.kind == Token::Kind::End ? "end of line" : "'" + t.text + "'";
    const std::string message = "unexpected " + found + ", expected " + join(expected);
    throw SyntaxError(message, line_, t.column, std::move(expected));
  }

  Expr implication() {
    Expr lhs = disjunction();
    if (at().kind == Token::Kind::Implies) {
      ++pos_;
      return Expr::binary(Expr::Op::Implies, std::move(lhs), implication());
    }
    return lhs;
  }

  Expr disjunction() {
    Expr e = conjunction();
    while (at().kind == Token::Kind::Or) {
      ++pos_;
      e = Expr::binary(Expr::Op::Or, std::move(e), conjunction());
    }
    return e;
  }

  Expr conjunction() {
    Expr e = unary();
    while (at().kind == Token::Kind::And) {
      ++pos_;
      e = Expr::binary(Expr::Op::And, std::move(e), unary());
    }
    return e;
  }

  Expr unary() {
    if (at().kind == Token::Kind::Not) {
      ++pos_;
      return Expr::unary(Expr::Op::Not, unary());
    }
    if (peek_ident("next")) {
      if (in_next_) throw SyntaxError("nested next", line_, at().column, {"proposition"});
      ++pos_;
      if (at().kind != Token::Kind::LParen) fail({"("});
      ++pos_;
      in_next_ = true;
      Expr e = formula();
      in_next_ = false;
      if (at().kind != Token::Kind::RParen) fail({")"});
      ++pos_;
      return e;
    }
    return atom();
  }

  Expr atom() {
    const Token& t = at();
    if (t.kind == Token::Kind::LParen) {
      ++pos_;
      Expr e = formula();
      if (at().kind != Token::Kind::RParen) fail({")", "&", "|", "->", "<->"});
      ++pos_;
      return e;
    }
    if (t.kind != Token::Kind::Ident || (!stop_.empty() && t.text == stop_))
      fail({"proposition", "!", "(", "true", "false", "next"});
    ++pos_;
    if (t.text == "true" || t.text == "false") return Expr::constant(t.text == "true");
    auto it = names_.find(t.text);
    if (it == names_.end()) throw UnboundProposition(t.text, line_);
    bool next = in_next_;
    if (at().kind == Token::Kind::Prime) {
      if (in_next_) throw SyntaxError("nested next", line_, at().column, {"proposition"});
      next = true;
      ++pos_;
    }
    return Expr::variable(it->second, next);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
  const std::map<std::string, int>& names_;
  bool in_next_ = false;
  std::string stop_;
};

Expr conj(Expr a, Expr b) {
  if (a.op == Expr::Op::True) return b;
  if (b.op == Expr::Op::True) return a;
  return Expr::binary(Expr::Op::And, std::move(a), std::move(b));
}

Expr shift_next(Expr e) {
  if (e.op == Expr::Op::Var) e.next = true;
  for (auto& k : e.kids) k = shift_next(std::move(k));
  return e;
}

struct Line {
  int number;
  Section section;
  std::string text;
};

Binding parse_binding_rhs(const std::string& rhs, int line) {
  Binding b;
  const auto open = rhs.find('(');
  if (open == std::string::npos) {
    b.function = trim(rhs);
  } else {
    b.function = trim(rhs.substr(0, open));
    const auto close = rhs.rfind(')');
    if (close == std::string::npos || close < open || !trim(rhs.substr(close + 1)).empty())
      throw SyntaxError("unterminated binding arguments", line, static_cast<int>(rhs.size()) + 1, {")"});
    std::stringstream args(rhs.substr(open + 1, close - open - 1));
    std::string a;
    while (std::getline(args, a, ',')) {
      a = trim(a);
      if (!a.empty()) b.args.push_back(a);
    }
  }
  if (b.function.empty() || !std::all_of(b.function.begin(), b.function.end(), ident_char))
    throw SyntaxError("binding needs a function name", line, 1, {"function(args)"});
  return b;
}

}  // namespace

SyntaxError::SyntaxError(const std::string& message, int line, int column, std::vector<std::string> expected)
    : ParseError("column " + std::to_string(column) + ": " + message, line),
      column_(column),
      expected_(std::move(expected)) {}

MissionSpec parse_spec(std::string_view text) {
  std::vector<Line> lines;
  Section current = Section::None;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string t = trim(raw);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw SyntaxError("unterminated section header", number, static_cast<int>(t.size()) + 1, {"]"});
      const std::string name = trim(t.substr(1, t.size() - 2));
      auto it = std::find_if(section_names().begin(), section_names().end(), [&](const auto& p) { return p.first == name; });
      if (it == section_names().end()) {
        std::vector<std::string> expected;
        for (const auto& p : section_names()) expected.push_back("[" + p.first + "]");
        throw SyntaxError("unknown section [" + name + "]", number, 1, expected);
      }
      current = it->second;
      continue;
    }
    if (current == Section::None) throw SyntaxError("text before the first section", number, 1, {"[SECTION]"});
    lines.push_back({number, current, raw});
  }

  // Bindings first, so declaration order does not depend on section order.
  std::vector<Proposition> env;
  std::vector<Proposition> sys;
  std::map<std::string, int> seen;
  for (const auto& l : lines) {
    if (l.section != Section::Bindings) continue;
    const std::string t = trim(l.text);
    const auto eq = t.find('=');
    std::istringstream lhs(eq == std::string::npos ? t : t.substr(0, eq));
    std::string side;
    std::string name;
    std::string extra;
    lhs >> side >> name >> extra;
    if ((side != "env" && side != "sys") || name.empty() || !extra.empty() || eq == std::string::npos)
      throw SyntaxError("malformed binding", l.number, 1, {"env <name> = f(args)", "sys <name> = f(args)"});
    if (!std::all_of(name.begin(), name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }) ||
        std::isdigit(static_cast<unsigned char>(name.front())) || name == "true" || name == "false" || name == "next")
      throw SyntaxError("invalid proposition name '" + name + "'", l.number, 1, {"identifier"});
    if (seen.count(name)) throw SyntaxError("proposition '" + name + "' declared twice", l.number, 1);
    seen[name] = 0;
    Proposition p{name, side == "env" ? Side::Env : Side::Sys, parse_binding_rhs(t.substr(eq + 1), l.number)};
    (p.side == Side::Env ? env : sys).push_back(std::move(p));
  }

  MissionSpec spec;
  for (auto& p : env) spec.props.push_back(std::move(p));
  for (auto& p : sys) spec.props.push_back(std::move(p));
  std::map<std::string, int> names;
  for (std::size_t i = 0; i < spec.props.size(); ++i) names[spec.props[i].name] = static_cast<int>(i);
  const int env_count = spec.env_count();
  const auto is_sys = [&](int v) { return v >= env_count; };
  const auto mentions_sys = [&](const Expr& e) {
    std::function<bool(const Expr&)> rec = [&](const Expr& x) {
      if (x.op == Expr::Op::Var) return is_sys(x.var);
      return std::any_of(x.kids.begin(), x.kids.end(), rec);
    };
    return rec(e);
  };

  for (const auto& l : lines) {
    if (l.section == Section::Bindings) continue;
    FormulaParser p(lex(l.text, l.number), l.number, names);
    const bool trans = l.section == Section::EnvTrans || l.section == Section::SysTrans;
    const bool live = l.section == Section::EnvLive || l.section == Section::SysLive;
    bool always = false;
    Expr f;
    if (p.peek_ident("always")) {
      p.take_ident("always");
      if (p.peek_ident("eventually")) {
        if (!live) throw SyntaxError("'always eventually' belongs in a LIVE section", l.number, 1, {"formula"});
        p.take_ident("eventually");
      } else {
        always = true;
      }
      f = p.formula();
    } else if (p.peek_ident("if")) {
      p.take_ident("if");
      Expr cond = p.formula_until("then");
      p.take_ident("then");
      f = Expr::binary(Expr::Op::Implies, std::move(cond), p.formula());
    } else {
      f = p.formula();
    }
    p.expect_end();

    if (!trans && f.mentions_next())
      throw SyntaxError("next-step reference outside a TRANS section", l.number, 1, {"current-step formula"});
    if (l.section == Section::EnvInit && mentions_sys(f))
      throw SyntaxError("environment formula refers to a system proposition", l.number, 1, {"environment proposition"});

    switch (l.section) {
      case Section::EnvInit: spec.env_init = conj(std::move(spec.env_init), std::move(f)); break;
      case Section::SysInit: spec.sys_init = conj(std::move(spec.sys_init), std::move(f)); break;
      case Section::EnvTrans:
      case Section::SysTrans: {
        const bool env_side = l.section == Section::EnvTrans;
        if (env_side && f.any_next_var(is_sys))
          throw SyntaxError("environment assumption refers to a next-step system proposition", l.number, 1,
                            {"environment proposition"});
        Expr& init = env_side ? spec.env_init : spec.sys_init;
        Expr& tr = env_side ? spec.env_trans : spec.sys_trans;
        if (always && !f.mentions_next()) {
          if (env_side && mentions_sys(f))
            throw SyntaxError("environment formula refers to a system proposition", l.number, 1,
                              {"environment proposition"});
          init = conj(std::move(init), f);
          f = shift_next(std::move(f));
        }
        tr = conj(std::move(tr), std::move(f));
        break;
      }
      case Section::EnvLive: spec.env_live.push_back(std::move(f)); break;
      case Section::SysLive: spec.sys_live.push_back(std::move(f)); break;
      case Section::Complete:
        spec.complete = spec.complete ? conj(std::move(*spec.complete), std::move(f)) : std::move(f);
        break;
      default: break;
    }
  }
  return spec;
}

MissionSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace msrr
