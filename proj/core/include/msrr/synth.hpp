#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "msrr/types.hpp"

namespace msrr {

/// Bit i holds proposition i. Environment propositions come first.
using Valuation = std::uint32_t;

enum class Side { Env, Sys };

/// `function(arg, ...)` attached to a proposition; interpreted by the executor.
struct Binding {
  std::string function;
  std::vector<std::string> args;
  bool operator==(const Binding&) const = default;
};

struct Proposition {
  std::string name;
  Side side = Side::Env;
  Binding binding;
};

/// Boolean formula over current and next-step propositions.
struct Expr {
  enum class Op { True, False, Var, Not, And, Or, Implies, Iff };
  Op op = Op::True;
  int var = -1;
  bool next = false;
  std::vector<Expr> kids;

  static Expr constant(bool b) { return {b ? Op::True : Op::False, -1, false, {}}; }
  static Expr variable(int v, bool next = false) { return {Op::Var, v, next, {}}; }
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);

  bool eval(Valuation current, Valuation next_step) const;
  bool mentions_next() const;
  /// True if some next-step variable satisfies `pred`.
  template <typename Pred>
  bool any_next_var(Pred pred) const {
    if (op == Op::Var) return next && pred(var);
    for (const auto& k : kids)
      if (k.any_next_var(pred)) return true;
    return false;
  }
};

struct MissionSpec {
  std::vector<Proposition> props;
  Expr env_init = Expr::constant(true);
  Expr sys_init = Expr::constant(true);
  Expr env_trans = Expr::constant(true);
  Expr sys_trans = Expr::constant(true);
  std::vector<Expr> env_live;  // empty means [true]
  std::vector<Expr> sys_live;
  std::optional<Expr> complete;

  int env_count() const;
  int sys_count() const;
  std::optional<int> index_of(std::string_view name) const;
  /// Renders a valuation as "a !b c", restricted to one side if given.
  std::string describe(Valuation v, std::optional<Side> side = std::nullopt) const;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& message, int line, int column, std::vector<std::string> expected = {});
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int column_;
  std::vector<std::string> expected_;
};

class UnboundProposition : public ParseError {
 public:
  UnboundProposition(const std::string& name, int line)
      : ParseError("proposition '" + name + "' is not declared in [BINDINGS]", line), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class BoundExceeded : public Error {
 public:
  BoundExceeded(int count, int bound)
      : Error(std::to_string(count) + " propositions exceed the synthesis bound of " + std::to_string(bound)) {}
};

class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

/// Parses the sectioned spec format documented in docs/formats.md.
MissionSpec parse_spec(std::string_view text);
MissionSpec load_spec(const std::string& path);

struct AutomatonState {
  Valuation valuation = 0;  // full valuation (env and sys bits)
  int goal = 0;             // index of the system liveness goal being pursued
};

class MissionAutomaton {
 public:
  struct Step {
    int state;
    Valuation sys;  // system bits only, already shifted
  };

  const MissionSpec& spec() const { return spec_; }
  const std::vector<AutomatonState>& states() const { return states_; }
  /// Successor of `state` per admissible environment valuation (env bits only).
  const std::map<Valuation, int>& transitions(int state) const { return transitions_.at(state); }

  /// State entered when the environment starts in `env`. Throws AssumptionViolated.
  Step initial(Valuation env) const;
  /// Throws AssumptionViolated if `env` breaks the environment's safety assumption.
  Step advance(int state, Valuation env) const;

  /// Text transition table.
  std::string dump() const;

 private:
  friend class Synthesizer;
  MissionSpec spec_;
  std::vector<AutomatonState> states_;
  std::vector<std::map<Valuation, int>> transitions_;
  std::map<Valuation, int> initial_;
};

struct Unrealizable {
  /// Environment valuations, from the initial step, that defeat every system response.
  std::vector<Valuation> counter_trace;
  std::string reason;
};

using SynthesisOutcome = std::variant<MissionAutomaton, Unrealizable>;

struct SynthesisOptions {
  int max_propositions = 16;
};

SynthesisOutcome synthesize(const MissionSpec& spec, const SynthesisOptions& options = {});

/// Winning region of the system, indexed by full valuation. Exposed for tests.
std::vector<std::uint8_t> winning_region(const MissionSpec& spec, const SynthesisOptions& options = {});

}  // namespace msrr
