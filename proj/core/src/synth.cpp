#include <algorithm>
#include <queue>
#include <sstream>

#include "msrr/synth.hpp"

namespace msrr {

using Set = std::vector<std::uint8_t>;

/// Explicit-state GR(1) game over all valuations of the spec's propositions.
class Synthesizer {
 public:
  Synthesizer(const MissionSpec& spec, const SynthesisOptions& options) : spec_(spec) {
    const int n = static_cast<int>(spec.props.size());
    if (n > options.max_propositions) throw BoundExceeded(n, options.max_propositions);
    ne_ = spec.env_count();
    ns_ = spec.sys_count();
    states_ = std::size_t{1} << n;
    build_moves();
    env_goals_ = goal_sets(spec.env_live);
    sys_goals_ = goal_sets(spec.sys_live);
  }

  Set solve() {
    Set z(states_, 1);
    while (true) {
      Set before = z;
      for (std::size_t j = 0; j < sys_goals_.size(); ++j) z = least_y(j, z, nullptr);
      if (z == before) break;
    }
    ranks_.assign(sys_goals_.size(), {});
    for (std::size_t j = 0; j < sys_goals_.size(); ++j) least_y(j, z, &ranks_[j]);
    z_ = z;
    return z;
  }

  SynthesisOutcome extract() {
    solve();
    MissionAutomaton aut;
    aut.spec_ = spec_;
    std::map<std::pair<Valuation, int>, int> ids;
    std::queue<int> open;
    const auto intern = [&](Valuation v, int goal) {
      auto [it, inserted] = ids.try_emplace({v, goal}, static_cast<int>(aut.states_.size()));
      if (inserted) {
        aut.states_.push_back({v, goal});
        aut.transitions_.emplace_back();
        open.push(it->second);
      }
      return it->second;
    };

    for (Valuation e = 0; e < (1u << ne_); ++e) {
      if (!spec_.env_init.eval(e, 0)) continue;
      std::optional<Valuation> pick;
      for (int pass = 0; pass < 2 && !pick; ++pass)
        for (Valuation y = 0; y < (1u << ns_); ++y) {
          const Valuation s = e | (y << ne_);
          if (!spec_.sys_init.eval(s, 0) || !z_[s]) continue;
          if (pass == 0 && !sys_goals_[0][s]) continue;
          pick = s;
          break;
        }
      if (!pick) {
        const bool any_init = [&] {
          for (Valuation y = 0; y < (1u << ns_); ++y)
            if (spec_.sys_init.eval(e | (y << ne_), 0)) return true;
          return false;
        }();
        return Unrealizable{{e}, any_init ? "environment can force a losing play from initial valuation " +
                                                spec_.describe(e, Side::Env)
                                          : "system initial condition is unsatisfiable for " +
                                                spec_.describe(e, Side::Env)};
      }
      aut.initial_[e] = intern(*pick, 0);
    }
    if (aut.initial_.empty()) {
      // Environment cannot start: the spec holds vacuously.
      return aut;
    }

    while (!open.empty()) {
      const int id = open.front();
      open.pop();
      const AutomatonState st = aut.states_[id];
      for (const auto& [e, ys] : moves_[st.valuation]) {
        const auto [succ, goal] = choose(st.valuation, st.goal, e, ys);
        const int to = intern(succ, goal);
        aut.transitions_[id][e] = to;
      }
    }
    return aut;
  }

 private:
  struct Move {
    Valuation env;
    std::vector<Valuation> sys;  // full successor valuations
  };

  void build_moves() {
    moves_.assign(states_, {});
    for (Valuation s = 0; s < states_; ++s)
      for (Valuation e = 0; e < (1u << ne_); ++e) {
        if (!spec_.env_trans.eval(s, e)) continue;
        Move m{e, {}};
        for (Valuation y = 0; y < (1u << ns_); ++y) {
          const Valuation t = e | (y << ne_);
          if (spec_.sys_trans.eval(s, t)) m.sys.push_back(t);
        }
        moves_[s].push_back(std::move(m));
      }
  }

  std::vector<Set> goal_sets(const std::vector<Expr>& live) const {
    std::vector<Set> out;
    for (const auto& f : live) {
      Set g(states_, 0);
      for (Valuation s = 0; s < states_; ++s) g[s] = f.eval(s, 0);
      out.push_back(std::move(g));
    }
    if (out.empty()) out.emplace_back(states_, 1);
    return out;
  }

  Set cpre(const Set& target) const {
    Set out(states_, 0);
    for (Valuation s = 0; s < states_; ++s) {
      bool ok = true;
      for (const auto& m : moves_[s]) {
        ok = std::any_of(m.sys.begin(), m.sys.end(), [&](Valuation t) { return target[t] != 0; });
        if (!ok) break;
      }
      out[s] = ok;
    }
    return out;
  }

  struct Ranks {
    std::vector<Set> y;                // y[r]: states reaching goal j within rank r
    std::vector<std::vector<Set>> x;   // x[r][i]
  };

  Set least_y(std::size_t j, const Set& z, Ranks* record) const {
    const Set goal_step = cpre(z);
    Set y(states_, 0);
    while (true) {
      const Set cy = cpre(y);
      Set start(states_, 0);
      for (std::size_t s = 0; s < states_; ++s) start[s] = (sys_goals_[j][s] && goal_step[s]) || cy[s];
      Set next(states_, 0);
      std::vector<Set> xs;
      for (const auto& env_goal : env_goals_) {
        Set x = z;
        while (true) {
          const Set cx = cpre(x);
          Set nx(states_, 0);
          for (std::size_t s = 0; s < states_; ++s) nx[s] = start[s] || (!env_goal[s] && cx[s]);
          if (nx == x) break;
          x = std::move(nx);
        }
        for (std::size_t s = 0; s < states_; ++s) next[s] = next[s] || x[s];
        xs.push_back(std::move(x));
      }
      if (record) {
        record->y.push_back(next);
        record->x.push_back(std::move(xs));
      }
      if (next == y) return y;
      y = std::move(next);
    }
  }

  // Deterministic strategy: among admissible successors prefer one that
  // satisfies the goal pursued next, then the lowest valuation.
  std::pair<Valuation, int> choose(Valuation s, int j, Valuation e, const std::vector<Valuation>& ys) const {
    const int m = static_cast<int>(sys_goals_.size());
    const auto pick = [&](const Set& allowed, int goal) -> std::optional<Valuation> {
      std::optional<Valuation> fallback;
      for (Valuation t : ys) {
        if (!allowed[t]) continue;
        if (sys_goals_[goal][t]) return t;
        if (!fallback) fallback = t;
      }
      return fallback;
    };
    if (sys_goals_[j][s]) {
      const int nj = (j + 1) % m;
      if (auto t = pick(z_, nj)) return {*t, nj};
    }
    const Ranks& rk = ranks_[j];
    std::size_t r = 0;
    while (r < rk.y.size() && !rk.y[r][s]) ++r;
    if (r < rk.y.size()) {
      if (r > 0)
        if (auto t = pick(rk.y[r - 1], j)) return {*t, j};
      for (std::size_t i = 0; i < rk.x[r].size(); ++i) {
        if (!rk.x[r][i][s]) continue;
        if (auto t = pick(rk.x[r][i], j)) return {*t, j};
      }
    }
    // Unreachable for states in the winning region; stay winning if possible.
    (void)e;
    if (auto t = pick(z_, j)) return {*t, j};
    return {ys.empty() ? s : ys.front(), j};
  }

  const MissionSpec& spec_;
  int ne_ = 0;
  int ns_ = 0;
  std::size_t states_ = 0;
  std::vector<std::vector<Move>> moves_;
  std::vector<Set> env_goals_;
  std::vector<Set> sys_goals_;
  std::vector<Ranks> ranks_;
  Set z_;
};

MissionAutomaton::Step MissionAutomaton::initial(Valuation env) const {
  auto it = initial_.find(env);
  if (it == initial_.end())
    throw AssumptionViolated("initial environment valuation " + spec_.describe(env, Side::Env) +
                             " violates the initial assumption");
  return {it->second, states_[it->second].valuation & ~((1u << spec_.env_count()) - 1u)};
}

MissionAutomaton::Step MissionAutomaton::advance(int state, Valuation env) const {
  const auto& tr = transitions_.at(static_cast<std::size_t>(state));
  auto it = tr.find(env);
  if (it == tr.end())
    throw AssumptionViolated("environment valuation " + spec_.describe(env, Side::Env) + " from state " +
                             std::to_string(state) + " violates the environment assumptions");
  return {it->second, states_[it->second].valuation & ~((1u << spec_.env_count()) - 1u)};
}

std::string MissionAutomaton::dump() const {
  std::ostringstream out;
  out << "states " << states_.size() << "\n";
  for (const auto& [e, id] : initial_) out << "initial [" << spec_.describe(e, Side::Env) << "] -> " << id << "\n";
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& st = states_[i];
    out << "state " << i << " goal " << st.goal << " env [" << spec_.describe(st.valuation, Side::Env) << "] sys ["
        << spec_.describe(st.valuation, Side::Sys) << "]\n";
    for (const auto& [e, to] : transitions_[i]) out << "  [" << spec_.describe(e, Side::Env) << "] -> " << to << "\n";
  }
  return out.str();
}

SynthesisOutcome synthesize(const MissionSpec& spec, const SynthesisOptions& options) {
  Synthesizer s(spec, options);
  return s.extract();
}

std::vector<std::uint8_t> winning_region(const MissionSpec& spec, const SynthesisOptions& options) {
  Synthesizer s(spec, options);
  return s.solve();
}

}  // namespace msrr
