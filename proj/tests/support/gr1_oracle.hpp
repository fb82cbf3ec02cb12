#pragma once

// Independent GR(1) checks: a counter-product parity game solved with
// Zielonka's algorithm, and an SCC model checker for synthesized automata.

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "msrr/synth.hpp"

namespace oracle {

using msrr::Expr;
using msrr::MissionAutomaton;
using msrr::MissionSpec;
using msrr::Valuation;

struct ParityGame {
  std::vector<int> owner;  // 0 = system (even), 1 = environment (odd)
  std::vector<int> priority;
  std::vector<std::vector<int>> succ;
};

inline std::vector<int> attractor(const ParityGame& g, const std::vector<char>& alive, std::vector<int> target,
                                  int player) {
  const int n = static_cast<int>(g.owner.size());
  std::vector<char> in(n, 0);
  for (int t : target) in[t] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (!alive[v] || in[v]) continue;
      int live_succ = 0;
      int into = 0;
      for (int w : g.succ[v])
        if (alive[w]) {
          ++live_succ;
          if (in[w]) ++into;
        }
      const bool pulled = g.owner[v] == player ? into > 0 : (live_succ > 0 && into == live_succ);
      if (pulled) {
        in[v] = 1;
        changed = true;
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

/// Returns the winning region of player 0 (even priorities, max parity).
inline std::vector<char> zielonka(const ParityGame& g, std::vector<char> alive) {
  const int n = static_cast<int>(g.owner.size());
  std::vector<char> w0(n, 0);
  int top = -1;
  for (int v = 0; v < n; ++v)
    if (alive[v]) top = std::max(top, g.priority[v]);
  if (top < 0) return w0;
  const int player = top % 2;
  std::vector<int> tops;
  for (int v = 0; v < n; ++v)
    if (alive[v] && g.priority[v] == top) tops.push_back(v);
  const auto a = attractor(g, alive, tops, player);
  auto sub = alive;
  for (int v : a) sub[v] = 0;
  const auto w_sub0 = zielonka(g, sub);
  std::vector<int> opp_sub;  // opponent's region in the subgame
  for (int v = 0; v < n; ++v)
    if (sub[v] && (w_sub0[v] != 0) != (player == 0)) opp_sub.push_back(v);
  if (opp_sub.empty()) {
    for (int v = 0; v < n; ++v)
      if (alive[v]) w0[v] = player == 0;
    return w0;
  }
  const auto b = attractor(g, alive, opp_sub, 1 - player);
  auto rest = alive;
  for (int v : b) rest[v] = 0;
  const auto w_rest0 = zielonka(g, rest);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    if (rest[v])
      w0[v] = w_rest0[v];
    else
      w0[v] = player == 1;  // b belongs to the opponent of `player`
  }
  return w0;
}

inline std::vector<Expr> goals(const std::vector<Expr>& live) {
  return live.empty() ? std::vector<Expr>{Expr::constant(true)} : live;
}

/// System-winning states of the GR(1) game, indexed by full valuation.
inline std::vector<char> winning_states(const MissionSpec& spec) {
  const int ne = spec.env_count();
  const int ns = spec.sys_count();
  const int nx = 1 << ne;
  const int ny = 1 << ns;
  const int states = nx * ny;
  const auto je = goals(spec.env_live);
  const auto js = goals(spec.sys_live);
  const int m = static_cast<int>(je.size());
  const int k = static_cast<int>(js.size());

  // Env node (s, i, j); sys node (s, x', i, j); two sinks.
  const auto env_node = [&](int s, int i, int j) { return (s * m + i) * k + j; };
  const int n_env = states * m * k;
  const auto sys_node = [&](int s, int x, int i, int j) { return n_env + ((s * nx + x) * m + i) * k + j; };
  const int n_sys = states * nx * m * k;
  const int win_sys = n_env + n_sys;
  const int win_env = win_sys + 1;

  ParityGame g;
  g.owner.assign(win_env + 1, 0);
  g.priority.assign(win_env + 1, 0);
  g.succ.assign(win_env + 1, {});
  g.owner[win_sys] = 0;
  g.priority[win_sys] = 2;
  g.succ[win_sys] = {win_sys};
  g.owner[win_env] = 1;
  g.priority[win_env] = 1;
  g.succ[win_env] = {win_env};

  for (int s = 0; s < states; ++s)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) {
        const Valuation v = static_cast<Valuation>(s);
        int i2 = i, j2 = j;
        bool wrap_e = false, wrap_s = false;
        if (je[i].eval(v, v) && ++i2 == m) {
          i2 = 0;
          wrap_e = true;
        }
        if (js[j].eval(v, v) && ++j2 == k) {
          j2 = 0;
          wrap_s = true;
        }
        const int node = env_node(s, i, j);
        g.owner[node] = 1;
        g.priority[node] = wrap_s ? 2 : (wrap_e ? 1 : 0);
        for (int x = 0; x < nx; ++x)
          if (spec.env_trans.eval(v, static_cast<Valuation>(x))) g.succ[node].push_back(sys_node(s, x, i2, j2));
        if (g.succ[node].empty()) g.succ[node].push_back(win_sys);
        for (int x = 0; x < nx; ++x) {
          const int sn = sys_node(s, x, i2, j2);
          g.owner[sn] = 0;
          if (!g.succ[sn].empty()) continue;
          for (int y = 0; y < ny; ++y) {
            const Valuation next = static_cast<Valuation>(x) | (static_cast<Valuation>(y) << ne);
            if (spec.sys_trans.eval(v, next)) g.succ[sn].push_back(env_node(static_cast<int>(next), i2, j2));
          }
          if (g.succ[sn].empty()) g.succ[sn].push_back(win_env);
        }
      }
  // Sys nodes not reached above still need a move.
  for (int v = n_env; v < n_env + n_sys; ++v)
    if (g.succ[v].empty()) g.succ[v].push_back(win_env);

  const auto w = zielonka(g, std::vector<char>(g.owner.size(), 1));
  std::vector<char> out(states, 0);
  for (int s = 0; s < states; ++s) out[s] = w[env_node(s, 0, 0)];
  return out;
}

/// Realizable iff every admissible initial environment valuation has an
/// initial system response inside the winning region.
inline bool realizable(const MissionSpec& spec) {
  const int ne = spec.env_count();
  const auto w = winning_states(spec);
  for (int x = 0; x < (1 << ne); ++x) {
    if (!spec.env_init.eval(static_cast<Valuation>(x), 0)) continue;
    bool ok = false;
    for (int y = 0; y < (1 << spec.sys_count()) && !ok; ++y) {
      const Valuation v = static_cast<Valuation>(x) | (static_cast<Valuation>(y) << ne);
      ok = spec.sys_init.eval(v, 0) && w[v];
    }
    if (!ok) return false;
  }
  return true;
}

/// Tarjan SCCs of the subgraph induced by `keep`.
inline std::vector<std::vector<int>> sccs(const std::vector<std::vector<int>>& succ, const std::vector<char>& keep) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (int w : succ[v]) {
      if (!keep[w]) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp.push_back(w);
      } while (w != v);
      out.push_back(comp);
    }
  };
  for (int v = 0; v < n; ++v)
    if (keep[v] && index[v] < 0) visit(v);
  return out;
}

struct CheckResult {
  bool ok = true;
  std::string why;
};

/// Exhaustive check of an automaton against its spec: initial states,
/// safety of every admissible move, and the GR(1) justice condition.
inline CheckResult model_check(const MissionAutomaton& aut) {
  const MissionSpec& spec = aut.spec();
  const int ne = spec.env_count();
  const Valuation env_mask = (1u << ne) - 1u;
  const auto& states = aut.states();
  const int n = static_cast<int>(states.size());
  std::vector<char> reach(n, 0);
  std::vector<int> open;
  for (int x = 0; x < (1 << ne); ++x) {
    if (!spec.env_init.eval(static_cast<Valuation>(x), 0)) continue;
    MissionAutomaton::Step st{};
    try {
      st = aut.initial(static_cast<Valuation>(x));
    } catch (const std::exception&) {
      return {false, "no initial state for an admissible environment"};
    }
    const Valuation v = states[st.state].valuation;
    if ((v & env_mask) != static_cast<Valuation>(x) || !spec.sys_init.eval(v, 0))
      return {false, "initial state violates the initial conditions"};
    if (!reach[st.state]) {
      reach[st.state] = 1;
      open.push_back(st.state);
    }
  }
  std::vector<std::vector<int>> succ(n);
  while (!open.empty()) {
    const int q = open.back();
    open.pop_back();
    const Valuation v = states[q].valuation;
    for (int x = 0; x < (1 << ne); ++x) {
      if (!spec.env_trans.eval(v, static_cast<Valuation>(x))) continue;
      const auto& tr = aut.transitions(q);
      auto it = tr.find(static_cast<Valuation>(x));
      if (it == tr.end()) return {false, "missing move for an admissible environment input"};
      const Valuation w = states[it->second].valuation;
      if ((w & env_mask) != static_cast<Valuation>(x)) return {false, "successor ignores the environment input"};
      if (!spec.sys_trans.eval(v, w)) return {false, "move violates the system safety formula"};
      succ[q].push_back(it->second);
      if (!reach[it->second]) {
        reach[it->second] = 1;
        open.push_back(it->second);
      }
    }
  }
  const auto je = goals(spec.env_live);
  const auto js = goals(spec.sys_live);
  for (std::size_t j = 0; j < js.size(); ++j) {
    auto keep = reach;
    for (int q = 0; q < n; ++q)
      if (js[j].eval(states[q].valuation, states[q].valuation)) keep[q] = 0;
    for (const auto& comp : sccs(succ, keep)) {
      bool cyclic = comp.size() > 1;
      if (!cyclic)
        for (int w : succ[comp[0]]) cyclic = cyclic || w == comp[0];
      if (!cyclic) continue;
      bool all_env = true;
      for (const auto& e : je)
        all_env = all_env && std::any_of(comp.begin(), comp.end(), [&](int q) {
                    return e.eval(states[q].valuation, states[q].valuation);
                  });
      if (all_env) return {false, "a fair cycle avoids system goal " + std::to_string(j)};
    }
  }
  return {};
}

}  // namespace oracle
