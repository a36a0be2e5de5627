/*
 * Copyright 2026 The popsync authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"
#include "popsync/support.hpp"
#include "popsync/tracking.hpp"
#include "popsync/transfer.hpp"
#include "popsync/zielonka.hpp"

namespace popsync {

constexpr size_t kDefaultParityBudget = size_t{1} << 22;

/// Identity of a controller node: current support plus tracking list, the
/// latter as indices into the game's graph pool. The absorbing won state uses
/// the impossible empty support as its key.
struct PgStateKey {
  mask_t support = 0;
  std::vector<uint32_t> list;

  bool operator==(const PgStateKey&) const = default;
};

struct PgStateKeyHash {
  size_t operator()(const PgStateKey& k) const {
    size_t h = k.list.size();
    hash_combine(h, k.support);
    for (uint32_t g : k.list) hash_combine(h, g);
    return h;
  }
};

/// One adversary move: the chosen graph, the successor controller node, and
/// the priority the move emits.
struct PgEdge {
  uint32_t graph;
  uint32_t succ;
  int priority;
};

struct ParityGame {
  Nfa nfa;
  std::vector<TransferGraph> pool;
  std::unordered_map<TransferGraph, uint32_t, TransferGraphHash> pool_index;
  std::vector<PgStateKey> states;  // discovery order; [0] is the initial node
  std::unordered_map<PgStateKey, uint32_t, PgStateKeyHash> state_index;
  std::vector<std::vector<std::vector<PgEdge>>> moves;  // [state][letter]
  std::optional<uint32_t> sink;  // the collapsed won state, if ever reached
  int max_priority = 1;

  bool is_sink(uint32_t s) const { return states[s].support == 0; }

  TrackingList list_of(uint32_t s) const {
    TrackingList l;
    l.graphs.reserve(states[s].list.size());
    for (uint32_t g : states[s].list) l.graphs.push_back(pool[g]);
    return l;
  }

  size_t num_p1_nodes() const { return states.size(); }
  size_t num_p2_nodes() const {
    return (states.size() - (sink ? 1 : 0)) * nfa.num_letters();
  }
  size_t num_nodes() const { return num_p1_nodes() + num_p2_nodes(); }
  size_t num_edges() const {
    size_t edges = sink ? 1 : 0;  // the won state's self-loop
    for (size_t s = 0; s < states.size(); ++s) {
      if (is_sink(static_cast<uint32_t>(s))) continue;
      edges += nfa.num_letters();
      for (const auto& per_letter : moves[s]) edges += per_letter.size();
    }
    return edges;
  }

  std::optional<uint32_t> find_state(mask_t support, const TrackingList& list) const {
    PgStateKey key{support, {}};
    key.list.reserve(list.graphs.size());
    for (const TransferGraph& g : list.graphs) {
      auto it = pool_index.find(g);
      if (it == pool_index.end()) return std::nullopt;
      key.list.push_back(it->second);
    }
    auto it = state_index.find(key);
    if (it == state_index.end()) return std::nullopt;
    return it->second;
  }
};

/**
 * Forward exploration from ({q0}, empty list). The controller proposes a
 * letter, the adversary answers with any compatible graph over the current
 * support; the move's priority and the next node come from the tracking
 * update. Hitting the target support funnels into the single absorbing won
 * state. Node numbering is discovery order, letters ascend, graphs follow
 * the enumeration order, so rebuilds are identical.
 */
inline ParityGame build_parity_game(const Nfa& nfa, size_t budget = kDefaultParityBudget) {
  if (!nfa.normalized())
    throw std::invalid_argument("parity construction needs a normalized automaton");

  ParityGame game;
  game.nfa = nfa;
  const mask_t target = state_bit(nfa.target);

  auto intern_graph = [&](const TransferGraph& g) {
    auto [it, fresh] = game.pool_index.try_emplace(g, static_cast<uint32_t>(game.pool.size()));
    if (fresh) game.pool.push_back(g);
    return it->second;
  };
  auto intern_state = [&](PgStateKey key) {
    auto [it, fresh] =
        game.state_index.try_emplace(std::move(key), static_cast<uint32_t>(game.states.size()));
    if (fresh) {
      game.states.push_back(it->first);
      game.moves.emplace_back();
      if (game.num_nodes() > budget)
        throw BudgetExceeded("parity arena exceeds the node budget of " + std::to_string(budget));
    }
    return it->second;
  };

  intern_state(PgStateKey{state_bit(nfa.initial), {}});
  for (uint32_t head = 0; head < game.states.size(); ++head) {
    if (game.is_sink(head)) continue;
    const mask_t support = game.states[head].support;
    const TrackingList list = game.list_of(head);
    game.moves[head].assign(nfa.num_letters(), {});
    for (letter_t a = 0; a < nfa.num_letters(); ++a) {
      for (CompatibleGraphs cg(nfa, support, a); !cg.done(); cg.next()) {
        const TransferGraph g = cg.current();
        const mask_t next_support = g.image();
        PriorityStep step = transition_priority(list, g, next_support == target, false);
        uint32_t succ;
        if (step.won) {
          if (!game.sink) game.sink = intern_state(PgStateKey{});
          succ = *game.sink;
        } else {
          PgStateKey key{next_support, {}};
          key.list.reserve(step.list.graphs.size());
          for (const TransferGraph& h : step.list.graphs)
            key.list.push_back(intern_graph(h));
          succ = intern_state(std::move(key));
        }
        game.moves[head][a].push_back({intern_graph(g), succ, step.priority});
        if (step.priority > game.max_priority) game.max_priority = step.priority;
      }
    }
  }
  return game;
}

/// Layout of the expanded solver arena: controller nodes first, then one
/// adversary node per (state, letter), then one relay node per move carrying
/// its priority.
struct ArenaMap {
  size_t p2_base = 0;
  size_t aux_base = 0;
  std::vector<uint32_t> p2_row;  // per state: first adversary node, or kNoChoice
  struct AuxRef {
    uint32_t state;
    letter_t letter;
    uint32_t edge;
  };
  std::vector<AuxRef> aux;
};

inline std::pair<ParityArena, ArenaMap> make_arena(const ParityGame& game) {
  ParityArena arena;
  ArenaMap map;
  const size_t letters = game.nfa.num_letters();
  const int neutral = max_transition_priority(game.nfa.num_states());

  map.p2_base = game.states.size();
  map.p2_row.assign(game.states.size(), kNoChoice);
  size_t p2_count = 0;
  for (uint32_t s = 0; s < game.states.size(); ++s) {
    if (game.is_sink(s)) continue;
    map.p2_row[s] = static_cast<uint32_t>(map.p2_base + p2_count);
    p2_count += letters;
  }
  map.aux_base = map.p2_base + p2_count;
  for (uint32_t s = 0; s < game.states.size(); ++s) {
    if (game.is_sink(s)) continue;
    for (letter_t a = 0; a < letters; ++a)
      for (uint32_t e = 0; e < game.moves[s][a].size(); ++e)
        map.aux.push_back({s, a, e});
  }

  const size_t total = map.aux_base + map.aux.size();
  arena.owner.assign(total, Player::P2);
  arena.priority.assign(total, neutral);
  arena.succ.assign(total, {});

  for (uint32_t s = 0; s < game.states.size(); ++s) {
    arena.owner[s] = Player::P1;
    if (game.is_sink(s)) {
      arena.priority[s] = 1;
      arena.succ[s] = {s};
      continue;
    }
    for (letter_t a = 0; a < letters; ++a)
      arena.succ[s].push_back(static_cast<uint32_t>(map.p2_row[s] + a));
  }
  for (size_t i = 0; i < map.aux.size(); ++i) {
    const auto& [s, a, e] = map.aux[i];
    const uint32_t aux_id = static_cast<uint32_t>(map.aux_base + i);
    arena.succ[map.p2_row[s] + a].push_back(aux_id);
    const PgEdge& edge = game.moves[s][a][e];
    arena.priority[aux_id] = edge.priority;
    arena.succ[aux_id] = {edge.succ};
  }
  return {std::move(arena), std::move(map)};
}

/**
 * Positional strategies read off the solved arena. Letter choices are kept
 * for controller-won states, graph choices (as move indices) for
 * adversary-won (state, letter) nodes.
 */
struct SymbolicStrategy {
  Player winner = Player::P2;  // at the initial node
  std::vector<Player> state_winner;
  std::vector<std::optional<letter_t>> p1_letter;
  std::vector<std::vector<std::optional<uint32_t>>> p2_choice;

  size_t entries() const {
    size_t n = 0;
    for (const auto& l : p1_letter) n += l.has_value();
    for (const auto& row : p2_choice)
      for (const auto& c : row) n += c.has_value();
    return n;
  }
};

inline SymbolicStrategy solve_parity(const ParityGame& game) {
  auto [arena, map] = make_arena(game);
  const ParitySolution sol = solve_min_parity(arena);

  SymbolicStrategy out;
  out.state_winner.assign(game.states.size(), Player::P2);
  out.p1_letter.assign(game.states.size(), std::nullopt);
  out.p2_choice.assign(game.states.size(),
                       std::vector<std::optional<uint32_t>>(game.nfa.num_letters(), std::nullopt));

  for (uint32_t s = 0; s < game.states.size(); ++s) {
    out.state_winner[s] = sol.winner[s];
    if (game.is_sink(s)) continue;
    if (sol.winner[s] == Player::P1 && sol.strategy[s] != kNoChoice)
      out.p1_letter[s] = static_cast<letter_t>(sol.strategy[s] - map.p2_row[s]);
    for (letter_t a = 0; a < game.nfa.num_letters(); ++a) {
      const uint32_t p2_node = static_cast<uint32_t>(map.p2_row[s] + a);
      if (sol.winner[p2_node] == Player::P2 && sol.strategy[p2_node] != kNoChoice)
        out.p2_choice[s][a] = map.aux[sol.strategy[p2_node] - map.aux_base].edge;
    }
  }
  out.winner = out.state_winner[0];
  return out;
}

struct ControlResult {
  bool yes;
  ParityGame game;
  SymbolicStrategy strategy;
};

/// Decide whether the controller synchronizes every finite population.
inline ControlResult population_control(const Nfa& nfa, size_t budget = kDefaultParityBudget) {
  ControlResult r{false, build_parity_game(normalize(nfa), budget), {}};
  r.strategy = solve_parity(r.game);
  r.yes = r.strategy.winner == Player::P1;
  return r;
}

/// Structural sanity over the built game; throws std::logic_error on breach.
inline void check_structural_bounds(const ParityGame& game) {
  const size_t n = game.nfa.num_states();
  for (uint32_t s = 0; s < game.states.size(); ++s)
    if (game.states[s].list.size() > n * n)
      throw std::logic_error("tracking list exceeds its quadratic bound");
  for (uint32_t s = 0; s < game.states.size(); ++s) {
    if (game.is_sink(s)) continue;
    for (const auto& per_letter : game.moves[s])
      for (const PgEdge& e : per_letter)
        if (e.priority < 1 || e.priority > max_transition_priority(n))
          throw std::logic_error("move priority out of range");
  }
  const double bound_log2 = 1.0 + static_cast<double>(n) +
                            static_cast<double>(n) * n * n * n;
  const double nodes = static_cast<double>(game.num_nodes());
  if (std::log2(nodes) > bound_log2)
    throw std::logic_error("parity arena larger than its state-count bound");
}

inline std::string parity_game_dot(const ParityGame& game) {
  std::string out = "digraph parity {\n  rankdir=LR;\n";
  for (uint32_t s = 0; s < game.states.size(); ++s) {
    out += "  n" + std::to_string(s) + " [shape=box, label=\"";
    if (game.is_sink(s)) {
      out += "WON\", style=bold";
    } else {
      out += format_support(game.states[s].support, game.nfa) +
             " l=" + std::to_string(game.states[s].list.size()) + "\"";
      if (s == 0) out += ", style=bold";
    }
    out += "];\n";
  }
  for (uint32_t s = 0; s < game.states.size(); ++s) {
    if (game.is_sink(s)) continue;
    for (letter_t a = 0; a < game.nfa.num_letters(); ++a) {
      const std::string p2 = "n" + std::to_string(s) + "_" + std::to_string(a);
      out += "  " + p2 + " [shape=circle, label=\"" + game.nfa.letter_names[a] + "\"];\n";
      out += "  n" + std::to_string(s) + " -> " + p2 + " [label=\"" +
             game.nfa.letter_names[a] + "\"];\n";
      for (const PgEdge& e : game.moves[s][a])
        out += "  " + p2 + " -> n" + std::to_string(e.succ) + " [label=\"p=" +
               std::to_string(e.priority) + "\"];\n";
    }
  }
  return out + "}\n";
}

}  // namespace popsync
