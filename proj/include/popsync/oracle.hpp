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

#include <climits>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"
#include "popsync/parity.hpp"

namespace popsync {

constexpr size_t kDefaultOracleBudget = 5'000'000;

/// Population as per-state token counts.
struct Config {
  std::vector<uint32_t> counts;

  uint32_t total() const {
    uint32_t t = 0;
    for (uint32_t c : counts) t += c;
    return t;
  }
  mask_t support() const {
    mask_t s = 0;
    for (size_t q = 0; q < counts.size(); ++q)
      if (counts[q]) s |= state_bit(static_cast<state_t>(q));
    return s;
  }
  bool all_on(state_t q) const {
    const uint32_t t = total();
    return t > 0 && counts[q] == t;
  }
  bool operator==(const Config&) const = default;
};

struct ConfigHash {
  size_t operator()(const Config& c) const {
    size_t h = c.counts.size();
    for (uint32_t v : c.counts) hash_combine(h, v);
    return h;
  }
};

inline Config config_all_on(const Nfa& nfa, state_t q, uint32_t m) {
  Config c;
  c.counts.assign(nfa.num_states(), 0);
  c.counts[q] = m;
  return c;
}

namespace detail {

/// All ways to deal each state's tokens across its letter successors; the
/// first successor drains from the full count downward, so enumeration order
/// is fixed. Calls fn(next_config) once per distribution.
template <typename Fn>
void for_each_split(const Nfa& nfa, const Config& c, letter_t a, Fn&& fn) {
  std::vector<state_t> sources;
  std::vector<std::vector<state_t>> succs;
  for (size_t q = 0; q < c.counts.size(); ++q)
    if (c.counts[q]) {
      sources.push_back(static_cast<state_t>(q));
      succs.push_back(states_of(nfa.succ(static_cast<state_t>(q), a)));
    }
  Config next;
  next.counts.assign(nfa.num_states(), 0);

  // rec over sources, inner recursion over one source's composition
  auto deal = [&](auto&& self, size_t i) -> void {
    if (i == sources.size()) { fn(next); return; }
    const uint32_t k = c.counts[sources[i]];
    const std::vector<state_t>& list = succs[i];
    auto parts = [&](auto&& inner, size_t j, uint32_t left) -> void {
      if (j + 1 == list.size()) {
        next.counts[list[j]] += left;
        self(self, i + 1);
        next.counts[list[j]] -= left;
        return;
      }
      for (uint32_t t = left + 1; t-- > 0;) {
        next.counts[list[j]] += t;
        inner(inner, j + 1, left - t);
        next.counts[list[j]] -= t;
      }
    };
    parts(parts, 0, k);
  };
  deal(deal, 0);
}

}  // namespace detail

/// Forward-reachable part of the m-token game from a start configuration.
struct ExplicitGame {
  std::vector<Config> configs;  // discovery order; [0] is the start
  std::unordered_map<Config, uint32_t, ConfigHash> index;
  std::vector<std::vector<std::vector<uint32_t>>> next;  // [cfg][letter] -> cfg ids
  size_t num_letters = 0;
};

inline ExplicitGame build_explicit_game(const Nfa& nfa, const Config& start,
                                        size_t budget = kDefaultOracleBudget) {
  if (start.counts.size() != nfa.num_states())
    throw std::invalid_argument("configuration over the wrong state space");
  if (start.total() == 0) throw std::invalid_argument("empty population");
  if (!nfa.complete()) throw std::invalid_argument("token games need a complete automaton");

  ExplicitGame game;
  game.num_letters = nfa.num_letters();
  game.index.emplace(start, 0);
  game.configs.push_back(start);
  for (uint32_t head = 0; head < game.configs.size(); ++head) {
    game.next.emplace_back(game.num_letters);
    const Config c = game.configs[head];
    for (letter_t a = 0; a < nfa.num_letters(); ++a) {
      std::unordered_set<uint32_t> seen;
      detail::for_each_split(nfa, c, a, [&](const Config& n) {
        auto [it, fresh] = game.index.try_emplace(n, static_cast<uint32_t>(game.configs.size()));
        if (fresh) {
          game.configs.push_back(n);
          if (game.configs.size() * (1 + game.num_letters) > budget)
            throw BudgetExceeded("token game exceeds the node budget of " +
                                 std::to_string(budget));
        }
        if (seen.insert(it->second).second) game.next[head][a].push_back(it->second);
      });
    }
  }
  return game;
}

constexpr int kUnreached = -1;

/// Per-node game values; kUnreached encodes "never" / "forever".
struct GameValues {
  std::vector<int> p1;                // per config
  std::vector<std::vector<int>> p2;   // per (config, letter)
};

/**
 * Steps the controller needs to put every token on the target against worst
 * adversary play: backward induction from the synchronized configurations.
 * A letter node settles once all its outcomes settle (the adversary takes
 * the worst), a configuration settles at its first settled letter plus one.
 */
inline GameValues compute_reach(const ExplicitGame& game, const Nfa& nfa) {
  const size_t n = game.configs.size();
  const size_t letters = game.num_letters;
  GameValues val;
  val.p1.assign(n, kUnreached);
  val.p2.assign(n, std::vector<int>(letters, kUnreached));

  std::vector<std::vector<std::pair<uint32_t, letter_t>>> preds(n);
  std::vector<std::vector<uint32_t>> pending(n, std::vector<uint32_t>(letters, 0));
  for (uint32_t i = 0; i < n; ++i)
    for (letter_t a = 0; a < letters; ++a) {
      pending[i][a] = static_cast<uint32_t>(game.next[i][a].size());
      for (uint32_t j : game.next[i][a]) preds[j].push_back({i, a});
    }

  std::vector<uint32_t> queue;
  for (uint32_t i = 0; i < n; ++i)
    if (game.configs[i].all_on(nfa.target)) {
      val.p1[i] = 0;
      queue.push_back(i);
    }
  for (size_t head = 0; head < queue.size(); ++head) {
    const uint32_t j = queue[head];
    for (auto [i, a] : preds[j]) {
      if (val.p2[i][a] != kUnreached) continue;
      if (--pending[i][a] == 0) {
        val.p2[i][a] = val.p1[j];  // settled last = the worst outcome
        if (val.p1[i] == kUnreached) {
          val.p1[i] = val.p2[i][a] + 1;
          queue.push_back(i);
        }
      }
    }
  }
  return val;
}

/**
 * Configurations the controller can keep free of the avoided state, counting
 * the current one: value 0 on tainted configurations, a letter node settles
 * at its first settled outcome (the adversary takes the quickest kill), a
 * configuration needs every letter settled and takes the best plus one.
 */
inline GameValues compute_survive(const ExplicitGame& game, state_t avoid) {
  const size_t n = game.configs.size();
  const size_t letters = game.num_letters;
  GameValues val;
  val.p1.assign(n, kUnreached);
  val.p2.assign(n, std::vector<int>(letters, kUnreached));

  std::vector<std::vector<std::pair<uint32_t, letter_t>>> preds(n);
  std::vector<uint32_t> open_letters(n, static_cast<uint32_t>(letters));
  for (uint32_t i = 0; i < n; ++i)
    for (letter_t a = 0; a < letters; ++a)
      for (uint32_t j : game.next[i][a]) preds[j].push_back({i, a});

  std::vector<uint32_t> queue;
  for (uint32_t i = 0; i < n; ++i)
    if (game.configs[i].counts[avoid]) {
      val.p1[i] = 0;
      queue.push_back(i);
    }
  for (size_t head = 0; head < queue.size(); ++head) {
    const uint32_t j = queue[head];
    for (auto [i, a] : preds[j]) {
      if (val.p2[i][a] != kUnreached) continue;
      val.p2[i][a] = val.p1[j];  // settled first = the quickest kill
      if (val.p1[i] != kUnreached) continue;
      if (--open_letters[i] == 0) {
        val.p1[i] = val.p2[i][a] + 1;  // settled last = the best letter
        queue.push_back(i);
      }
    }
  }
  return val;
}

inline Player winner_fixed_m(const Nfa& nfa, uint32_t m,
                             size_t budget = kDefaultOracleBudget) {
  if (!nfa.normalized())
    throw std::invalid_argument("fixed-population solving needs a normalized automaton");
  const ExplicitGame game = build_explicit_game(nfa, config_all_on(nfa, nfa.initial, m), budget);
  const GameValues val = compute_reach(game, nfa);
  return val.p1[0] == kUnreached ? Player::P2 : Player::P1;
}

enum class Objective { Reach, Survive };

/**
 * Optimal guaranteed step count from an explicit start configuration.
 * Reach: fewest steps to put every token on the target (nullopt if the
 * adversary prevents it). Survive: most configurations free of `avoid`,
 * counting the start (nullopt if the controller can dodge forever).
 */
inline std::optional<int> optimal_steps(const Nfa& nfa, const Config& start, Objective obj,
                                        std::optional<state_t> avoid = std::nullopt,
                                        size_t budget = kDefaultOracleBudget) {
  const ExplicitGame game = build_explicit_game(nfa, start, budget);
  int v;
  if (obj == Objective::Reach) {
    v = compute_reach(game, nfa).p1[0];
  } else {
    state_t bad;
    if (avoid) {
      bad = *avoid;
    } else {
      auto found = nfa.find_state("sink");
      if (!found) throw std::invalid_argument("no avoided state given and none named sink");
      bad = *found;
    }
    v = compute_survive(game, bad).p1[0];
  }
  if (v == kUnreached) return std::nullopt;
  return v;
}

/// Controller that replays the token game's exact values: per configuration
/// it takes the lowest letter whose worst-case distance to synchronization
/// is least, treating unwinnable letters as infinitely far.
class OracleGreedyP1 {
 public:
  OracleGreedyP1(const Nfa& nfa, const Config& start, size_t budget = kDefaultOracleBudget)
      : game_(build_explicit_game(nfa, start, budget)), val_(compute_reach(game_, nfa)) {}

  letter_t operator()(const Config& c) const {
    auto it = game_.index.find(c);
    if (it == game_.index.end())
      throw std::logic_error("configuration outside the solved token game");
    const uint32_t i = it->second;
    letter_t best = 0;
    long best_val = LONG_MAX;
    for (letter_t a = 0; a < game_.num_letters; ++a) {
      const int v = val_.p2[i][a];
      const long ranked = v == kUnreached ? LONG_MAX : v;
      if (ranked < best_val) {
        best_val = ranked;
        best = a;
      }
    }
    return best;
  }

 private:
  ExplicitGame game_;
  GameValues val_;
};

struct CutoffResult {
  enum class Kind { NoCutoff, Cutoff, ExceedsBudget };
  Kind kind;
  int value = 0;  // the cut-off, or the last decided population size
};

/**
 * Least losing population size. A controllable automaton has none; otherwise
 * token games are scanned upward, and downward monotonicity makes the first
 * adversary win the cut-off. A blown budget mid-scan reports how far the
 * scan decided.
 */
inline CutoffResult find_cutoff(const Nfa& nfa, int m_max,
                                size_t oracle_budget = kDefaultOracleBudget,
                                size_t parity_budget = kDefaultParityBudget) {
  if (m_max < 1) throw std::invalid_argument("population bound must be positive");
  const Nfa norm = normalize(nfa);
  const ControlResult control = population_control(norm, parity_budget);
  if (control.yes) return {CutoffResult::Kind::NoCutoff, 0};
  for (int m = 1; m <= m_max; ++m) {
    Player w;
    try {
      w = winner_fixed_m(norm, static_cast<uint32_t>(m), oracle_budget);
    } catch (const BudgetExceeded&) {
      return {CutoffResult::Kind::ExceedsBudget, m - 1};
    }
    if (w == Player::P2) return {CutoffResult::Kind::Cutoff, m};
  }
  return {CutoffResult::Kind::ExceedsBudget, m_max};
}

}  // namespace popsync
