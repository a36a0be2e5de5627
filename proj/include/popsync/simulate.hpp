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

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"
#include "popsync/oracle.hpp"
#include "popsync/parity.hpp"
#include "popsync/tracking.hpp"
#include "popsync/transfer.hpp"

namespace popsync {

/// One broadcast step of adversary play: move[q][q'] tokens hop q to q'.
struct Flow {
  std::vector<std::vector<uint32_t>> move;
};

/**
 * Checks a flow against a configuration and a letter (tokens conserved per
 * source, hops licensed by the automaton) and projects it to what the
 * abstraction sees: the occupied support and the realized transfer graph,
 * whose domain is exactly that support. Throws std::invalid_argument on a
 * malformed flow.
 */
inline std::pair<mask_t, TransferGraph> project_phi(const Nfa& nfa, const Config& c,
                                                    letter_t a, const Flow& flow) {
  const size_t n = nfa.num_states();
  if (c.counts.size() != n || flow.move.size() != n)
    throw std::invalid_argument("flow over the wrong state space");
  TransferGraph g;
  g.rows.assign(n, 0);
  for (size_t q = 0; q < n; ++q) {
    if (flow.move[q].size() != n)
      throw std::invalid_argument("flow over the wrong state space");
    uint32_t out = 0;
    for (size_t r = 0; r < n; ++r) {
      const uint32_t k = flow.move[q][r];
      if (k == 0) continue;
      if (!(nfa.succ(static_cast<state_t>(q), a) & state_bit(static_cast<state_t>(r))))
        throw std::invalid_argument("flow moves " + nfa.state_names[q] + " to " +
                                    nfa.state_names[r] + " without a " +
                                    nfa.letter_names[a] + " transition");
      out += k;
      g.rows[q] |= state_bit(static_cast<state_t>(r));
    }
    if (out != c.counts[q])
      throw std::invalid_argument("flow moves " + std::to_string(out) + " tokens from " +
                                  nfa.state_names[q] + ", configuration holds " +
                                  std::to_string(c.counts[q]));
  }
  return {c.support(), g};
}

inline Config apply_flow(const Nfa& nfa, const Flow& flow) {
  Config next;
  next.counts.assign(nfa.num_states(), 0);
  for (size_t q = 0; q < flow.move.size(); ++q)
    for (size_t r = 0; r < flow.move[q].size(); ++r) next.counts[r] += flow.move[q][r];
  return next;
}

/// Plays the game's own counter-strategy edge when one is recorded for the
/// current abstract state, the full-spread graph otherwise; tokens on each
/// source split as evenly as the chosen successor row allows, earlier
/// successors taking the remainder.
struct EvenSplit {
  const ParityGame* game = nullptr;
  const SymbolicStrategy* strategy = nullptr;
};

/// Always splits every source's tokens evenly over all its successors.
struct MaxSpread {};

/// Routes each token to an independently uniform successor.
struct RandomAdversary {
  uint64_t seed = 0;
};

using Adversary = std::variant<EvenSplit, MaxSpread, RandomAdversary>;

namespace detail {

inline void deal_evenly(Flow& flow, state_t q, uint32_t k, const std::vector<state_t>& succ) {
  const uint32_t e = static_cast<uint32_t>(succ.size());
  const uint32_t base = k / e;
  const uint32_t extra = k % e;
  for (uint32_t j = 0; j < e; ++j) flow.move[q][succ[j]] += base + (j < extra ? 1 : 0);
}

inline Flow spread_by_graph(const Nfa& nfa, const Config& c, const TransferGraph& g) {
  Flow flow;
  flow.move.assign(nfa.num_states(), std::vector<uint32_t>(nfa.num_states(), 0));
  for (size_t q = 0; q < c.counts.size(); ++q) {
    if (!c.counts[q]) continue;
    const std::vector<state_t> succ = states_of(g.rows[q]);
    if (succ.empty()) throw std::logic_error("adversary graph strands a populated state");
    deal_evenly(flow, static_cast<state_t>(q), c.counts[q], succ);
  }
  return flow;
}

}  // namespace detail

/// Picks the adversary's flow for one step. game_state is the controller's
/// current abstract state when known, so EvenSplit can look up the recorded
/// counter-move; pass SIZE_MAX to force the full-spread fallback.
inline Flow adversary_flow(const Nfa& nfa, const Config& c, letter_t a, Adversary& adv,
                           size_t game_state, std::mt19937_64& rng) {
  if (auto* even = std::get_if<EvenSplit>(&adv)) {
    if (even->game && even->strategy && game_state != SIZE_MAX &&
        game_state < even->strategy->p2_choice.size()) {
      const auto& choice = even->strategy->p2_choice[game_state][a];
      if (choice) {
        const PgEdge& edge = even->game->moves[game_state][a][*choice];
        return detail::spread_by_graph(nfa, c, even->game->pool[edge.graph]);
      }
    }
    return detail::spread_by_graph(nfa, c, maximal_transfer(nfa, c.support(), a));
  }
  if (std::holds_alternative<MaxSpread>(adv))
    return detail::spread_by_graph(nfa, c, maximal_transfer(nfa, c.support(), a));

  Flow flow;
  flow.move.assign(nfa.num_states(), std::vector<uint32_t>(nfa.num_states(), 0));
  for (size_t q = 0; q < c.counts.size(); ++q) {
    if (!c.counts[q]) continue;
    const std::vector<state_t> succ = states_of(nfa.succ(static_cast<state_t>(q), a));
    std::uniform_int_distribution<size_t> pick(0, succ.size() - 1);
    for (uint32_t t = 0; t < c.counts[q]; ++t) flow.move[q][succ[pick(rng)]] += 1;
  }
  return flow;
}

inline std::string format_config(const Nfa& nfa, const Config& c) {
  std::string out;
  for (size_t q = 0; q < c.counts.size(); ++q) {
    if (!c.counts[q]) continue;
    if (!out.empty()) out += ",";
    out += nfa.state_names[q] + "=" + std::to_string(c.counts[q]);
  }
  return out;
}

struct MatchResult {
  bool won = false;
  int steps = 0;  // broadcasts until the win, or max_steps when none came
  std::vector<std::string> trace;
};

using P1Fn = std::function<letter_t(const Config&)>;

namespace detail {

template <typename PickLetter>
MatchResult run_match_loop(const Nfa& nfa, uint32_t m, PickLetter&& pick, Adversary adv,
                           int max_steps) {
  if (!nfa.normalized())
    throw std::invalid_argument("simulation needs a normalized automaton");
  uint64_t seed = 0;
  if (auto* rnd = std::get_if<RandomAdversary>(&adv)) seed = rnd->seed;
  std::mt19937_64 rng(seed);

  MatchResult result;
  Config c = config_all_on(nfa, nfa.initial, m);
  TrackingList list;
  for (int step = 1; step <= max_steps; ++step) {
    if (c.all_on(nfa.target)) {
      result.won = true;
      result.steps = step - 1;
      return result;
    }
    size_t game_state = SIZE_MAX;
    const letter_t a = pick(c, list, game_state);
    Flow flow = adversary_flow(nfa, c, a, adv, game_state, rng);
    auto [support, g] = project_phi(nfa, c, a, flow);
    (void)support;
    result.trace.push_back(std::to_string(step) + "; " + nfa.letter_names[a] + "; " +
                           format_config(nfa, c) + "; " + format_transfer(g, nfa));
    const PriorityStep ps =
        transition_priority(list, g, g.image() == state_bit(nfa.target), false);
    list = ps.list;
    c = apply_flow(nfa, flow);
  }
  result.won = c.all_on(nfa.target);
  result.steps = max_steps;
  return result;
}

}  // namespace detail

/**
 * Plays the controller's solved strategy for m tokens against an adversary.
 * The controller tracks its abstract state alongside the concrete tokens and
 * throws std::logic_error if play reaches an abstract state its strategy
 * leaves open (it lost there).
 */
inline MatchResult run_match(const Nfa& nfa, uint32_t m, const ParityGame& game,
                             const SymbolicStrategy& strategy, Adversary adv,
                             int max_steps) {
  auto pick = [&](const Config& c, const TrackingList& list, size_t& game_state) -> letter_t {
    auto found = game.find_state(c.support(), list);
    if (!found) throw std::logic_error("simulation reached a state outside the computed game");
    game_state = *found;
    const auto& choice = strategy.p1_letter[game_state];
    if (!choice)
      throw std::logic_error("controller has no move at " + format_support(c.support(), nfa));
    return *choice;
  };
  return detail::run_match_loop(nfa, m, pick, adv, max_steps);
}

/// Same loop with a caller-supplied controller (no abstract-state lookup).
inline MatchResult run_match_fn(const Nfa& nfa, uint32_t m, const P1Fn& p1, Adversary adv,
                                int max_steps) {
  auto pick = [&](const Config& c, const TrackingList&, size_t&) -> letter_t {
    return p1(c);
  };
  return detail::run_match_loop(nfa, m, pick, adv, max_steps);
}

inline std::string format_trace(const MatchResult& result) {
  std::string out;
  for (const std::string& line : result.trace) out += line + "\n";
  return out;
}

}  // namespace popsync
