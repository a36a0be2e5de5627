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

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"
#include "popsync/transfer.hpp"

namespace popsync {

/**
 * Bounded memory of the controller: composite transfer graphs, one level per
 * freshly separated state pair. Length never exceeds |Q|^2 because each kept
 * level must separate an ordered pair no earlier level separates.
 */
struct TrackingList {
  std::vector<TransferGraph> graphs;

  size_t size() const { return graphs.size(); }
  bool operator==(const TrackingList&) const = default;
};

/**
 * One update round: compose every level with g, append g itself, then filter
 * front to back keeping a graph iff it separates an ordered pair none of the
 * kept predecessors separates. (Dropped graphs never carry fresh pairs, so
 * accumulating over kept graphs only is equivalent to the full scan.)
 */
inline TrackingList update_list(const TrackingList& list, const TransferGraph& g) {
  std::vector<TransferGraph> candidates;
  candidates.reserve(list.graphs.size() + 1);
  for (const TransferGraph& h : list.graphs) candidates.push_back(compose(h, g));
  candidates.push_back(g);

  TrackingList out;
  std::vector<mask_t> seen(g.rows.size(), 0);
  for (TransferGraph& h : candidates) {
    const std::vector<mask_t> pairs = separated_pairs(h);
    bool fresh = false;
    for (size_t r = 0; r < pairs.size(); ++r)
      if (pairs[r] & ~seen[r]) { fresh = true; break; }
    if (!fresh) continue;
    for (size_t r = 0; r < pairs.size(); ++r) seen[r] |= pairs[r];
    out.graphs.push_back(std::move(h));
  }
  return out;
}

/// Largest priority any transition can carry on an n-state automaton.
inline int max_transition_priority(size_t n) {
  return static_cast<int>(2 * n * n + 2);
}

struct PriorityStep {
  int priority;
  TrackingList list;  // memory after the move (empty once won)
  bool won;
};

/**
 * Priority of playing g from memory (won, list). Smaller is stronger; odd
 * favors the controller. A reached target (or already-won flag) is priority 1
 * and sticks. Otherwise the leak level r yields 2r+1, the first level where
 * the updated list deviates from plain composition yields 2r, and the move
 * carries the minimum of the two (each defaulting to length+1).
 */
inline PriorityStep transition_priority(const TrackingList& list, const TransferGraph& g,
                                        bool reached_target, bool won) {
  if (won || reached_target) return {1, TrackingList{}, true};

  const size_t len = list.graphs.size();
  size_t leak_level = len + 1;
  for (size_t r = 0; r < len; ++r)
    if (leaks_at(list.graphs[r], g)) { leak_level = r + 1; break; }

  TrackingList next = update_list(list, g);
  size_t drop_level = len + 1;
  for (size_t r = 0; r < len; ++r) {
    if (r >= next.graphs.size() || !(next.graphs[r] == compose(list.graphs[r], g))) {
      drop_level = r + 1;
      break;
    }
  }

  const size_t priority = std::min(2 * leak_level + 1, 2 * drop_level);
  return {static_cast<int>(priority), std::move(next), false};
}

/**
 * Ultimately periodic play: any finite prefix, then a repeated loop. Each
 * graph must be compatible with its letter, the domain of each graph must be
 * the image of its predecessor (the initial singleton for the first), and the
 * loop must close on itself.
 */
struct LassoPlay {
  std::vector<std::pair<letter_t, TransferGraph>> prefix;
  std::vector<std::pair<letter_t, TransferGraph>> loop;
};

inline void validate_lasso(const Nfa& nfa, const LassoPlay& play) {
  if (play.loop.empty()) throw std::invalid_argument("lasso loop is empty");
  mask_t support = state_bit(nfa.initial);
  auto check = [&](const std::pair<letter_t, TransferGraph>& move) {
    const auto& [a, g] = move;
    if (a >= nfa.num_letters()) throw std::invalid_argument("letter out of range");
    if (g.rows.size() != nfa.num_states())
      throw std::invalid_argument("graph over wrong state space");
    if (g.domain() != support) throw std::invalid_argument("graph domain breaks the chain");
    for (size_t q = 0; q < g.rows.size(); ++q)
      if (g.rows[q] & ~nfa.succ(static_cast<state_t>(q), a))
        throw std::invalid_argument("graph uses an edge outside the transition relation");
    support = g.image();
  };
  for (const auto& move : play.prefix) check(move);
  const mask_t loop_entry = support;
  for (const auto& move : play.loop) check(move);
  if (support != loop_entry) throw std::invalid_argument("loop does not close");
}

enum class CapacityVerdict { ReachesTarget, FiniteCapacity, InfiniteCapacity };

inline const char* to_string(CapacityVerdict v) {
  switch (v) {
    case CapacityVerdict::ReachesTarget: return "ReachesTarget";
    case CapacityVerdict::FiniteCapacity: return "FiniteCapacity";
    default: return "InfiniteCapacity";
  }
}

/**
 * Drive the (won, support, list) machine over the lasso until its state at
 * the loop head repeats, then read the verdict off the repeating cycle: the
 * target support anywhere wins outright, else an odd minimum priority over
 * the cycle means the play admits unboundedly many agents.
 */
inline CapacityVerdict classify_lasso(const Nfa& nfa, const LassoPlay& play) {
  validate_lasso(nfa, play);

  bool won = false;
  mask_t support = state_bit(nfa.initial);
  TrackingList list;
  auto step = [&](const std::pair<letter_t, TransferGraph>& move) {
    const mask_t next_support = move.second.image();
    PriorityStep r = transition_priority(list, move.second,
                                         next_support == state_bit(nfa.target), won);
    won = r.won;
    list = std::move(r.list);
    support = next_support;
    return r.priority;
  };

  for (const auto& move : play.prefix) {
    step(move);
    if (won) return CapacityVerdict::ReachesTarget;
  }

  // Machine snapshot at the loop head, flattened for map lookup.
  auto snapshot = [&]() {
    std::vector<mask_t> key{support};
    key.push_back(list.graphs.size());
    for (const TransferGraph& g : list.graphs)
      key.insert(key.end(), g.rows.begin(), g.rows.end());
    return key;
  };

  std::map<std::vector<mask_t>, size_t> first_seen;
  std::vector<int> iteration_min;
  for (;;) {
    auto [it, fresh] = first_seen.try_emplace(snapshot(), iteration_min.size());
    if (!fresh) {
      int cycle_min = max_transition_priority(nfa.num_states());
      for (size_t i = it->second; i < iteration_min.size(); ++i)
        cycle_min = std::min(cycle_min, iteration_min[i]);
      return cycle_min % 2 ? CapacityVerdict::InfiniteCapacity
                           : CapacityVerdict::FiniteCapacity;
    }
    int low = max_transition_priority(nfa.num_states());
    for (const auto& move : play.loop) {
      low = std::min(low, step(move));
      if (won) return CapacityVerdict::ReachesTarget;
    }
    iteration_min.push_back(low);
  }
}

namespace detail {

inline void check_chained(const std::vector<TransferGraph>& graphs, mask_t start) {
  mask_t support = start;
  for (const TransferGraph& g : graphs) {
    if (g.domain() != support) throw std::invalid_argument("graphs are not chained");
    support = g.image();
  }
}

/// Entries gained by extending the tracked set: edges of g from untracked
/// sources into the next tracked set.
inline int entry_gain(const TransferGraph& g, mask_t support, mask_t tracked, mask_t next) {
  int gain = 0;
  for_each_state(support & ~tracked, [&](state_t s) {
    gain += std::popcount(g.rows[s] & next);
  });
  return gain;
}

}  // namespace detail

/**
 * Maximum number of entries any accumulator collects along the chained graph
 * sequence: dynamic program over (position, tracked subset), where a step to
 * a superset of the tracked image charges one entry per incoming edge from an
 * untracked source. Membership at position 0 is free.
 */
inline int max_entries(const Nfa& nfa, const std::vector<TransferGraph>& graphs) {
  (void)nfa;
  if (graphs.empty()) return 0;
  const mask_t start = graphs.front().domain();
  detail::check_chained(graphs, start);

  constexpr int kUnset = -1;
  auto dp_over = [kUnset](mask_t support) {
    return std::vector<int>(size_t{1} << std::popcount(support), kUnset);
  };
  // Subsets of a support are indexed by packing its member bits together.
  auto pack = [](mask_t support, mask_t subset) {
    size_t idx = 0;
    int out_bit = 0;
    for_each_state(support, [&](state_t q) {
      if ((subset >> q) & 1) idx |= size_t{1} << out_bit;
      ++out_bit;
    });
    return idx;
  };
  auto unpack = [](mask_t support, size_t idx) {
    mask_t subset = 0;
    int in_bit = 0;
    for_each_state(support, [&](state_t q) {
      if ((idx >> in_bit) & 1) subset |= state_bit(q);
      ++in_bit;
    });
    return subset;
  };

  mask_t support = start;
  std::vector<int> dp = dp_over(support);
  std::fill(dp.begin(), dp.end(), 0);

  for (const TransferGraph& g : graphs) {
    const mask_t next_support = g.image();
    std::vector<int> next_dp = dp_over(next_support);
    for (size_t ti = 0; ti < dp.size(); ++ti) {
      if (dp[ti] == kUnset) continue;
      const mask_t tracked = unpack(support, ti);
      mask_t post = 0;
      for_each_state(tracked, [&](state_t q) { post |= g.rows[q]; });
      const mask_t room = next_support & ~post;
      // All supersets of post inside next_support.
      mask_t extra = 0;
      for (;;) {
        const mask_t next = post | extra;
        const int value = dp[ti] + detail::entry_gain(g, support, tracked, next);
        int& slot = next_dp[pack(next_support, next)];
        if (value > slot) slot = value;
        if (extra == room) break;
        extra = (extra - room) & room;
      }
    }
    dp = std::move(next_dp);
    support = next_support;
  }
  int best = 0;
  for (int v : dp) best = std::max(best, v);
  return best;
}

/**
 * Whether the lasso's loop can keep collecting entries forever: true iff the
 * (loop phase x tracked subset) graph has a strictly positive edge inside a
 * strongly connected component. Every subset is reachable (the empty
 * accumulator crosses the prefix for free), so reachability is not checked.
 */
inline bool entry_cycle(const Nfa& nfa, const LassoPlay& play) {
  validate_lasso(nfa, play);
  const size_t phases = play.loop.size();

  std::vector<mask_t> supports(phases);
  {
    mask_t s = play.loop.front().second.domain();
    for (size_t j = 0; j < phases; ++j) {
      supports[j] = s;
      s = play.loop[j].second.image();
    }
  }

  // Dense node ids: (phase, packed subset).
  std::vector<size_t> offset(phases + 1, 0);
  for (size_t j = 0; j < phases; ++j)
    offset[j + 1] = offset[j] + (size_t{1} << std::popcount(supports[j]));
  const size_t num_nodes = offset[phases];

  auto pack = [](mask_t support, mask_t subset) {
    size_t idx = 0;
    int out_bit = 0;
    for_each_state(support, [&](state_t q) {
      if ((subset >> q) & 1) idx |= size_t{1} << out_bit;
      ++out_bit;
    });
    return idx;
  };
  auto unpack = [](mask_t support, size_t idx) {
    mask_t subset = 0;
    int in_bit = 0;
    for_each_state(support, [&](state_t q) {
      if ((idx >> in_bit) & 1) subset |= state_bit(q);
      ++in_bit;
    });
    return subset;
  };

  struct Edge { size_t to; int weight; };
  std::vector<std::vector<Edge>> adj(num_nodes);
  for (size_t j = 0; j < phases; ++j) {
    const TransferGraph& g = play.loop[j].second;
    const size_t next_phase = (j + 1) % phases;
    const mask_t next_support = supports[next_phase];
    const size_t count = size_t{1} << std::popcount(supports[j]);
    for (size_t ti = 0; ti < count; ++ti) {
      const mask_t tracked = unpack(supports[j], ti);
      mask_t post = 0;
      for_each_state(tracked, [&](state_t q) { post |= g.rows[q]; });
      const mask_t room = next_support & ~post;
      mask_t extra = 0;
      for (;;) {
        const mask_t next = post | extra;
        adj[offset[j] + ti].push_back(
            {offset[next_phase] + pack(next_support, next),
             detail::entry_gain(g, supports[j], tracked, next)});
        if (extra == room) break;
        extra = (extra - room) & room;
      }
    }
  }

  // Iterative Tarjan; a positive edge with both ends in one component wins.
  std::vector<int> comp(num_nodes, -1), low(num_nodes), order(num_nodes, -1);
  std::vector<char> on_stack(num_nodes, 0);
  std::vector<size_t> stack;
  int next_order = 0, next_comp = 0;
  struct Frame { size_t v; size_t edge; };
  for (size_t root = 0; root < num_nodes; ++root) {
    if (order[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    order[root] = low[root] = next_order++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < adj[f.v].size()) {
        const size_t w = adj[f.v][f.edge++].to;
        if (order[w] == -1) {
          order[w] = low[w] = next_order++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], order[w]);
        }
      } else {
        if (low[f.v] == order[f.v]) {
          for (;;) {
            const size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == f.v) break;
          }
          ++next_comp;
        }
        const size_t child = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[child]);
      }
    }
  }

  for (size_t v = 0; v < num_nodes; ++v)
    for (const Edge& e : adj[v])
      if (e.weight > 0 && comp[v] == comp[e.to]) return true;
  return false;
}

}  // namespace popsync
