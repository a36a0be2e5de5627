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
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"
#include "popsync/transfer.hpp"

namespace popsync {

/// Union of all a-successors of the support.
inline mask_t post_max(const Nfa& nfa, mask_t support, letter_t a) {
  mask_t out = 0;
  for_each_state(support, [&](state_t q) { out |= nfa.succ(q, a); });
  return out;
}

/**
 * Reachable supports when the adversary always answers with the maximal
 * graph. The winning set of supports is closed under subsets, so the maximal
 * answer dominates every other compatible image and each (support, letter)
 * needs only one successor.
 */
struct SupportArena {
  std::vector<mask_t> supports;           // breadth-first from {initial}
  std::vector<std::vector<size_t>> next;  // next[i][a] indexes supports
};

// TODO: an antichain over supports would shrink these arenas; pointless at
// the instance sizes we run.
inline SupportArena build_support_arena(const Nfa& nfa) {
  SupportArena arena;
  std::unordered_map<mask_t, size_t> index;
  const mask_t start = state_bit(nfa.initial);
  index[start] = 0;
  arena.supports.push_back(start);
  for (size_t i = 0; i < arena.supports.size(); ++i) {
    arena.next.emplace_back(nfa.num_letters());
    for (letter_t a = 0; a < nfa.num_letters(); ++a) {
      const mask_t t = post_max(nfa, arena.supports[i], a);
      auto [it, fresh] = index.try_emplace(t, arena.supports.size());
      if (fresh) arena.supports.push_back(t);
      arena.next[i][a] = it->second;
    }
  }
  return arena;
}

enum class SupportMode { Maximal, Full };

struct InfiniteResult {
  Player winner;
  // Letter choice per winning reachable support, in discovery order;
  // empty when the adversary wins.
  std::vector<std::pair<mask_t, letter_t>> p1_strategy;
};

/**
 * Winner of the unbounded-population game with goal support {f}. Maximal
 * mode explores the deterministic arena above; Full mode lets the adversary
 * range over every compatible graph and solves the reachability game. The
 * two agree by dominance of the maximal answer.
 */
inline InfiniteResult solve_infinite(const Nfa& nfa, SupportMode mode = SupportMode::Maximal) {
  const mask_t goal = state_bit(nfa.target);
  constexpr int kFar = std::numeric_limits<int>::max() / 2;

  if (mode == SupportMode::Maximal) {
    const SupportArena arena = build_support_arena(nfa);
    const size_t n = arena.supports.size();
    std::vector<int> dist(n, kFar);
    for (size_t i = 0; i < n; ++i)
      if (arena.supports[i] == goal) dist[i] = 0;
    // Bellman sweeps; the arena is tiny and distances stabilize fast.
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t i = 0; i < n; ++i)
        for (letter_t a = 0; a < nfa.num_letters(); ++a) {
          const int via = dist[arena.next[i][a]];
          if (via + 1 < dist[i]) { dist[i] = via + 1; changed = true; }
        }
    }
    InfiniteResult r{dist[0] < kFar ? Player::P1 : Player::P2, {}};
    if (r.winner == Player::P1)
      for (size_t i = 0; i < n; ++i) {
        if (dist[i] >= kFar || dist[i] == 0) continue;
        for (letter_t a = 0; a < nfa.num_letters(); ++a)
          if (dist[arena.next[i][a]] == dist[i] - 1) {
            r.p1_strategy.emplace_back(arena.supports[i], a);
            break;
          }
      }
    return r;
  }

  // Full mode: the adversary picks any compatible graph, so a (support,
  // letter) move fans out to every achievable image.
  std::vector<mask_t> supports{state_bit(nfa.initial)};
  std::unordered_map<mask_t, size_t> index{{supports[0], 0}};
  std::vector<std::vector<std::vector<size_t>>> fan;  // [i][a] -> image indices
  for (size_t i = 0; i < supports.size(); ++i) {
    fan.emplace_back(nfa.num_letters());
    for (letter_t a = 0; a < nfa.num_letters(); ++a) {
      std::vector<mask_t> images;
      for (CompatibleGraphs cg(nfa, supports[i], a); !cg.done(); cg.next()) {
        const mask_t im = cg.current().image();
        if (std::find(images.begin(), images.end(), im) == images.end())
          images.push_back(im);
      }
      for (mask_t im : images) {
        auto [it, fresh] = index.try_emplace(im, supports.size());
        if (fresh) supports.push_back(im);
        fan[i][a].push_back(it->second);
      }
    }
  }

  const size_t n = supports.size();
  std::vector<int> dist(n, kFar);
  for (size_t i = 0; i < n; ++i)
    if (supports[i] == goal) dist[i] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      for (letter_t a = 0; a < nfa.num_letters(); ++a) {
        int worst = 0;
        for (size_t j : fan[i][a]) worst = std::max(worst, dist[j]);
        if (worst + 1 < dist[i]) { dist[i] = worst + 1; changed = true; }
      }
  }
  InfiniteResult r{dist[0] < kFar ? Player::P1 : Player::P2, {}};
  if (r.winner == Player::P1)
    for (size_t i = 0; i < n; ++i) {
      if (dist[i] >= kFar || dist[i] == 0) continue;
      for (letter_t a = 0; a < nfa.num_letters(); ++a) {
        int worst = 0;
        for (size_t j : fan[i][a]) worst = std::max(worst, dist[j]);
        if (worst == dist[i] - 1) {
          r.p1_strategy.emplace_back(supports[i], a);
          break;
        }
      }
    }
  return r;
}

inline std::string format_support(mask_t support, const Nfa& nfa) {
  std::string out = "{";
  bool first = true;
  for_each_state(support, [&](state_t q) {
    if (!first) out += ',';
    first = false;
    out += nfa.state_names[q];
  });
  return out + "}";
}

inline std::string support_arena_dot(const Nfa& nfa) {
  const SupportArena arena = build_support_arena(nfa);
  const mask_t goal = state_bit(nfa.target);
  std::string out = "digraph supports {\n  rankdir=LR;\n  node [shape=box];\n";
  for (size_t i = 0; i < arena.supports.size(); ++i) {
    out += "  s" + std::to_string(i) + " [label=\"" +
           format_support(arena.supports[i], nfa) + "\"";
    if (i == 0) out += ", style=bold";
    if (arena.supports[i] == goal) out += ", peripheries=2";
    out += "];\n";
  }
  for (size_t i = 0; i < arena.supports.size(); ++i)
    for (letter_t a = 0; a < nfa.num_letters(); ++a)
      out += "  s" + std::to_string(i) + " -> s" + std::to_string(arena.next[i][a]) +
             " [label=\"" + nfa.letter_names[a] + "/" +
             std::to_string(count_compatible(nfa, arena.supports[i], a)) + "\"];\n";
  return out + "}\n";
}

}  // namespace popsync
