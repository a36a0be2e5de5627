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
#include <limits>
#include <stdexcept>
#include <vector>

#include "popsync/common.hpp"

namespace popsync {

/// Node-priority parity arena. Winner by the minimum priority seen
/// infinitely often; odd favors P1. Every node must have a successor.
struct ParityArena {
  std::vector<Player> owner;
  std::vector<int> priority;
  std::vector<std::vector<uint32_t>> succ;

  size_t size() const { return owner.size(); }
};

constexpr uint32_t kNoChoice = std::numeric_limits<uint32_t>::max();

struct ParitySolution {
  std::vector<Player> winner;     // per node
  std::vector<uint32_t> strategy; // per node: successor chosen by its owner
                                  // (meaningful where the owner wins)
};

namespace detail {

class ZielonkaSolver {
 public:
  explicit ZielonkaSolver(const ParityArena& arena) : arena_(arena) {
    preds_.resize(arena.size());
    for (size_t v = 0; v < arena.size(); ++v) {
      if (arena.succ[v].empty()) throw std::invalid_argument("parity node without successor");
      for (uint32_t w : arena.succ[v]) preds_[w].push_back(static_cast<uint32_t>(v));
    }
    sol_.winner.assign(arena.size(), Player::P2);
    sol_.strategy.assign(arena.size(), kNoChoice);
  }

  ParitySolution run() {
    std::vector<char> alive(arena_.size(), 1);
    solve(alive);
    return std::move(sol_);
  }

 private:
  /**
   * Attractor of `targets` for `pl` inside `alive`. Marks attracted nodes in
   * `out`, records a strategy edge for every attracted pl-owned node (lowest
   * successor already inside the attractor), and leaves target nodes'
   * strategies untouched.
   */
  std::vector<uint32_t> attract(const std::vector<char>& alive, Player pl,
                                const std::vector<uint32_t>& targets,
                                std::vector<char>& in_attr) {
    std::vector<uint32_t> out_count(arena_.size(), 0);
    for (size_t v = 0; v < arena_.size(); ++v) {
      if (!alive[v]) continue;
      uint32_t n = 0;
      for (uint32_t w : arena_.succ[v]) n += alive[w];
      out_count[v] = n;
    }
    std::vector<uint32_t> queue(targets);
    for (uint32_t t : targets) in_attr[t] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
      const uint32_t v = queue[head];
      for (uint32_t u : preds_[v]) {
        if (!alive[u] || in_attr[u]) continue;
        if (arena_.owner[u] == pl) {
          in_attr[u] = 1;
          for (uint32_t w : arena_.succ[u])
            if (alive[w] && in_attr[w]) { sol_.strategy[u] = w; break; }
          queue.push_back(u);
        } else if (--out_count[u] == 0) {
          in_attr[u] = 1;
          queue.push_back(u);
        }
      }
    }
    return queue;
  }

  void solve(std::vector<char>& alive) {
    int min_prio = std::numeric_limits<int>::max();
    for (size_t v = 0; v < arena_.size(); ++v)
      if (alive[v] && arena_.priority[v] < min_prio)
        min_prio = arena_.priority[v];
    if (min_prio == std::numeric_limits<int>::max()) return;

    const Player favored = (min_prio % 2) ? Player::P1 : Player::P2;
    const Player other = favored == Player::P1 ? Player::P2 : Player::P1;

    std::vector<uint32_t> tops;
    for (size_t v = 0; v < arena_.size(); ++v)
      if (alive[v] && arena_.priority[v] == min_prio)
        tops.push_back(static_cast<uint32_t>(v));

    std::vector<char> in_a(arena_.size(), 0);
    const std::vector<uint32_t> region_a = attract(alive, favored, tops, in_a);

    std::vector<char> rest(alive);
    for (uint32_t v : region_a) rest[v] = 0;
    solve(rest);

    std::vector<uint32_t> opp_wins;
    for (size_t v = 0; v < arena_.size(); ++v)
      if (alive[v] && !in_a[v] && sol_.winner[v] == other)
        opp_wins.push_back(static_cast<uint32_t>(v));

    if (opp_wins.empty()) {
      for (uint32_t v : region_a) sol_.winner[v] = favored;
      // Priority nodes owned by the favored player may move anywhere alive:
      // the whole remaining arena is theirs.
      for (uint32_t v : tops) {
        if (arena_.owner[v] != favored) continue;
        for (uint32_t w : arena_.succ[v])
          if (alive[w]) { sol_.strategy[v] = w; break; }
      }
      return;
    }

    std::vector<char> in_b(arena_.size(), 0);
    const std::vector<uint32_t> region_b = attract(alive, other, opp_wins, in_b);
    std::vector<char> rest2(alive);
    for (uint32_t v : region_b) rest2[v] = 0;
    solve(rest2);
    for (uint32_t v : region_b) sol_.winner[v] = other;
  }

  const ParityArena& arena_;
  std::vector<std::vector<uint32_t>> preds_;
  ParitySolution sol_;
};

}  // namespace detail

inline ParitySolution solve_min_parity(const ParityArena& arena) {
  return detail::ZielonkaSolver(arena).run();
}

}  // namespace popsync
