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
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "popsync/gadgets.hpp"
#include "popsync/support.hpp"
#include "test_util.hpp"

using namespace popsync;

TEST_CASE("maximal post on the split gadget") {
  const Nfa split = generate_gadget("split");
  const auto bit = [&](const char* name) { return state_bit(*split.find_state(name)); };
  const letter_t a = *split.find_letter("a");
  const letter_t delta = *split.find_letter("delta");
  CHECK(post_max(split, bit("q0"), delta) == (bit("q1") | bit("q2")));
  CHECK(post_max(split, bit("q1") | bit("q2"), a) == (bit("q0") | bit("f")));
  CHECK(post_max(split, bit("f"), a) == bit("f"));
}

TEST_CASE("the split support arena stays away from the goal") {
  const Nfa split = generate_gadget("split");
  const SupportArena arena = build_support_arena(split);
  CHECK(arena.supports.size() == 4);
  for (mask_t s : arena.supports) CHECK(s != state_bit(split.target));
}

TEST_CASE("the adversary wins the unbounded game on split in both modes") {
  const Nfa split = generate_gadget("split");
  CHECK(solve_infinite(split, SupportMode::Maximal).winner == Player::P2);
  CHECK(solve_infinite(split, SupportMode::Full).winner == Player::P2);
}

TEST_CASE("the adversary wins the unbounded game on leakmemory") {
  const Nfa lm = generate_gadget("leakmemory");
  CHECK(solve_infinite(lm, SupportMode::Maximal).winner == Player::P2);
  CHECK(solve_infinite(lm, SupportMode::Full).winner == Player::P2);
}

TEST_CASE("a deterministic reach instance is won with its strategy") {
  const Nfa tiny = normalize(test_util::tiny_reach());
  const InfiniteResult r = solve_infinite(tiny);
  REQUIRE(r.winner == Player::P1);
  REQUIRE(r.p1_strategy.size() == 1);
  CHECK(r.p1_strategy[0].first == state_bit(tiny.initial));
  CHECK(r.p1_strategy[0].second == 0);
}

TEST_CASE("strategy moves decrease the distance to the goal") {
  const Nfa drift = normalize(generate_gadget("drift"));
  const InfiniteResult r = solve_infinite(drift);
  CHECK(r.winner == Player::P2);
  CHECK(r.p1_strategy.empty());
}

TEST_CASE("maximal answers dominate the full adversary") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 80; ++trial) {
    const Nfa nfa = normalize(test_util::random_nfa(rng, 3, 2));
    REQUIRE(solve_infinite(nfa, SupportMode::Maximal).winner ==
            solve_infinite(nfa, SupportMode::Full).winner);
  }
}

TEST_CASE("support formatting and arena export") {
  const Nfa drift = normalize(generate_gadget("drift"));
  CHECK(format_support(state_bit(0) | state_bit(1), drift) == "{q0,q1}");
  const std::string dot = support_arena_dot(drift);
  CHECK(dot.find("digraph supports") != std::string::npos);
  CHECK(dot.find("{q0}") != std::string::npos);
  CHECK(dot.find("a/3") != std::string::npos);
}
