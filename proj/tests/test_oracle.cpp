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
#include "popsync/oracle.hpp"
#include "test_util.hpp"

using namespace popsync;

TEST_CASE("explicit game exploration") {
  const Nfa split = generate_gadget("split");
  const ExplicitGame one = build_explicit_game(split, config_all_on(split, split.initial, 1));
  CHECK(one.configs.size() == 4);
  CHECK(one.configs[0].total() == 1);

  CHECK_THROWS_AS(build_explicit_game(split, config_all_on(split, split.initial, 8), 10),
                  BudgetExceeded);
  Config empty;
  empty.counts.assign(split.num_states(), 0);
  CHECK_THROWS_AS(build_explicit_game(split, empty), std::invalid_argument);
}

TEST_CASE("token game winners on the fixtures") {
  const Nfa split = normalize(generate_gadget("split"));
  for (uint32_t m = 1; m <= 6; ++m) CHECK(winner_fixed_m(split, m) == Player::P1);

  const Nfa chain = normalize(generate_gadget("chain", 3));
  CHECK(winner_fixed_m(chain, 1) == Player::P1);
  CHECK(winner_fixed_m(chain, 2) == Player::P1);
  for (uint32_t m = 3; m <= 5; ++m) CHECK(winner_fixed_m(chain, m) == Player::P2);

  const Nfa drift = normalize(generate_gadget("drift"));
  for (uint32_t m = 1; m <= 5; ++m) CHECK(winner_fixed_m(drift, m) == Player::P2);
}

TEST_CASE("losing never reverses as the population grows") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    const Nfa nfa = normalize(test_util::random_nfa(rng, 3, 2));
    bool lost = false;
    for (uint32_t m = 1; m <= 4; ++m) {
      const bool p2 = winner_fixed_m(nfa, m) == Player::P2;
      if (lost) REQUIRE(p2);
      lost = p2;
    }
  }
}

TEST_CASE("guaranteed synchronization distances on split") {
  const Nfa split = normalize(generate_gadget("split"));
  const auto steps = [&](uint32_t m) {
    return optimal_steps(split, config_all_on(split, split.initial, m), Objective::Reach);
  };
  CHECK(steps(1) == 2);
  CHECK(steps(2) == 4);
  CHECK(steps(4) == 6);
  CHECK(steps(8) == 8);
}

TEST_CASE("an unwinnable instance has no synchronization distance") {
  const Nfa drift = normalize(generate_gadget("drift"));
  CHECK_FALSE(
      optimal_steps(drift, config_all_on(drift, drift.initial, 1), Objective::Reach).has_value());
}

TEST_CASE("survival counts on the counter gadgets") {
  for (int n = 1; n <= 3; ++n) {
    const Nfa c = normalize(generate_gadget("counter", n));
    Config start;
    start.counts.assign(c.num_states(), 0);
    for (int i = 1; i <= n; ++i) start.counts[*c.find_state("l" + std::to_string(i))] = 1;
    const auto v = optimal_steps(c, start, Objective::Survive);
    REQUIRE(v.has_value());
    CHECK(*v == (1 << n));
  }
}

TEST_CASE("survival with an explicit avoided state") {
  const Nfa drift = normalize(generate_gadget("drift"));
  const state_t q1 = *drift.find_state("q1");
  const auto v = optimal_steps(drift, config_all_on(drift, drift.initial, 1),
                               Objective::Survive, q1);
  REQUIRE(v.has_value());
  CHECK(*v == 1);  // the adversary can push the token over immediately
}

TEST_CASE("survival without a named avoided state is rejected") {
  const Nfa split = normalize(generate_gadget("split"));
  CHECK_THROWS_AS(optimal_steps(split, config_all_on(split, split.initial, 1),
                                Objective::Survive),
                  std::invalid_argument);
}

TEST_CASE("cut-off search on the fixtures") {
  const CutoffResult none = find_cutoff(generate_gadget("split"), 8);
  CHECK(none.kind == CutoffResult::Kind::NoCutoff);

  for (int k = 2; k <= 4; ++k) {
    const CutoffResult r = find_cutoff(generate_gadget("chain", k), 8);
    REQUIRE(r.kind == CutoffResult::Kind::Cutoff);
    CHECK(r.value == k);
  }

  const CutoffResult drift = find_cutoff(generate_gadget("drift"), 8);
  REQUIRE(drift.kind == CutoffResult::Kind::Cutoff);
  CHECK(drift.value == 1);

  const CutoffResult counter = find_cutoff(generate_gadget("counter", 2), 6);
  REQUIRE(counter.kind == CutoffResult::Kind::Cutoff);
  CHECK(counter.value == 1);
}

TEST_CASE("cut-off search reports an exhausted scan") {
  const CutoffResult r = find_cutoff(generate_gadget("chain", 4), 2);
  CHECK(r.kind == CutoffResult::Kind::ExceedsBudget);
  CHECK(r.value == 2);
}

TEST_CASE("cut-off search reports how far a blown budget let it decide") {
  const CutoffResult r = find_cutoff(generate_gadget("chain", 3), 8, 5);
  CHECK(r.kind == CutoffResult::Kind::ExceedsBudget);
  CHECK(r.value == 0);
}

TEST_CASE("abstract yes verdicts are confirmed by token games") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    const Nfa nfa = normalize(test_util::random_nfa(rng, 3, 2));
    if (!population_control(nfa).yes) continue;
    for (uint32_t m = 1; m <= 4; ++m) REQUIRE(winner_fixed_m(nfa, m) == Player::P1);
  }
}

TEST_CASE("the greedy controller follows the computed values") {
  const Nfa split = normalize(generate_gadget("split"));
  const Config start = config_all_on(split, split.initial, 2);
  const OracleGreedyP1 greedy(split, start);
  // from the start every letter stalls except the scatter move
  CHECK(greedy(start) == *split.find_letter("delta"));
  Config stray;
  stray.counts.assign(split.num_states(), 0);
  stray.counts[*split.find_state("q1")] = 3;  // wrong total, never explored
  CHECK_THROWS_AS(greedy(stray), std::logic_error);
}
