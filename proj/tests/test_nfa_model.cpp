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
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "popsync/gadgets.hpp"
#include "popsync/nfa.hpp"
#include "test_util.hpp"

using namespace popsync;

namespace {

size_t transition_count(const Nfa& nfa) {
  size_t count = 0;
  for (letter_t a = 0; a < nfa.num_letters(); ++a)
    for (state_t q = 0; q < nfa.num_states(); ++q)
      count += static_cast<size_t>(std::popcount(nfa.succ(q, a)));
  return count;
}

}  // namespace

TEST_CASE("document parsing round-trips through formatting") {
  const std::string text =
      "states: q0 q1 f\n"
      "letters: a b\n"
      "initial: q0\n"
      "target: f\n"
      "q0 a q1\n"
      "q0 a f\n"
      "q1 b f\n";
  const Nfa nfa = parse_nfa(text);
  CHECK(nfa.num_states() == 3);
  CHECK(nfa.num_letters() == 2);
  CHECK(nfa.initial == 0);
  CHECK(nfa.target == 2);
  CHECK(nfa.succ(0, 0) == (state_bit(1) | state_bit(2)));
  CHECK(parse_nfa(format_nfa(nfa)).delta == nfa.delta);
  CHECK(format_nfa(parse_nfa(format_nfa(nfa))) == format_nfa(nfa));
}

TEST_CASE("parsing tolerates comments and blank lines") {
  const std::string text =
      "# two state chain\n"
      "states: s t\n"
      "\n"
      "letters: x\n"
      "initial: s\n"
      "target: t\n"
      "s x t  # forward\n";
  const Nfa nfa = parse_nfa(text);
  CHECK(nfa.num_states() == 2);
  CHECK(nfa.succ(0, 0) == state_bit(1));
}

TEST_CASE("parse errors carry context") {
  CHECK_THROWS_AS(parse_nfa("states: a\nletters: x\ninitial: a\ntarget: b\n"), ParseError);
  CHECK_THROWS_AS(parse_nfa("states: a\ninitial: a\ntarget: a\n"), ParseError);
  CHECK_THROWS_AS(
      parse_nfa("states: a\nletters: x\ninitial: a\ntarget: a\na x a extra\n"), ParseError);
  CHECK_THROWS_AS(
      parse_nfa("states: a\nletters: x\ninitial: a\ntarget: a\na y a\n"), ParseError);
  CHECK_THROWS_AS(parse_nfa(""), ParseError);
}

TEST_CASE("the split gadget matches its published shape") {
  const Nfa split = generate_gadget("split");
  CHECK(split.num_states() == 4);
  CHECK(split.num_letters() == 3);
  CHECK(transition_count(split) == 13);
  CHECK(split.normalized());
  CHECK(split.state_names[split.target] == "f");
  // delta scatters q0 across both branches
  const letter_t delta = *split.find_letter("delta");
  CHECK(split.succ(*split.find_state("q0"), delta) ==
        (state_bit(*split.find_state("q1")) | state_bit(*split.find_state("q2"))));
}

TEST_CASE("chain gadgets grow linearly") {
  // principal states q0..qk and f, one explicit sink, letters b and a1..ak
  for (int k = 2; k <= 5; ++k) {
    const Nfa chain = generate_gadget("chain", k);
    CHECK(chain.num_states() == static_cast<unsigned>(k + 3));
    CHECK(chain.num_letters() == static_cast<unsigned>(k + 1));
    CHECK(chain.normalized());
  }
}

TEST_CASE("counter gadgets keep the goal unreachable") {
  for (int n = 1; n <= 3; ++n) {
    const Nfa c = generate_gadget("counter", n);
    CHECK(c.num_states() == static_cast<unsigned>(2 * n + 2));
    CHECK(c.num_letters() == static_cast<unsigned>(n));
    // one-agent reachability from the initial state never hits the target
    mask_t reach = state_bit(c.initial);
    for (bool grow = true; grow;) {
      grow = false;
      for (letter_t a = 0; a < c.num_letters(); ++a)
        for (state_t q : states_of(reach)) {
          const mask_t next = c.succ(q, a);
          if (next & ~reach) {
            reach |= next;
            grow = true;
          }
        }
    }
    CHECK_FALSE(reach & state_bit(c.target));
  }
}

TEST_CASE("family gadget sizes") {
  const Nfa fam = generate_gadget("family_a", 1);
  CHECK(fam.num_states() == 9);
  CHECK(fam.num_letters() == 5);
  CHECK(fam.normalized());
  CHECK(generate_gadget("family_a", 2).num_states() == 11);
}

TEST_CASE("gadget specs parse strictly") {
  CHECK(parse_gadget_spec("split").kind == "split");
  CHECK(parse_gadget_spec("chain:3").param == 3);
  CHECK_THROWS_AS(parse_gadget_spec("chain"), ParseError);
  CHECK_THROWS_AS(parse_gadget_spec("chain:0"), ParseError);
  CHECK_THROWS_AS(parse_gadget_spec("chain:x"), ParseError);
  CHECK_THROWS_AS(parse_gadget_spec("split:2"), ParseError);
  CHECK_THROWS_AS(parse_gadget_spec("unknown"), ParseError);
}

TEST_CASE("normalization completes and redirects") {
  Nfa nfa;
  nfa.state_names = {"s", "t"};
  nfa.letter_names = {"x"};
  nfa.initial = 0;
  nfa.target = 1;
  nfa.delta = {{state_bit(1), state_bit(0)}};  // target moves away, so not a sink

  const Nfa norm = normalize(nfa);
  CHECK(norm.normalized());
  CHECK(norm.state_names[norm.initial] == "s");
  // running it twice is stable
  CHECK(format_nfa(normalize(norm)) == format_nfa(norm));
}

TEST_CASE("normalization leaves normalized automatons untouched") {
  const Nfa split = generate_gadget("split");
  CHECK(format_nfa(normalize(split)) == format_nfa(split));
}

TEST_CASE("normalization picks fresh names on collision") {
  Nfa nfa;
  nfa.state_names = {"goal", "sink", "end"};
  nfa.letter_names = {"x"};
  nfa.initial = 0;
  nfa.target = 1;
  nfa.delta = {{state_bit(1), state_bit(0), 0}};  // state end has no move

  const Nfa norm = normalize(nfa);
  CHECK(norm.normalized());
  // every original name survives exactly once
  CHECK(norm.find_state("goal").has_value());
  CHECK(norm.find_state("sink").has_value());
  CHECK(norm.find_state("end").has_value());
  size_t goals = 0;
  for (const std::string& name : norm.state_names)
    if (name == "goal") ++goals;
  CHECK(goals == 1);
}

TEST_CASE("state permutation keeps the document equivalent") {
  std::mt19937_64 rng(11);
  const Nfa split = generate_gadget("split");
  std::vector<state_t> perm = {2, 0, 3, 1};
  const Nfa moved = permute_states(split, perm);
  CHECK(moved.num_states() == split.num_states());
  CHECK(moved.state_names[moved.initial] == "q0");
  CHECK(moved.state_names[moved.target] == "f");
  const Nfa back = parse_nfa(format_nfa(moved));
  CHECK(transition_count(back) == 13);
}
