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

// End-to-end checks, one line of output per criterion. Exit code is the
// number of failed criteria, so a zero exit means the suite is green.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "popsync/cli.hpp"
#include "popsync/gadgets.hpp"
#include "popsync/oracle.hpp"
#include "popsync/parity.hpp"
#include "popsync/simulate.hpp"
#include "popsync/support.hpp"
#include "test_util.hpp"

using namespace popsync;

namespace {

int failures = 0;

void criterion(int id, const char* label, double limit_s,
               const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= limit_s;
  const bool pass = ok && in_time;
  if (!pass) ++failures;
  std::printf("%s  criterion %d: %s (%.2fs%s)%s%s\n", pass ? "PASS" : "FAIL", id, label,
              secs, in_time ? "" : ", over limit", note.empty() ? "" : "  -- ",
              note.c_str());
  std::fflush(stdout);
}

bool expect(bool cond, std::string& note, const std::string& msg) {
  if (!cond && note.empty()) note = msg;
  return cond;
}

}  // namespace

int main() {
  criterion(1, "fixture verdicts and the unbounded-game separation", 10.0,
            [](std::string& note) {
    bool ok = true;
    const auto timed_yes = [&](const char* kind, int param, bool want) {
      const auto t0 = std::chrono::steady_clock::now();
      const bool yes = population_control(generate_gadget(kind, param)).yes;
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return expect(yes == want && secs < 10.0, note,
                    std::string(kind) + " verdict or time off");
    };
    ok &= timed_yes("split", 0, true);
    ok &= timed_yes("leakmemory", 0, true);
    for (int k = 2; k <= 4; ++k) ok &= timed_yes("chain", k, false);

    const Nfa drift = normalize(generate_gadget("drift"));
    const bool drift_yes = population_control(drift).yes;
    for (uint32_t m = 1; m <= 5; ++m) {
      const bool p1 = winner_fixed_m(drift, m) == Player::P1;
      if (drift_yes)
        ok &= expect(p1, note, "drift verdict contradicts the token game");
      else if (!p1)
        break;  // a losing size confirms the negative verdict
      else if (m == 5)
        ok &= expect(false, note, "drift loses nowhere up to five tokens");
    }

    ok &= expect(solve_infinite(generate_gadget("split")).winner == Player::P2, note,
                 "split unbounded game is not lost");
    ok &= expect(population_control(generate_gadget("split")).yes, note,
                 "split control verdict flipped");
    return ok;
  });

  criterion(2, "chain cut-offs are exact", 60.0, [](std::string& note) {
    bool ok = true;
    for (int k = 2; k <= 4; ++k) {
      const CutoffResult r = find_cutoff(generate_gadget("chain", k), 8);
      ok &= expect(r.kind == CutoffResult::Kind::Cutoff && r.value == k, note,
                   "chain(" + std::to_string(k) + ") cut-off wrong");
    }
    return ok;
  });

  criterion(3, "split synchronization distances sit in the doubling band", 120.0,
            [](std::string& note) {
    const Nfa split = normalize(generate_gadget("split"));
    bool ok = true;
    for (uint32_t m : {1u, 2u, 4u, 8u}) {
      const auto v =
          optimal_steps(split, config_all_on(split, split.initial, m), Objective::Reach);
      int lg = 0;
      while ((m >> (lg + 1)) != 0) ++lg;
      ok &= expect(v.has_value() && *v >= 2 * lg + 1 && *v <= 2 * lg + 2, note,
                   "distance out of band at m=" + std::to_string(m));
    }
    return ok;
  });

  criterion(4, "counter gadgets survive for exactly their capacity", 60.0,
            [](std::string& note) {
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
      const Nfa c = normalize(generate_gadget("counter", n));
      Config start;
      start.counts.assign(c.num_states(), 0);
      for (int i = 1; i <= n; ++i) start.counts[*c.find_state("l" + std::to_string(i))] = 1;
      const auto v = optimal_steps(c, start, Objective::Survive);
      ok &= expect(v.has_value() && *v == (1 << n), note,
                   "counter(" + std::to_string(n) + ") survival count wrong");
    }
    return ok;
  });

  criterion(5, "the two-letter family keeps a finite cut-off", 600.0,
            [](std::string& note) {
    const CutoffResult r = find_cutoff(generate_gadget("family_a", 1), 12);
    if (r.kind != CutoffResult::Kind::Cutoff) {
      note = "no finite cut-off found up to 12";
      return false;
    }
    note = "measured cut-off " + std::to_string(r.value);
    if (r.value != 9) note += " (documented deviation from the predicted 9)";
    return true;
  });

  criterion(6, "abstract verdicts agree with token games on random instances", 600.0,
            [](std::string& note) {
    std::mt19937_64 rng(61);
    int yes_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Nfa nfa = normalize(test_util::random_nfa(rng, 3, 2));
      if (!population_control(nfa).yes) continue;
      ++yes_seen;
      for (uint32_t m = 1; m <= 5; ++m)
        if (winner_fixed_m(nfa, m) != Player::P1) {
          note = "token game lost under a positive verdict";
          return false;
        }
    }
    note = std::to_string(yes_seen) + " controllable instances of 200 cross-checked";
    return yes_seen > 0;
  });

  criterion(7, "capacity classification matches the entry-cycle oracle", 300.0,
            [](std::string& note) {
    std::mt19937_64 rng(71);
    int checked = 0, rejected = 0;
    while (checked < 500 && rejected < 100000) {
      const Nfa nfa = normalize(test_util::random_nfa(rng, 4, 2));
      const auto play = test_util::random_lasso(nfa, rng);
      if (!play) {
        ++rejected;
        continue;
      }
      const CapacityVerdict v = classify_lasso(nfa, *play);
      if (v == CapacityVerdict::ReachesTarget) continue;
      if ((v == CapacityVerdict::InfiniteCapacity) != entry_cycle(nfa, *play)) {
        note = "classification disagreement";
        return false;
      }
      ++checked;
    }
    note = std::to_string(checked) + " lassos agreed";
    return checked >= 500;
  });

  criterion(8, "structural bounds hold on every fixture build", 120.0,
            [](std::string& note) {
    bool ok = true;
    const auto bounded = [&](const Nfa& nfa, const char* name) {
      try {
        check_structural_bounds(build_parity_game(normalize(nfa)));
      } catch (const std::exception& e) {
        ok = expect(false, note, std::string(name) + ": " + e.what());
      }
    };
    bounded(generate_gadget("split"), "split");
    bounded(generate_gadget("drift"), "drift");
    bounded(generate_gadget("leakmemory"), "leakmemory");
    for (int k = 2; k <= 4; ++k) bounded(generate_gadget("chain", k), "chain");
    for (int n = 1; n <= 3; ++n) bounded(generate_gadget("counter", n), "counter");
    bounded(generate_gadget("family_a", 1), "family_a");
    return ok;
  });

  criterion(9, "solved strategies close the loop on live populations", 300.0,
            [](std::string& note) {
    for (const char* kind : {"split", "leakmemory"}) {
      const Nfa nfa = normalize(generate_gadget(kind));
      const ControlResult control = population_control(nfa);
      if (!expect(control.yes, note, std::string(kind) + " stopped being controllable"))
        return false;
      for (uint32_t m = 1; m <= 8; ++m) {
        std::vector<Adversary> squad = {EvenSplit{&control.game, &control.strategy},
                                        MaxSpread{}};
        for (uint64_t seed = 0; seed < 5; ++seed) squad.push_back(RandomAdversary{seed});
        for (Adversary adv : squad) {
          const MatchResult match =
              run_match(nfa, m, control.game, control.strategy, adv, 100);
          if (!expect(match.won, note,
                      std::string(kind) + " lost a match at m=" + std::to_string(m)))
            return false;
        }
      }
    }
    const Nfa chain = normalize(generate_gadget("chain", 3));
    const ControlResult chain_control = population_control(chain);
    const OracleGreedyP1 greedy(chain, config_all_on(chain, chain.initial, 3));
    Adversary adv = EvenSplit{&chain_control.game, &chain_control.strategy};
    const MatchResult match = run_match_fn(
        chain, 3, [&greedy](const Config& c) { return greedy(c); }, adv, 100);
    return expect(!match.won, note, "the extracted adversary failed to hold chain(3)");
  });

  criterion(10, "command line output is reproducible byte for byte", 60.0,
            [](std::string& note) {
    const std::vector<std::vector<std::string>> calls = {
        {"solve", "--gadget", "split"},
        {"cutoff", "--gadget", "chain:3", "--max-m", "8"},
        {"simulate", "--gadget", "split", "--m", "5", "--adversary", "random", "--seed",
         "2"},
    };
    for (const auto& call : calls) {
      const CliResult one = run_cli(call);
      const CliResult two = run_cli(call);
      if (one.out != two.out || one.exit_code != two.exit_code) {
        note = "outputs diverged";
        return false;
      }
    }
    return true;
  });

  return failures;
}
