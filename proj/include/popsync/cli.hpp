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
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popsync/common.hpp"
#include "popsync/gadgets.hpp"
#include "popsync/nfa.hpp"
#include "popsync/oracle.hpp"
#include "popsync/parity.hpp"
#include "popsync/simulate.hpp"
#include "popsync/support.hpp"

namespace popsync {

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

namespace detail {

inline Nfa load_nfa(const std::string& file, const std::string& gadget) {
  if (!file.empty() && !gadget.empty())
    throw ParseError("give an automaton file or --gadget, not both");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot read " + file);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_nfa(text.str());
  }
  if (!gadget.empty()) return generate_gadget(parse_gadget_spec(gadget));
  throw ParseError("no automaton given: pass FILE or --gadget SPEC");
}

}  // namespace detail

/**
 * Full command-line surface, callable in-process. Verdict token on the
 * first stdout line, detail after; exit 0/1 verdicts, 2 usage or parse
 * trouble, 3 blown exploration budget.
 */
inline CliResult run_cli(const std::vector<std::string>& args) {
  CliResult result;
  std::ostringstream out;
  std::ostringstream err;

  CLI::App app{"population control for nondeterministic automata"};
  app.name("popsync");
  app.require_subcommand(1);

  std::string file, gadget;
  uint64_t budget = 0;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("file", file, "automaton description file");
    sub->add_option("--gadget", gadget, "built-in family instead of a file, e.g. chain:3");
    sub->add_option("--budget", budget, "override exploration node budgets");
  };
  auto parity_budget = [&]() -> size_t { return budget ? budget : kDefaultParityBudget; };
  auto oracle_budget = [&]() -> size_t { return budget ? budget : kDefaultOracleBudget; };

  CLI::App* solve = app.add_subcommand("solve", "decide control of every population size");

  CLI::App* fixed = app.add_subcommand("solve-fixed-m", "decide one population size");
  int fixed_m = 1;
  fixed->add_option("--m", fixed_m, "population size")->required()->check(CLI::PositiveNumber);

  CLI::App* cutoff = app.add_subcommand("cutoff", "find the least losing population size");
  int max_m = 8;
  cutoff->add_option("--max-m", max_m, "scan bound")->required()->check(CLI::PositiveNumber);

  CLI::App* infinite = app.add_subcommand("infinite", "winner of the unbounded support game");
  std::string mode = "maximal";
  infinite->add_option("--mode", mode, "adversary answers: maximal or full")
      ->check(CLI::IsMember({"maximal", "full"}));

  CLI::App* simulate = app.add_subcommand("simulate", "play the solved strategy on tokens");
  int sim_m = 1;
  std::string adversary = "evensplit";
  uint64_t seed = 0;
  int max_steps = 100;
  simulate->add_option("--m", sim_m, "population size")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--adversary", adversary, "evensplit, maxspread, or random")
      ->check(CLI::IsMember({"evensplit", "maxspread", "random"}));
  simulate->add_option("--seed", seed, "random adversary seed");
  simulate->add_option("--max-steps", max_steps, "step budget")->check(CLI::PositiveNumber);

  CLI::App* gadget_cmd = app.add_subcommand("gadget", "print a built-in family member");
  std::string gadget_spec;
  gadget_cmd->add_option("spec", gadget_spec, "family, e.g. split or counter:3")->required();

  CLI::App* export_cmd = app.add_subcommand("export", "render solver structures");
  std::string object, format = "dot";
  export_cmd->add_option("--object", object, "support or parity")
      ->required()
      ->check(CLI::IsMember({"support", "parity"}));
  export_cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"dot"}));

  for (CLI::App* sub : {solve, fixed, cutoff, infinite, simulate, export_cmd}) add_input(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? 0 : 2;
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  try {
    if (solve->parsed()) {
      const ControlResult control =
          population_control(detail::load_nfa(file, gadget), parity_budget());
      const size_t total = control.game.num_p1_nodes();
      size_t won = 0;
      for (uint32_t s = 0; s < total; ++s)
        if (control.strategy.state_winner[s] == Player::P1) ++won;
      out << (control.yes ? "YES" : "NO") << "\n";
      out << "controller wins " << won << " of " << total << " abstract states\n";
      if (control.yes) {
        out << "strategy moves: " << control.strategy.entries() << "\n";
      } else {
        size_t counter = 0;
        for (const auto& per_state : control.strategy.p2_choice)
          for (const auto& choice : per_state)
            if (choice) ++counter;
        out << "adversary counter-moves: " << counter << "\n";
      }
      result.exit_code = control.yes ? 0 : 1;
    } else if (fixed->parsed()) {
      const Nfa norm = normalize(detail::load_nfa(file, gadget));
      const Player w = winner_fixed_m(norm, static_cast<uint32_t>(fixed_m), oracle_budget());
      out << to_string(w) << "\n";
      result.exit_code = w == Player::P1 ? 0 : 1;
    } else if (cutoff->parsed()) {
      const CutoffResult r =
          find_cutoff(detail::load_nfa(file, gadget), max_m, oracle_budget(), parity_budget());
      switch (r.kind) {
        case CutoffResult::Kind::NoCutoff: out << "NOCUTOFF\n"; break;
        case CutoffResult::Kind::Cutoff: out << "CUTOFF " << r.value << "\n"; break;
        case CutoffResult::Kind::ExceedsBudget: out << "EXCEEDS " << r.value << "\n"; break;
      }
      result.exit_code = 0;
    } else if (infinite->parsed()) {
      const Nfa norm = normalize(detail::load_nfa(file, gadget));
      const InfiniteResult r = solve_infinite(
          norm, mode == "full" ? SupportMode::Full : SupportMode::Maximal);
      out << to_string(r.winner) << "\n";
      for (const auto& [support, a] : r.p1_strategy)
        out << format_support(support, norm) << " -> " << norm.letter_names[a] << "\n";
      result.exit_code = r.winner == Player::P1 ? 0 : 1;
    } else if (simulate->parsed()) {
      const Nfa norm = normalize(detail::load_nfa(file, gadget));
      const ControlResult control = population_control(norm, parity_budget());
      Adversary adv = MaxSpread{};
      if (adversary == "evensplit") adv = EvenSplit{&control.game, &control.strategy};
      if (adversary == "random") adv = RandomAdversary{seed};
      MatchResult match;
      if (control.yes) {
        match = run_match(norm, static_cast<uint32_t>(sim_m), control.game, control.strategy,
                          adv, max_steps);
      } else {
        const OracleGreedyP1 greedy(
            norm, config_all_on(norm, norm.initial, static_cast<uint32_t>(sim_m)),
            oracle_budget());
        match = run_match_fn(
            norm, static_cast<uint32_t>(sim_m),
            [&greedy](const Config& c) { return greedy(c); }, adv, max_steps);
      }
      if (match.won)
        out << "WON " << match.steps << "\n";
      else
        out << "NOTWON\n";
      out << format_trace(match);
      result.exit_code = 0;
    } else if (gadget_cmd->parsed()) {
      out << format_nfa(generate_gadget(parse_gadget_spec(gadget_spec)));
      result.exit_code = 0;
    } else if (export_cmd->parsed()) {
      const Nfa norm = normalize(detail::load_nfa(file, gadget));
      if (object == "support")
        out << support_arena_dot(norm);
      else
        out << parity_game_dot(build_parity_game(norm, parity_budget()));
      result.exit_code = 0;
    }
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = 3;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = 2;
  }

  result.out = out.str();
  result.err = err.str();
  return result;
}

}  // namespace popsync
