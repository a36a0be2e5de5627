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
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "popsync/common.hpp"

namespace popsync {

/**
 * Nondeterministic finite automaton with designated initial and target states.
 *
 * States and letters are dense indices into the name tables; delta[a][q] is the
 * successor set of state q under letter a. An Nfa is "normalized" when it is
 * complete (every state has a successor on every letter) and the target is a
 * sink (every letter maps it exactly to itself); all game constructions below
 * require normalized input.
 */
struct Nfa {
  std::vector<std::string> state_names;
  std::vector<std::string> letter_names;
  state_t initial = 0;
  state_t target = 0;
  std::vector<std::vector<mask_t>> delta;  // [letter][state] -> successor mask

  unsigned num_states() const { return static_cast<unsigned>(state_names.size()); }
  unsigned num_letters() const { return static_cast<unsigned>(letter_names.size()); }
  mask_t states_mask() const { return full_mask(num_states()); }
  mask_t succ(state_t q, letter_t a) const { return delta[a][q]; }

  bool complete() const {
    for (const auto& row : delta)
      for (mask_t s : row)
        if (s == 0) return false;
    return true;
  }

  /// Every letter maps the target onto exactly itself.
  bool target_is_sink() const {
    for (const auto& row : delta)
      if (row[target] != state_bit(target)) return false;
    return true;
  }

  bool normalized() const { return complete() && target_is_sink(); }

  std::optional<state_t> find_state(const std::string& name) const {
    for (state_t i = 0; i < state_names.size(); ++i)
      if (state_names[i] == name) return i;
    return std::nullopt;
  }

  std::optional<letter_t> find_letter(const std::string& name) const {
    for (letter_t i = 0; i < letter_names.size(); ++i)
      if (letter_names[i] == name) return i;
    return std::nullopt;
  }

  void add_transition(state_t q, letter_t a, state_t r) { delta[a][q] |= state_bit(r); }

  friend bool operator==(const Nfa&, const Nfa&) = default;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace detail

/**
 * Parse the line-oriented automaton document format.
 *
 *   # comment
 *   states: q0 q1 f
 *   letters: a b
 *   initial: q0
 *   target: f
 *   q0 a q1
 *
 * Sections may appear in any order; transition lines have exactly three
 * tokens (src letter dst) and duplicates are idempotent. Names are arbitrary
 * non-whitespace tokens. Throws ParseError with a line number on malformed
 * input or unresolved names.
 */
inline Nfa parse_nfa(const std::string& text) {
  std::vector<std::pair<int, std::vector<std::string>>> sections;  // line, tokens
  std::vector<std::pair<int, std::vector<std::string>>> triples;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    if (!toks[0].empty() && toks[0].back() == ':')
      sections.emplace_back(lineno, std::move(toks));
    else if (toks.size() == 3)
      triples.emplace_back(lineno, std::move(toks));
    else
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected a section header or a 3-token transition");
  }

  auto fail = [](int line, const std::string& msg) -> void {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
  };

  std::optional<std::vector<std::string>> states, letters, initial, target;
  for (auto& [line, toks] : sections) {
    const std::string& key = toks[0];
    std::vector<std::string> rest(toks.begin() + 1, toks.end());
    auto put = [&](std::optional<std::vector<std::string>>& slot) {
      if (slot) fail(line, "duplicate section '" + key + "'");
      slot = std::move(rest);
    };
    if (key == "states:") put(states);
    else if (key == "letters:") put(letters);
    else if (key == "initial:") put(initial);
    else if (key == "target:") put(target);
    else fail(line, "unknown section '" + key + "'");
  }
  if (!states) throw ParseError("missing 'states:' section");
  if (!letters) throw ParseError("missing 'letters:' section");
  if (!initial) throw ParseError("missing 'initial:' section");
  if (!target) throw ParseError("missing 'target:' section");
  if (states->empty()) throw ParseError("'states:' section declares no states");
  if (letters->empty()) throw ParseError("'letters:' section declares no letters");
  if (states->size() > kMaxStates)
    throw ParseError("too many states (limit " + std::to_string(kMaxStates) + ")");
  if (initial->size() != 1) throw ParseError("'initial:' must name exactly one state");
  if (target->size() != 1) throw ParseError("'target:' must name exactly one state");

  Nfa nfa;
  nfa.state_names = *states;
  nfa.letter_names = *letters;
  for (size_t i = 0; i < nfa.state_names.size(); ++i)
    for (size_t j = i + 1; j < nfa.state_names.size(); ++j)
      if (nfa.state_names[i] == nfa.state_names[j])
        throw ParseError("duplicate state name '" + nfa.state_names[i] + "'");
  for (size_t i = 0; i < nfa.letter_names.size(); ++i)
    for (size_t j = i + 1; j < nfa.letter_names.size(); ++j)
      if (nfa.letter_names[i] == nfa.letter_names[j])
        throw ParseError("duplicate letter name '" + nfa.letter_names[i] + "'");

  auto state_of = [&](int line, const std::string& n) -> state_t {
    if (auto q = nfa.find_state(n)) return *q;
    fail(line, "unknown state '" + n + "'");
    return 0;
  };
  auto letter_of = [&](int line, const std::string& n) -> letter_t {
    if (auto a = nfa.find_letter(n)) return *a;
    fail(line, "unknown letter '" + n + "'");
    return 0;
  };

  nfa.delta.assign(nfa.num_letters(), std::vector<mask_t>(nfa.num_states(), 0));
  nfa.initial = state_of(0, (*initial)[0]);
  nfa.target = state_of(0, (*target)[0]);
  for (auto& [line, toks] : triples)
    nfa.add_transition(state_of(line, toks[0]), letter_of(line, toks[1]),
                       state_of(line, toks[2]));
  return nfa;
}

/// Serialize to the document format parsed by parse_nfa (round-trip stable).
inline std::string format_nfa(const Nfa& nfa) {
  std::ostringstream out;
  out << "states:";
  for (const auto& s : nfa.state_names) out << ' ' << s;
  out << "\nletters:";
  for (const auto& a : nfa.letter_names) out << ' ' << a;
  out << "\ninitial: " << nfa.state_names[nfa.initial];
  out << "\ntarget: " << nfa.state_names[nfa.target] << '\n';
  for (state_t q = 0; q < nfa.num_states(); ++q)
    for (letter_t a = 0; a < nfa.num_letters(); ++a)
      for_each_state(nfa.succ(q, a), [&](state_t r) {
        out << nfa.state_names[q] << ' ' << nfa.letter_names[a] << ' '
            << nfa.state_names[r] << '\n';
      });
  return out.str();
}

namespace detail {

inline std::string fresh_name(const Nfa& nfa, std::string base) {
  while (nfa.find_state(base) || nfa.find_letter(base)) base += '\'';
  return base;
}

}  // namespace detail

/**
 * Normalize an automaton: make the target a sink and complete the transition
 * table.
 *
 * If the target is not already a sink, fresh states `goal` (the new target, a
 * sink) and `sink` (a losing sink) are added together with a fresh letter
 * `end` taking the old target to goal and every other pre-existing state to
 * sink. Any still-missing (state, letter) pair is then routed to the losing
 * sink (added on demand when the first transform did not run). Normalized
 * input is returned unchanged; the operation is idempotent.
 */
inline Nfa normalize(const Nfa& in) {
  Nfa nfa = in;
  if (nfa.complete() && nfa.target_is_sink()) return nfa;

  if (!nfa.target_is_sink()) {
    const state_t old_target = nfa.target;
    const state_t goal = nfa.num_states();
    const state_t sink = goal + 1;
    if (sink >= kMaxStates + 1 && nfa.num_states() + 2 > kMaxStates)
      throw ParseError("normalization exceeds the state limit");
    nfa.state_names.push_back(detail::fresh_name(nfa, "goal"));
    nfa.state_names.push_back(detail::fresh_name(nfa, "sink"));
    for (auto& row : nfa.delta) {
      row.resize(nfa.num_states(), 0);
      row[goal] = state_bit(goal);
      row[sink] = state_bit(sink);
    }
    std::vector<mask_t> end_row(nfa.num_states(), state_bit(sink));
    end_row[old_target] = state_bit(goal);
    end_row[goal] = state_bit(goal);
    end_row[sink] = state_bit(sink);
    nfa.letter_names.push_back(detail::fresh_name(nfa, "end"));
    nfa.delta.push_back(std::move(end_row));
    nfa.target = goal;
  }

  if (!nfa.complete()) {
    // Reuse a sink added above if any; otherwise append one now.
    std::optional<state_t> sink;
    for (state_t q = 0; q < nfa.num_states(); ++q) {
      bool is_sink = q != nfa.target;
      for (const auto& row : nfa.delta) is_sink = is_sink && row[q] == state_bit(q);
      if (is_sink) { sink = q; break; }
    }
    if (!sink) {
      if (nfa.num_states() + 1 > kMaxStates)
        throw ParseError("normalization exceeds the state limit");
      sink = nfa.num_states();
      nfa.state_names.push_back(detail::fresh_name(nfa, "sink"));
      for (auto& row : nfa.delta) {
        row.resize(nfa.num_states(), 0);
        row[*sink] = state_bit(*sink);
      }
    }
    for (auto& row : nfa.delta)
      for (mask_t& s : row)
        if (s == 0) s = state_bit(*sink);
  }
  return nfa;
}

/// Relabel states by perm (perm[old] = new); winner verdicts are invariant.
inline Nfa permute_states(const Nfa& in, const std::vector<state_t>& perm) {
  if (perm.size() != in.num_states())
    throw std::invalid_argument("permute_states: permutation size mismatch");
  Nfa out = in;
  for (state_t q = 0; q < in.num_states(); ++q) out.state_names[perm[q]] = in.state_names[q];
  out.initial = perm[in.initial];
  out.target = perm[in.target];
  for (letter_t a = 0; a < in.num_letters(); ++a)
    for (state_t q = 0; q < in.num_states(); ++q) {
      mask_t m = 0;
      for_each_state(in.delta[a][q], [&](state_t r) { m |= state_bit(perm[r]); });
      out.delta[a][perm[q]] = m;
    }
  return out;
}

}  // namespace popsync
