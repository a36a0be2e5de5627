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

#include <string>
#include <vector>

#include "popsync/nfa.hpp"

namespace popsync {

/// Parsed `kind[:param]` gadget selector, e.g. "split", "chain:3", "counter:2".
struct GadgetSpec {
  std::string kind;
  int param = 0;
};

namespace detail {

class NfaBuilder {
 public:
  state_t state(const std::string& name) {
    nfa_.state_names.push_back(name);
    return static_cast<state_t>(nfa_.state_names.size() - 1);
  }
  letter_t letter(const std::string& name) {
    nfa_.letter_names.push_back(name);
    return static_cast<letter_t>(nfa_.letter_names.size() - 1);
  }
  void edge(state_t q, letter_t a, state_t r) { edges_.push_back({q, a, r}); }
  Nfa finish(state_t initial, state_t target) {
    nfa_.initial = initial;
    nfa_.target = target;
    nfa_.delta.assign(nfa_.num_letters(), std::vector<mask_t>(nfa_.num_states(), 0));
    for (auto& [q, a, r] : edges_) nfa_.add_transition(q, a, r);
    return std::move(nfa_);
  }

 private:
  struct E { state_t q; letter_t a; state_t r; };
  Nfa nfa_;
  std::vector<E> edges_;
};

// The two-armed splitter: the controller can only halve the crowd on q0, so
// any fixed population synchronizes in logarithmically many rounds while the
// unbounded-support abstraction never does.
inline Nfa make_split() {
  NfaBuilder b;
  state_t q0 = b.state("q0"), q1 = b.state("q1"), q2 = b.state("q2"), f = b.state("f");
  letter_t a = b.letter("a"), bb = b.letter("b"), d = b.letter("delta");
  b.edge(q0, a, q0); b.edge(q0, bb, q0); b.edge(q0, d, q1); b.edge(q0, d, q2);
  b.edge(q1, a, f);  b.edge(q1, bb, q0); b.edge(q1, d, q1);
  b.edge(q2, a, q0); b.edge(q2, bb, f);  b.edge(q2, d, q2);
  b.edge(f, a, f);   b.edge(f, bb, f);   b.edge(f, d, f);
  return b.finish(q0, f);
}

// k branches, one poisoned per letter: with k tokens spread over all branches
// every continuation loses one, so the cut-off is exactly k.
inline Nfa make_chain(int k) {
  NfaBuilder bld;
  state_t q0 = bld.state("q0");
  std::vector<state_t> q(1, q0);
  for (int i = 1; i <= k; ++i) q.push_back(bld.state("q" + std::to_string(i)));
  state_t f = bld.state("f"), sink = bld.state("sink");
  letter_t b = bld.letter("b");
  std::vector<letter_t> a;
  for (int i = 1; i <= k; ++i) a.push_back(bld.letter("a" + std::to_string(i)));

  for (int i = 1; i <= k; ++i) { bld.edge(q0, b, q[i]); bld.edge(q[i], b, q0); }
  bld.edge(f, b, f); bld.edge(sink, b, sink);
  for (int j = 0; j < k; ++j) {
    bld.edge(q0, a[j], sink);
    for (int i = 1; i <= k; ++i) bld.edge(q[i], a[j], i == j + 1 ? sink : f);
    bld.edge(f, a[j], f); bld.edge(sink, a[j], sink);
  }
  return bld.finish(q0, f);
}

// Two states, one letter; tokens may drift into the absorbing target but the
// adversary can park one on q0 forever.
inline Nfa make_drift() {
  NfaBuilder b;
  state_t q0 = b.state("q0"), q1 = b.state("q1");
  letter_t a = b.letter("a");
  b.edge(q0, a, q0); b.edge(q0, a, q1); b.edge(q1, a, q1);
  return b.finish(q0, q1);
}

// Winning requires remembering which probe letter was played last: no
// support-positional controller synchronizes this one.
inline Nfa make_leakmemory() {
  NfaBuilder bld;
  state_t q0 = bld.state("q0"), q1 = bld.state("q1"), q2 = bld.state("q2");
  state_t q3 = bld.state("q3"), q4 = bld.state("q4");
  state_t f = bld.state("f"), sink = bld.state("sink");
  letter_t a = bld.letter("a"), b = bld.letter("b"), c = bld.letter("c");

  bld.edge(q1, a, q2); bld.edge(q2, a, q1); bld.edge(q3, a, q4); bld.edge(q4, a, q3);
  bld.edge(q0, a, sink);
  bld.edge(q1, b, q1); bld.edge(q2, b, q3); bld.edge(q3, b, q2); bld.edge(q3, b, q4);
  bld.edge(q4, b, q3); bld.edge(q0, b, sink);
  bld.edge(q0, c, q1); bld.edge(q0, c, q2); bld.edge(q0, c, q3); bld.edge(q0, c, q4);
  bld.edge(q1, c, f); bld.edge(q3, c, f); bld.edge(q4, c, f); bld.edge(q2, c, sink);
  for (letter_t x : {a, b, c}) { bld.edge(f, x, f); bld.edge(sink, x, sink); }
  return bld.finish(q0, f);
}

// n-bit increment clock. Letter alpha_i is safe exactly when bit i is 0 and
// every lower bit is 1; seeded with one token per low bit the clock survives
// exactly 2^n configurations. The target is an unreachable sink: the gadget
// is a timing component, not a game worth winning on its own.
inline Nfa make_counter(int n) {
  NfaBuilder b;
  std::vector<state_t> lo, hi;
  for (int i = 1; i <= n; ++i) lo.push_back(b.state("l" + std::to_string(i)));
  for (int i = 1; i <= n; ++i) hi.push_back(b.state("h" + std::to_string(i)));
  state_t sink = b.state("sink"), goal = b.state("goal");
  for (int i = 0; i < n; ++i) {
    letter_t al = b.letter("alpha" + std::to_string(i + 1));
    b.edge(lo[i], al, hi[i]);
    b.edge(hi[i], al, sink);
    for (int j = 0; j < i; ++j) { b.edge(hi[j], al, lo[j]); b.edge(lo[j], al, sink); }
    for (int j = i + 1; j < n; ++j) { b.edge(lo[j], al, lo[j]); b.edge(hi[j], al, hi[j]); }
    b.edge(sink, al, sink); b.edge(goal, al, goal);
  }
  return b.finish(lo[0], goal);
}

// Splitter in lockstep with an n-bit clock. Pair letters drive both halves at
// once, `init` deals the crowd out, `star` cashes in (split tokens must sit on
// f, clock tokens must still be alive). The clock grants 2^n - 1 working
// steps, so the synchronizable crowd is doubly-exponentially bounded in n.
inline Nfa make_family_a(int n) {
  NfaBuilder bld;
  state_t start = bld.state("start");
  state_t q0 = bld.state("q0"), q1 = bld.state("q1"), q2 = bld.state("q2"), f = bld.state("f");
  std::vector<state_t> lo, hi;
  for (int i = 1; i <= n; ++i) lo.push_back(bld.state("l" + std::to_string(i)));
  for (int i = 1; i <= n; ++i) hi.push_back(bld.state("h" + std::to_string(i)));
  state_t goal = bld.state("goal"), sink = bld.state("sink");
  const std::vector<state_t> split = {q0, q1, q2, f};

  letter_t init = bld.letter("init");
  bld.edge(start, init, q0);
  for (int i = 0; i < n; ++i) bld.edge(start, init, lo[i]);
  for (state_t s : split) bld.edge(s, init, sink);
  for (int i = 0; i < n; ++i) { bld.edge(lo[i], init, sink); bld.edge(hi[i], init, sink); }
  bld.edge(goal, init, goal); bld.edge(sink, init, sink);

  for (const char* x : {"a", "b", "delta"})
    for (int i = 0; i < n; ++i) {
      letter_t p = bld.letter(std::string(x) + ".alpha" + std::to_string(i + 1));
      // split half
      if (x[0] == 'a') {
        bld.edge(q0, p, q0); bld.edge(q1, p, f); bld.edge(q2, p, q0);
      } else if (x[0] == 'b') {
        bld.edge(q0, p, q0); bld.edge(q1, p, q0); bld.edge(q2, p, f);
      } else {
        bld.edge(q0, p, q1); bld.edge(q0, p, q2); bld.edge(q1, p, q1); bld.edge(q2, p, q2);
      }
      bld.edge(f, p, f);
      // clock half
      bld.edge(lo[i], p, hi[i]);
      bld.edge(hi[i], p, sink);
      for (int j = 0; j < i; ++j) { bld.edge(hi[j], p, lo[j]); bld.edge(lo[j], p, sink); }
      for (int j = i + 1; j < n; ++j) { bld.edge(lo[j], p, lo[j]); bld.edge(hi[j], p, hi[j]); }
      bld.edge(start, p, sink);
      bld.edge(goal, p, goal); bld.edge(sink, p, sink);
    }

  letter_t star = bld.letter("star");
  bld.edge(f, star, goal);
  for (state_t s : {q0, q1, q2}) bld.edge(s, star, sink);
  for (int i = 0; i < n; ++i) { bld.edge(lo[i], star, goal); bld.edge(hi[i], star, goal); }
  bld.edge(start, star, sink);
  bld.edge(goal, star, goal); bld.edge(sink, star, sink);

  return bld.finish(start, goal);
}

}  // namespace detail

/**
 * Construct one of the bundled study instances. All generators emit
 * normalized automata (normalize returns them unchanged).
 *
 *   split           4-state splitter (a, b, delta)
 *   chain:<k>       k-branch elimination family, cut-off exactly k
 *   drift           2-state drift toward an absorbing target
 *   leakmemory      the memory-requiring 7-state instance
 *   counter:<n>     n-bit increment clock (timing component)
 *   family_a:<n>    splitter x clock product with init/star framing
 */
inline Nfa generate_gadget(const GadgetSpec& spec) {
  const bool wants_param = spec.kind == "chain" || spec.kind == "counter" ||
                           spec.kind == "family_a";
  if (wants_param && spec.param < 1)
    throw ParseError("gadget '" + spec.kind + "' needs a parameter >= 1");
  if (spec.kind == "split") return detail::make_split();
  if (spec.kind == "chain") return detail::make_chain(spec.param);
  if (spec.kind == "drift") return detail::make_drift();
  if (spec.kind == "leakmemory") return detail::make_leakmemory();
  if (spec.kind == "counter") return detail::make_counter(spec.param);
  if (spec.kind == "family_a") return detail::make_family_a(spec.param);
  throw ParseError("unknown gadget '" + spec.kind + "'");
}

inline Nfa generate_gadget(const std::string& kind, int param = 0) {
  return generate_gadget(GadgetSpec{kind, param});
}

/// Parse "kind" or "kind:param" selectors used by --gadget and the gadget command.
inline GadgetSpec parse_gadget_spec(const std::string& text) {
  GadgetSpec spec;
  auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (colon != std::string::npos) {
    const std::string p = text.substr(colon + 1);
    try {
      size_t used = 0;
      spec.param = std::stoi(p, &used);
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw ParseError("bad gadget parameter '" + p + "'");
    }
  }
  const bool wants_param = spec.kind == "chain" || spec.kind == "counter" ||
                           spec.kind == "family_a";
  if (!wants_param && spec.kind != "split" && spec.kind != "drift" &&
      spec.kind != "leakmemory")
    throw ParseError("unknown gadget '" + spec.kind + "'");
  if (wants_param && colon == std::string::npos)
    throw ParseError("gadget '" + spec.kind + "' requires a :<n> parameter");
  if (!wants_param && colon != std::string::npos)
    throw ParseError("gadget '" + spec.kind + "' takes no parameter");
  if (wants_param && spec.param < 1)
    throw ParseError("gadget '" + spec.kind + "' needs a parameter >= 1");
  return spec;
}

}  // namespace popsync
