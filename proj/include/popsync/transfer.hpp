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
#include <string>
#include <vector>

#include "popsync/common.hpp"
#include "popsync/nfa.hpp"

namespace popsync {

/// Relation over states, one bit row per source. rows.size() == num_states
/// always, also for sources outside the domain (their rows are 0).
struct TransferGraph {
  std::vector<mask_t> rows;

  size_t num_states() const { return rows.size(); }
  bool contains(state_t q, state_t r) const { return (rows[q] >> r) & 1; }

  mask_t domain() const {
    mask_t d = 0;
    for (size_t q = 0; q < rows.size(); ++q)
      if (rows[q]) d |= state_bit(static_cast<state_t>(q));
    return d;
  }
  mask_t image() const {
    mask_t im = 0;
    for (mask_t row : rows) im |= row;
    return im;
  }

  bool operator==(const TransferGraph&) const = default;
};

struct TransferGraphHash {
  size_t operator()(const TransferGraph& g) const {
    size_t h = g.rows.size();
    for (mask_t row : g.rows) hash_combine(h, row);
    return h;
  }
};

inline TransferGraph compose(const TransferGraph& g, const TransferGraph& h) {
  TransferGraph out;
  out.rows.assign(g.rows.size(), 0);
  for (size_t q = 0; q < g.rows.size(); ++q) {
    mask_t acc = 0;
    for_each_state(g.rows[q], [&](state_t x) { acc |= h.rows[x]; });
    out.rows[q] = acc;
  }
  return out;
}

/**
 * A leak of g across h: states q, x, y with (q,y) in g.h and (x,y) in h but
 * (q,x) not in g. Some h-edge feeds a composite target from a source the
 * first graph never routed to, so tracking g.h alone loses information.
 */
inline bool leaks_at(const TransferGraph& g, const TransferGraph& h) {
  const size_t n = g.rows.size();
  for (size_t q = 0; q < n; ++q) {
    mask_t comp = 0;
    for_each_state(g.rows[q], [&](state_t x) { comp |= h.rows[x]; });
    if (!comp) continue;
    mask_t outside = 0;
    const mask_t non_row = full_mask(n) & ~g.rows[q];
    for_each_state(non_row, [&](state_t x) { outside |= h.rows[x]; });
    if (outside & comp) return true;
  }
  return false;
}

/// Whether some source reaches r but not t through g.
inline bool separates(const TransferGraph& g, state_t r, state_t t) {
  for (mask_t row : g.rows)
    if (((row >> r) & 1) && !((row >> t) & 1)) return true;
  return false;
}

/// pairs[r] bit t set iff separates(g, r, t). Computed column-wise.
inline std::vector<mask_t> separated_pairs(const TransferGraph& g) {
  const size_t n = g.rows.size();
  std::vector<mask_t> cols(n, 0);
  for (size_t q = 0; q < n; ++q)
    for_each_state(g.rows[q], [&](state_t r) { cols[r] |= state_bit(static_cast<state_t>(q)); });
  std::vector<mask_t> pairs(n, 0);
  for (size_t r = 0; r < n; ++r)
    for (size_t t = 0; t < n; ++t)
      if (r != t && (cols[r] & ~cols[t])) pairs[r] |= state_bit(static_cast<state_t>(t));
  return pairs;
}

/// The adversary's least committal answer: every agent takes every branch.
inline TransferGraph maximal_transfer(const Nfa& nfa, mask_t support, letter_t a) {
  TransferGraph g;
  g.rows.assign(nfa.num_states(), 0);
  for_each_state(support, [&](state_t q) { g.rows[q] = nfa.succ(q, a); });
  return g;
}

/// Number of compatible transfer graphs from (support, a): the product of
/// (2^k - 1) over per-state branch counts k, saturated at UINT64_MAX.
inline uint64_t count_compatible(const Nfa& nfa, mask_t support, letter_t a) {
  uint64_t total = 1;
  bool dead = false;
  for_each_state(support, [&](state_t q) {
    const int k = std::popcount(nfa.succ(q, a));
    if (k == 0) { dead = true; return; }
    const uint64_t term = k >= 64 ? UINT64_MAX : (uint64_t{1} << k) - 1;
    if (total > UINT64_MAX / term) total = UINT64_MAX;
    else total *= term;
  });
  return dead ? 0 : total;
}

/**
 * Enumerates every transfer graph compatible with (support, a): one non-empty
 * successor subset per supported state. Odometer order, the highest state
 * index stepping fastest; subset ranks map bit j to the j-th smallest
 * successor of rank+1.
 */
class CompatibleGraphs {
 public:
  CompatibleGraphs(const Nfa& nfa, mask_t support, letter_t a)
      : num_states_(nfa.num_states()) {
    for_each_state(support, [&](state_t q) {
      const mask_t s = nfa.succ(q, a);
      if (s == 0) done_ = true;
      sources_.push_back(q);
      succs_.push_back(states_of(s));
    });
    digits_.assign(sources_.size(), 0);
  }

  bool done() const { return done_; }

  TransferGraph current() const {
    TransferGraph g;
    g.rows.assign(num_states_, 0);
    for (size_t i = 0; i < sources_.size(); ++i) {
      const uint64_t pattern = digits_[i] + 1;
      mask_t row = 0;
      for (size_t j = 0; j < succs_[i].size(); ++j)
        if ((pattern >> j) & 1) row |= state_bit(succs_[i][j]);
      g.rows[sources_[i]] = row;
    }
    return g;
  }

  void next() {
    for (size_t i = digits_.size(); i-- > 0;) {
      const uint64_t max_rank = (uint64_t{1} << succs_[i].size()) - 1;
      if (++digits_[i] < max_rank) return;
      digits_[i] = 0;
    }
    done_ = true;
  }

 private:
  size_t num_states_;
  std::vector<state_t> sources_;
  std::vector<std::vector<state_t>> succs_;
  std::vector<uint64_t> digits_;
  bool done_ = false;
};

/// "q0->q1,q1->f" listing, source-major then target order.
inline std::string format_transfer(const TransferGraph& g, const Nfa& nfa) {
  std::string out;
  for (size_t q = 0; q < g.rows.size(); ++q)
    for_each_state(g.rows[q], [&](state_t r) {
      if (!out.empty()) out += ',';
      out += nfa.state_names[q];
      out += "->";
      out += nfa.state_names[r];
    });
  return out;
}

}  // namespace popsync
