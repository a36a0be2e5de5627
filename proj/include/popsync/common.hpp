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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace popsync {

// State sets and relation rows are single 64-bit masks; every automaton is
// capped at 64 states so all set algebra is branch-free word arithmetic.
using mask_t = std::uint64_t;
using state_t = std::uint32_t;
using letter_t = std::uint32_t;

inline constexpr unsigned kMaxStates = 64;

enum class Player { P1, P2 };

inline const char* to_string(Player p) { return p == Player::P1 ? "P1" : "P2"; }

/// Malformed document or gadget spec (syntax or unresolved names).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exploration outgrew its node budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr mask_t state_bit(state_t i) { return mask_t{1} << i; }

inline constexpr mask_t full_mask(unsigned n) {
  return n >= 64 ? ~mask_t{0} : (mask_t{1} << n) - 1;
}

template <typename F>
void for_each_state(mask_t m, F&& f) {
  while (m != 0) {
    f(static_cast<state_t>(std::countr_zero(m)));
    m &= m - 1;
  }
}

inline std::vector<state_t> states_of(mask_t m) {
  std::vector<state_t> v;
  v.reserve(static_cast<size_t>(std::popcount(m)));
  for_each_state(m, [&](state_t q) { v.push_back(q); });
  return v;
}

inline void hash_combine(std::size_t& seed, std::size_t value) {
  seed ^= value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace popsync
