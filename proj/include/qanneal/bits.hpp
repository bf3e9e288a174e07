#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "qanneal/errors.hpp"

namespace qanneal {

/// Assignment of up to 64 bits; bit i of the word is q_i.
using Bits = std::uint64_t;

inline constexpr unsigned kMaxBits = 63;

inline constexpr bool bit_at(Bits x, unsigned i) { return ((x >> i) & 1U) != 0; }

inline constexpr Bits low_mask(unsigned n) {
  return n >= 64 ? ~Bits{0} : ((Bits{1} << n) - 1);
}

inline int popcount(Bits x) { return std::popcount(x); }

/// Packs the bits of `x` at positions `qubits` into a local index; qubits[j] lands on bit j.
inline std::size_t gather_bits(Bits x, std::span<const unsigned> qubits) {
  std::size_t local = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    local |= static_cast<std::size_t>((x >> qubits[j]) & 1U) << j;
  }
  return local;
}

/// Text form: character i is q_i, so "0111" has q_0 = 0.
inline std::string to_bitstring(Bits x, unsigned n) {
  std::string s(n, '0');
  for (unsigned i = 0; i < n; ++i) {
    if (bit_at(x, i)) s[i] = '1';
  }
  return s;
}

inline Bits parse_bitstring(std::string_view s) {
  if (s.size() > kMaxBits) throw InputError("bitstring longer than 63 bits");
  Bits x = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      x |= Bits{1} << i;
    } else if (s[i] != '0') {
      throw InputError("bitstring contains a character other than 0/1: '" + std::string(s) + "'");
    }
  }
  return x;
}

}  // namespace qanneal
