#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qrm {

// One machine word. Registers, memory cells and classical variables all
// use this; arithmetic wraps mod 2^kWordBits.
using Word = std::uint32_t;
inline constexpr int kWordBits = 32;

inline std::int32_t as_signed(Word w) { return static_cast<std::int32_t>(w); }

// The arithmetic operator table. Index order is the `para` value used by
// ari/arib, so do not reorder.
enum class Op : std::uint8_t {
  Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Min, Max, Neg, Not,
};
inline constexpr int kNumOps = 13;

bool op_is_unary(Op op);
std::string_view op_symbol(Op op);    // "+", "-", "*", "/", "mod", "=", ...
std::string_view op_mnemonic(Op op);  // add, sub, ... used in listings
std::optional<Op> op_from_mnemonic(std::string_view s);

// Total on all inputs: division and mod by zero give 0, comparisons and
// division are signed.
Word apply_op(Op op, Word a, Word b = 0);

}  // namespace qrm
