#include "qrm/word.h"

#include <algorithm>
#include <array>
#include <limits>

namespace qrm {
namespace {

constexpr std::array<std::string_view, kNumOps> kSymbols = {
    "+", "-", "*", "/", "mod", "=", "!=", "<", "<=", "min", "max", "neg", "not"};
constexpr std::array<std::string_view, kNumOps> kMnemonics = {
    "add", "sub", "mul", "div", "mod", "eq", "ne", "lt", "le", "min", "max", "neg", "not"};

}  // namespace

bool op_is_unary(Op op) { return op == Op::Neg || op == Op::Not; }

std::string_view op_symbol(Op op) { return kSymbols[static_cast<int>(op)]; }
std::string_view op_mnemonic(Op op) { return kMnemonics[static_cast<int>(op)]; }

std::optional<Op> op_from_mnemonic(std::string_view s) {
  for (int i = 0; i < kNumOps; ++i)
    if (kMnemonics[i] == s) return static_cast<Op>(i);
  return std::nullopt;
}

Word apply_op(Op op, Word a, Word b) {
  const std::int32_t sa = as_signed(a), sb = as_signed(b);
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (sb == 0) return 0;
      if (sa == std::numeric_limits<std::int32_t>::min() && sb == -1) return a;
      return static_cast<Word>(sa / sb);
    case Op::Mod:
      if (sb == 0) return 0;
      if (sb == -1) return 0;
      return static_cast<Word>(sa % sb);
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return sa < sb;
    case Op::Le: return sa <= sb;
    case Op::Min: return static_cast<Word>(std::min(sa, sb));
    case Op::Max: return static_cast<Word>(std::max(sa, sb));
    case Op::Neg: return Word{0} - a;
    case Op::Not: return a == 0;
  }
  return 0;
}

}  // namespace qrm
