#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qrm/gates.h"
#include "qrm/word.h"

namespace qrm {

// Opcode 0 is left unused so an all-zero word never decodes.
enum class Opcode : std::uint8_t {
  Invalid = 0,
  Ld, Ldr, Fetr, Uni, Unib, Xori, Xor, Addi, Add, Subi, Sub, Neg, Swap,
  Ari, Arib, Bra, Bez, Bnz, Swbr, Qif, Fiq, Start, Finish,
};
inline constexpr int kNumOpcodes = 23;

enum class Format { I, R, O };

// Register file. System registers first, then the free registers r1..r8.
enum Reg : int { Pc = 0, Ins, Br, Ro, Sp, Qifv, Qifw, Wait, R1, R2, R3, R4, R5, R6, R7, R8 };
inline constexpr int kNumRegs = 16;
inline constexpr int kFirstFree = R1;

std::string_view reg_name(int r);
std::optional<int> reg_from_name(std::string_view s);

Format format_of(Opcode op);
std::string_view mnemonic(Opcode op);
std::optional<Opcode> opcode_from(std::string_view s);

struct Instr {
  Opcode op = Opcode::Invalid;
  int r1 = 0, r2 = 0, r3 = 0;
  std::int32_t imm = 0;  // I format
  int para = 0;          // O format: gate index or Op index

  bool operator==(const Instr&) const = default;
};

inline constexpr int kImmBits = 21;
inline constexpr std::int32_t kImmMin = -(1 << (kImmBits - 1));
inline constexpr std::int32_t kImmMax = (1 << (kImmBits - 1)) - 1;

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Word encode(const Instr& i);
Instr decode(Word w);
Opcode opcode_of(Word w);  // Invalid for unknown opcodes

// The instruction undoing i; none for uni/unib/qif/fiq.
std::optional<Instr> inverse(const Instr& i);

// Listing text, e.g. "addi sp, 1" or "uni H, r4". Without a gate table the
// gate para prints as a number.
std::string to_string(const Instr& i, const GateTable* gates = nullptr);

// ---- classical effect ----------------------------------------------------

enum class Effect { Done, Gate, Qif, Fiq, Finish };

struct MachineFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Regs = std::array<Word, kNumRegs>;

// Applies the classical part of one instruction. Mem needs get(addr) and
// set(addr, value); it reports bad addresses by throwing. Gate, qif and fiq
// are left to the caller. Registers other than ro, sp and r1..r8 may only be
// changed by branches and swbr (br), so a program cannot corrupt pc.
template <class Mem>
Effect execute(const Instr& i, Regs& r, Mem& m);

// pc += br, or pc += 1 when br is 0.
inline void branch_stage(Regs& r) { r[Pc] += r[Br] ? r[Br] : 1; }

// ---- implementation ------------------------------------------------------

namespace detail {
[[noreturn]] void fault(const Instr& i, const char* why);
inline bool writable(int r) { return r == Ro || r == Sp || (r >= R1 && r < kNumRegs); }
}  // namespace detail

template <class Mem>
Effect execute(const Instr& i, Regs& r, Mem& m) {
  auto need = [&](bool ok, const char* why) {
    if (!ok) detail::fault(i, why);
  };
  auto w1 = [&] { need(detail::writable(i.r1), "register is not writable"); };
  auto distinct = [&](int a, int b) { need(a != b, "aliased registers"); };
  const Word imm = static_cast<Word>(i.imm);
  switch (i.op) {
    case Opcode::Ld: {
      w1();
      Word v = m.get(imm);
      m.set(imm, r[i.r1]);
      r[i.r1] = v;
      return Effect::Done;
    }
    case Opcode::Ldr: {
      w1();
      distinct(i.r1, i.r2);
      Word a = r[i.r2], v = m.get(a);
      m.set(a, r[i.r1]);
      r[i.r1] = v;
      return Effect::Done;
    }
    case Opcode::Fetr:
      w1();
      distinct(i.r1, i.r2);
      r[i.r1] ^= m.get(r[i.r2]);
      return Effect::Done;
    case Opcode::Xori: w1(); r[i.r1] ^= imm; return Effect::Done;
    case Opcode::Addi: w1(); r[i.r1] += imm; return Effect::Done;
    case Opcode::Subi: w1(); r[i.r1] -= imm; return Effect::Done;
    case Opcode::Xor: w1(); distinct(i.r1, i.r2); r[i.r1] ^= r[i.r2]; return Effect::Done;
    case Opcode::Add: w1(); distinct(i.r1, i.r2); r[i.r1] += r[i.r2]; return Effect::Done;
    case Opcode::Sub: w1(); distinct(i.r1, i.r2); r[i.r1] -= r[i.r2]; return Effect::Done;
    case Opcode::Neg: w1(); r[i.r1] = Word{0} - r[i.r1]; return Effect::Done;
    case Opcode::Swap:
      w1();
      need(detail::writable(i.r2), "register is not writable");
      std::swap(r[i.r1], r[i.r2]);
      return Effect::Done;
    case Opcode::Ari: {
      w1();
      distinct(i.r1, i.r2);
      need(i.para < kNumOps && op_is_unary(static_cast<Op>(i.para)), "ari needs a unary operator");
      r[i.r1] ^= apply_op(static_cast<Op>(i.para), r[i.r2]);
      return Effect::Done;
    }
    case Opcode::Arib: {
      w1();
      distinct(i.r1, i.r2);
      distinct(i.r1, i.r3);
      need(i.para < kNumOps && !op_is_unary(static_cast<Op>(i.para)), "arib needs a binary operator");
      r[i.r1] ^= apply_op(static_cast<Op>(i.para), r[i.r2], r[i.r3]);
      return Effect::Done;
    }
    case Opcode::Bra: r[Br] += imm; return Effect::Done;
    case Opcode::Bez:
      if (r[i.r1] == 0) r[Br] += imm;
      return Effect::Done;
    case Opcode::Bnz:
      if (r[i.r1] != 0) r[Br] += imm;
      return Effect::Done;
    case Opcode::Swbr: w1(); std::swap(r[Br], r[i.r1]); return Effect::Done;
    case Opcode::Uni:
    case Opcode::Unib: return Effect::Gate;
    case Opcode::Qif: return Effect::Qif;
    case Opcode::Fiq: return Effect::Fiq;
    case Opcode::Start: return Effect::Done;
    case Opcode::Finish: return Effect::Finish;
    case Opcode::Invalid: break;
  }
  detail::fault(i, "invalid opcode");
}

}  // namespace qrm
