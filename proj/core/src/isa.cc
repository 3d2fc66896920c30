#include "qrm/isa.h"

#include <array>

namespace qrm {
namespace {

constexpr std::array<std::string_view, kNumRegs> kRegNames = {
    "pc", "ins", "br", "ro", "sp", "qifv", "qifw", "wait",
    "r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8"};

constexpr std::array<std::string_view, kNumOpcodes + 1> kMnemonics = {
    "?",    "ld",  "ldr",  "fetr", "uni", "unib", "xori", "xor", "addi", "add", "subi", "sub",
    "neg",  "swap", "ari", "arib", "bra", "bez",  "bnz",  "swbr", "qif", "fiq", "start", "finish"};

constexpr Word kRegMask = 0x1f;

}  // namespace

std::string_view reg_name(int r) { return r >= 0 && r < kNumRegs ? kRegNames[r] : "?"; }

std::optional<int> reg_from_name(std::string_view s) {
  for (int i = 0; i < kNumRegs; ++i)
    if (kRegNames[i] == s) return i;
  return std::nullopt;
}

Format format_of(Opcode op) {
  switch (op) {
    case Opcode::Ld: case Opcode::Xori: case Opcode::Addi: case Opcode::Subi:
    case Opcode::Bra: case Opcode::Bez: case Opcode::Bnz:
      return Format::I;
    case Opcode::Uni: case Opcode::Unib: case Opcode::Ari: case Opcode::Arib:
      return Format::O;
    default: return Format::R;
  }
}

std::string_view mnemonic(Opcode op) { return kMnemonics[static_cast<int>(op)]; }

std::optional<Opcode> opcode_from(std::string_view s) {
  for (int i = 1; i <= kNumOpcodes; ++i)
    if (kMnemonics[i] == s) return static_cast<Opcode>(i);
  return std::nullopt;
}

Opcode opcode_of(Word w) {
  Word c = w >> 26;
  return c >= 1 && c <= kNumOpcodes ? static_cast<Opcode>(c) : Opcode::Invalid;
}

Word encode(const Instr& i) {
  if (i.op == Opcode::Invalid) throw EncodeError("cannot encode the invalid opcode");
  auto reg = [&](int r) {
    if (r < 0 || r >= kNumRegs) throw EncodeError("register out of range");
    return static_cast<Word>(r);
  };
  Word w = static_cast<Word>(i.op) << 26;
  switch (format_of(i.op)) {
    case Format::I:
      if (i.imm < kImmMin || i.imm > kImmMax)
        throw EncodeError("immediate " + std::to_string(i.imm) + " does not fit 21 bits");
      return w | reg(i.r1) << 21 | (static_cast<Word>(i.imm) & 0x1fffff);
    case Format::R: return w | reg(i.r1) << 21 | reg(i.r2) << 16;
    case Format::O:
      if (i.para < 0 || i.para >= 64) throw EncodeError("para out of range");
      return w | static_cast<Word>(i.para) << 20 | reg(i.r1) << 15 | reg(i.r2) << 10 | reg(i.r3) << 5;
  }
  return w;
}

Instr decode(Word w) {
  Instr i;
  i.op = opcode_of(w);
  if (i.op == Opcode::Invalid) throw DecodeError("invalid opcode in word " + std::to_string(w));
  switch (format_of(i.op)) {
    case Format::I: {
      i.r1 = (w >> 21) & kRegMask;
      std::int32_t v = static_cast<std::int32_t>(w & 0x1fffff);
      if (v & 0x100000) v -= 0x200000;
      i.imm = v;
      break;
    }
    case Format::R:
      i.r1 = (w >> 21) & kRegMask;
      i.r2 = (w >> 16) & kRegMask;
      break;
    case Format::O:
      i.para = (w >> 20) & 0x3f;
      i.r1 = (w >> 15) & kRegMask;
      i.r2 = (w >> 10) & kRegMask;
      i.r3 = (w >> 5) & kRegMask;
      break;
  }
  if (i.r1 >= kNumRegs || i.r2 >= kNumRegs || i.r3 >= kNumRegs)
    throw DecodeError("register field out of range in word " + std::to_string(w));
  return i;
}

std::optional<Instr> inverse(const Instr& i) {
  Instr j = i;
  switch (i.op) {
    case Opcode::Addi: j.op = Opcode::Subi; return j;
    case Opcode::Subi: j.op = Opcode::Addi; return j;
    case Opcode::Add: j.op = Opcode::Sub; return j;
    case Opcode::Sub: j.op = Opcode::Add; return j;
    case Opcode::Bra:
    case Opcode::Bez:
    case Opcode::Bnz: j.imm = -i.imm; return j;
    case Opcode::Uni:
    case Opcode::Unib:
    case Opcode::Qif:
    case Opcode::Fiq:
    case Opcode::Invalid: return std::nullopt;
    default: return j;  // swaps, xors and neg undo themselves
  }
}

std::string to_string(const Instr& i, const GateTable* gates) {
  std::string s(mnemonic(i.op));
  auto r = [](int x) { return std::string(reg_name(x)); };
  auto gate = [&] {
    if (gates && i.para < gates->size()) return (*gates)[i.para].key();
    return std::to_string(i.para);
  };
  switch (i.op) {
    case Opcode::Bra: return s + " " + std::to_string(i.imm);
    case Opcode::Ld: case Opcode::Xori: case Opcode::Addi: case Opcode::Subi:
    case Opcode::Bez: case Opcode::Bnz:
      return s + " " + r(i.r1) + ", " + std::to_string(i.imm);
    case Opcode::Neg: case Opcode::Swbr: case Opcode::Qif: case Opcode::Fiq:
      return s + " " + r(i.r1);
    case Opcode::Start: case Opcode::Finish: return s;
    case Opcode::Uni: return s + " " + gate() + ", " + r(i.r1);
    case Opcode::Unib: return s + " " + gate() + ", " + r(i.r1) + ", " + r(i.r2);
    case Opcode::Ari:
      return s + " " + std::string(op_mnemonic(static_cast<Op>(i.para % kNumOps))) + ", " + r(i.r1) +
             ", " + r(i.r2);
    case Opcode::Arib:
      return s + " " + std::string(op_mnemonic(static_cast<Op>(i.para % kNumOps))) + ", " + r(i.r1) +
             ", " + r(i.r2) + ", " + r(i.r3);
    default: return s + " " + r(i.r1) + ", " + r(i.r2);
  }
}

namespace detail {
void fault(const Instr& i, const char* why) {
  throw MachineFault(std::string(why) + " in `" + to_string(i) + "`");
}
}  // namespace detail

}  // namespace qrm
