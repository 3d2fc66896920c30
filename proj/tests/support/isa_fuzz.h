#pragma once

#include <map>
#include <random>

#include "qrm/isa.h"

namespace qrm::testing {

struct MapMem {
  std::map<Word, Word> m;
  Word get(Word a) const {
    auto it = m.find(a);
    return it == m.end() ? 0 : it->second;
  }
  void set(Word a, Word v) {
    if (v)
      m[a] = v;
    else
      m.erase(a);
  }
  bool operator==(const MapMem&) const = default;
};

inline int writable_reg(std::mt19937_64& g) {
  static const int regs[] = {Ro, Sp, R1, R2, R3, R4, R5, R6, R7, R8};
  return regs[g() % 10];
}

// Random instruction that executes without a fault.
inline Instr random_valid(std::mt19937_64& g) {
  Instr i;
  for (;;) {
    i = {};
    i.op = static_cast<Opcode>(1 + g() % kNumOpcodes);
    i.r1 = writable_reg(g);
    do i.r2 = writable_reg(g); while (i.r2 == i.r1);
    do i.r3 = writable_reg(g); while (i.r3 == i.r1);
    i.imm = static_cast<std::int32_t>(g() % 2001) - 1000;
    switch (i.op) {
      case Opcode::Ari: i.para = g() % 2 ? static_cast<int>(Op::Neg) : static_cast<int>(Op::Not); break;
      case Opcode::Arib: i.para = static_cast<int>(g() % static_cast<int>(Op::Neg)); break;
      case Opcode::Ld: i.imm = static_cast<std::int32_t>(g() % 8); break;
      case Opcode::Bez: case Opcode::Bnz: i.r1 = static_cast<int>(g() % kNumRegs); if (i.r1 == Br) continue; break;
      default: break;
    }
    if (format_of(i.op) == Format::R) i.r3 = 0;
    if (i.op == Opcode::Ari) i.r3 = 0;
    return i;
  }
}

// r1..r8 random with some small values that double as addresses, memory
// words 0..7 random.
inline void random_config(std::mt19937_64& g, Regs& r, MapMem& m) {
  for (auto& v : r) v = static_cast<Word>(g() % 16 == 0 ? 0 : g());
  r[Sp] = static_cast<Word>(g() % 8);
  for (int q = R1; q < kNumRegs; ++q)
    if (g() % 3 == 0) r[q] = static_cast<Word>(g() % 8);
  for (Word a = 0; a < 8; ++a) m.set(a, static_cast<Word>(g()));
}

}  // namespace qrm::testing
