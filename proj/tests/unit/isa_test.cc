#include <map>
#include <random>

#include "doctest.h"
#include "isa_fuzz.h"
#include "qrm/isa.h"

using namespace qrm;
using namespace qrm::testing;

namespace {

Instr random_encodable(std::mt19937_64& g) {
  Instr i;
  i.op = static_cast<Opcode>(1 + g() % kNumOpcodes);
  switch (format_of(i.op)) {
    case Format::I:
      i.r1 = g() % kNumRegs;
      i.imm = static_cast<std::int32_t>(g() % (1u << kImmBits)) + kImmMin;
      break;
    case Format::R:
      i.r1 = g() % kNumRegs;
      i.r2 = g() % kNumRegs;
      break;
    case Format::O:
      i.para = g() % 64;
      i.r1 = g() % kNumRegs;
      i.r2 = g() % kNumRegs;
      i.r3 = g() % kNumRegs;
      break;
  }
  return i;
}

}  // namespace

TEST_CASE("encode/decode roundtrip") {
  std::mt19937_64 g(11);
  for (int k = 0; k < 100000; ++k) {
    Instr i = random_encodable(g);
    REQUIRE(decode(encode(i)) == i);
  }
  CHECK_THROWS_AS(decode(0), DecodeError);
}

TEST_CASE("immediates outside 21 bits are rejected") {
  Instr i{Opcode::Addi, R1, 0, 0, kImmMax};
  CHECK(decode(encode(i)).imm == kImmMax);
  i.imm = 1 << 20;
  CHECK_THROWS_AS(encode(i), EncodeError);
  i.imm = kImmMin - 1;
  CHECK_THROWS_AS(encode(i), EncodeError);
  i.imm = 1 << 21;
  CHECK_THROWS_AS(encode(i), EncodeError);
}

TEST_CASE("every instruction with an inverse is undone by it") {
  std::mt19937_64 g(12);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    Instr i = random_valid(g);
    auto inv = inverse(i);
    if (!inv) {
      CHECK((i.op == Opcode::Uni || i.op == Opcode::Unib || i.op == Opcode::Qif || i.op == Opcode::Fiq));
      continue;
    }
    Regs r{};
    MapMem m;
    random_config(g, r, m);
    const Regs r0 = r;
    const MapMem m0 = m;
    execute(i, r, m);
    execute(*inv, r, m);
    REQUIRE_MESSAGE(r == r0, to_string(i));
    REQUIRE_MESSAGE(m == m0, to_string(i));
    ++checked;
  }
  CHECK(checked > 8000);
}

TEST_CASE("execute guards the system registers") {
  Regs r{};
  MapMem m;
  CHECK_THROWS_AS(execute(Instr{Opcode::Xori, Pc, 0, 0, 3}, r, m), MachineFault);
  CHECK_THROWS_AS(execute(Instr{Opcode::Xor, R1, R1}, r, m), MachineFault);
  CHECK_THROWS_AS(execute(Instr{Opcode::Arib, R1, R2, R1, 0, 0}, r, m), MachineFault);
  r[R2] = 4;
  execute(Instr{Opcode::Bnz, R2, 0, 0, 7}, r, m);
  CHECK(r[Br] == 7);
  branch_stage(r);
  CHECK(r[Pc] == 7);
}
