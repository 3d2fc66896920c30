#include <cmath>
#include <set>

#include "doctest.h"
#include "driver.h"
#include "isa_fuzz.h"
#include "qrm/assembler.h"
#include "qrm/corpus.h"
#include "qrm/frontend.h"
#include "qrm/pipeline.h"

using namespace qrm;

namespace {

struct Loaded {
  Image img;
  EvalResult ev;
};

Loaded prepare(const Image& img, const std::map<std::string, Word>& in = {}) {
  Loaded l{img, evaluate(img, in)};
  apply(l.img, l.ev);
  return l;
}

Loaded from_asm(const std::string& text) { return prepare(assemble(parse_asm(text))); }

Eigen::VectorXcd plus(int nq, int which) {
  // qubit `which` in |+>, the rest |0>
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << nq);
  v[0] = v[1 << (nq - 1 - which)] = 1 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("register arithmetic wraps at the word size") {
  Regs r{};
  testing::MapMem m;
  r[R1] = 3;
  r[R2] = 5;
  execute(Instr{Opcode::Add, R1, R2}, r, m);
  CHECK(r[R1] == 8);
  CHECK(r[R2] == 5);
  r[R1] = 0xffffffffu;
  execute(Instr{Opcode::Addi, R1, 0, 0, 2}, r, m);
  CHECK(r[R1] == 1);
  r[R1] = 7;
  r[Br] = 0;
  execute(Instr{Opcode::Swbr, R1}, r, m);
  CHECK(r[Br] == 7);
  CHECK(r[R1] == 0);
  Regs before = r;
  CHECK(execute(Instr{Opcode::Finish}, r, m) == Effect::Finish);
  CHECK(r == before);
}

TEST_CASE("conditional branches act only on their condition") {
  Regs r{};
  testing::MapMem m;
  r[R1] = 0;
  execute(Instr{Opcode::Bez, R1, 0, 0, 5}, r, m);
  CHECK(r[Br] == 5);
  r[Br] = 0;
  r[R1] = 7;
  execute(Instr{Opcode::Bez, R1, 0, 0, 5}, r, m);
  CHECK(r[Br] == 0);
  branch_stage(r);
  CHECK(r[Pc] == 1);
  r[Br] = 5;
  branch_stage(r);
  CHECK(r[Pc] == 6);
  CHECK(r[Br] == 5);
}

TEST_CASE("hadamard on a loaded qubit splits the branch") {
  auto l = from_asm(R"(.quantum q
        start
        ld r1, @q
        ldr r2, r1
        uni H, r2
        ldr r2, r1
        ld r1, @q
        finish
)");
  Machine m(l.img);
  m.load(l.ev.qvars);
  m.run(3);
  CHECK(m.branches().size() == 1);
  m.run(1);
  REQUIRE(m.branches().size() == 2);
  std::set<Word> vals;
  for (const auto& b : m.branches()) {
    CHECK(std::abs(b.amp - 1 / std::sqrt(2.0)) < 1e-12);
    vals.insert(b.config.regs[R2]);
  }
  CHECK(vals == std::set<Word>{0, 1});
  m.run(l.ev.t_exe - 4);
  CHECK(m.finished());
  auto ex = extract_qvar_state(m, l.ev.qvars);
  REQUIRE(ex.disentangled);
  CHECK(std::abs(ex.psi[1] - 1 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("superposed address reads a different word in each branch") {
  auto l = from_asm(R"(.quantum c
        start
        ld r1, @c
        ldr r2, r1
        xori r3, 3
        add r3, r2
        add r3, r2
        fetr r4, r3
        fetr r4, r3
        sub r3, r2
        sub r3, r2
        xori r3, 3
        ldr r2, r1
        ld r1, @c
        finish
)");
  Machine m(l.img);
  m.load(l.ev.qvars, plus(1, 0));
  m.run(7);
  REQUIRE(m.branches().size() == 2);
  for (const auto& b : m.branches()) {
    const Word c = b.config.regs[R2];
    CHECK(b.config.regs[R3] == 3 + 2 * c);
    CHECK(b.config.regs[R4] == l.img.words[3 + 2 * c]);
  }
  m.run(l.ev.t_exe - 7);
  CHECK(m.finished());
  CHECK(extract_qvar_state(m, l.ev.qvars).disentangled);
}

TEST_CASE("short branch waits at fiq while the counter runs down") {
  auto l = prepare(assemble(parse_asm(driver::read_file(std::string(QRM_CORPUS_DIR) + "/sync.qasm"))));
  Word fiq = 0;
  for (Word a = 0; a < l.img.program.end(); ++a)
    if (l.img.instr(a).op == Opcode::Fiq) fiq = a;
  const Word short_node = l.img.qif.base + (l.ev.table.at(1).link[Fc0] - 1) * kNodeWords;
  Machine m(l.img);
  m.load(l.ev.qvars, plus(2, 0));
  std::vector<Word> waits;
  for (std::uint64_t c = 0; c < l.ev.t_exe; ++c) {
    m.cycle();
    for (const auto& b : m.branches()) {
      CHECK(b.config.regs[Ins] == 0);
      if (b.config.regs[Pc] == fiq && b.config.regs[Qifv] == short_node) waits.push_back(b.config.regs[Qifw]);
    }
    CHECK(std::abs(m.norm() - 1) < 1e-12);
  }
  CHECK(waits == std::vector<Word>{5, 4, 3, 2, 1, 0});
  CHECK(m.branches().size() == 2);  // |00> and |11>
  CHECK(m.finished());
}

TEST_CASE("empty main leaves everything but pc alone") {
  auto c = compile("proc Pmain() <= skip\n");
  auto l = prepare(c.image);
  CHECK(l.ev.table.size() == 1);
  Machine m(l.img);
  m.load(l.ev.qvars);
  const Regs r0 = l.img.initial_regs();
  m.run(l.ev.t_exe);
  REQUIRE(m.branches().size() == 1);
  const Config& cf = m.branches()[0].config;
  CHECK(cf.delta.empty());
  for (int k = 0; k < kNumRegs; ++k)
    if (k != Pc) CHECK(cf.regs[k] == r0[k]);
  CHECK(cf.regs[Pc] == l.img.finish_address() + 1);
}

TEST_CASE("classical-only program extracts the trivial state") {
  auto c = compile("proc Pmain(n) <= x := n + 1; y := x * 2\n");
  auto ex = execute(c.image, {{"n", 3}});
  CHECK(ex.eval.qvars.empty());
  REQUIRE(ex.result.disentangled);
  REQUIRE(ex.result.psi.size() == 1);
  CHECK(std::abs(ex.result.psi[0] - Complex(1)) < 1e-12);
}

TEST_CASE("dropped uncomputation leaves classical garbage") {
  MidProgram mid = translate(transform(parse(corpus::mcg_source("X"))).program);
  bool removed = false;
  for (auto& b : mid.blocks) {
    if (b.name != "P") continue;
    for (auto it = b.code.rbegin(); it != b.code.rend() && !removed; ++it)
      if (it->uncp && it->op == MidOp::Arib && it->label.empty()) {
        b.code.erase(std::next(it).base());
        removed = true;
      }
  }
  REQUIRE(removed);
  Image img = assemble(lower(mid));
  auto ev = evaluate(img, {{"n", 3}});
  CHECK_FALSE(ev.diagnostics.empty());
  Image loaded = img;
  apply(loaded, ev);
  Machine m(loaded);
  m.load(ev.qvars, Eigen::VectorXcd::Constant(8, 1 / std::sqrt(8.0)));
  m.run(ev.t_exe);
  auto ex = extract_qvar_state(m, ev.qvars);
  CHECK_FALSE(ex.disentangled);
  CHECK(ex.reason.find("word") != std::string::npos);
}
