#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/ast.h"
#include "qrm/gates.h"
#include "qrm/word.h"

namespace qrm {

// Operands of mid-level instructions. Var and Elem name program variables
// (Elem subscripts are always a plain variable), Entry is a procedure entry
// word (P.ent or Q.ent[y]).
struct MidOperand {
  enum class Kind { Var, Elem, Reg, Imm, Label, Entry };
  Kind kind = Kind::Var;
  std::string name;   // variable, label or entry symbol
  std::string index;  // Elem / Entry subscript variable, "" for none
  int reg = 0;
  Word imm = 0;

  static MidOperand var(std::string n) { return {Kind::Var, std::move(n), "", 0, 0}; }
  static MidOperand elem(std::string n, std::string i) {
    return {Kind::Elem, std::move(n), std::move(i), 0, 0};
  }
  static MidOperand reg_(int r) { return {Kind::Reg, "", "", r, 0}; }
  static MidOperand imm_(Word v) { return {Kind::Imm, "", "", 0, v}; }
  static MidOperand label(std::string l) { return {Kind::Label, std::move(l), "", 0, 0}; }
  static MidOperand entry(std::string sym, std::string i) {
    return {Kind::Entry, std::move(sym), std::move(i), 0, 0};
  }

  bool operator==(const MidOperand&) const = default;
  std::string str() const;
};

enum class MidOp {
  Xori, Xor, Addi, Subi, Neg, Swap, Ari, Arib, Uni, Unib,
  Bra, Bez, Bnz, Brc, Swbr, Qif, Fiq, Push, Pop, Start, Finish,
};

std::string_view mid_mnemonic(MidOp op);

struct MidInstr {
  MidOp op = MidOp::Start;
  std::vector<MidOperand> args;
  int para = 0;         // gate index (uni/unib) or Op (ari/arib)
  bool brc_nz = false;  // brc fires on nonzero instead of zero
  std::string label;    // defined at this instruction
  bool uncp = false;    // emitted by an uncomputation region

  std::string str(const GateTable& g) const;
};

struct MidBlock {
  std::string name;  // "main" or the declaration label
  std::vector<MidInstr> code;
};

// Word array holding the entry addresses of a procedure (one word) or a
// family (one word per member, "" for missing members).
struct EntryArray {
  std::string symbol;  // P.ent
  std::vector<std::string> labels;
};

struct MidProgram {
  std::vector<MidBlock> blocks;  // main first
  GateTable gates;
  std::vector<EntryArray> entries;
  std::set<std::string> quantum;    // names used as gate operands or coins
  std::vector<std::string> inputs;  // formals of the main procedure
};

struct TranslateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Installs the values on top of the stack as the formals and leaves the
// old formal values there instead:
//   pop __pk..__p1; swap __pi, u_i; push __p1..__pk
// Running it twice is the identity.
std::vector<MidInstr> init_code(const std::vector<std::string>& formals);

// Expects the simplified syntax produced by transform().
MidProgram translate(const Program& p);

std::string listing(const MidProgram& m);

// Syntactic checks: labels unique and defined, every bez/bnz has one brc
// partner on the same operand, qif/fiq nest with identical coins.
void check_pairing(const MidProgram& m);

std::string entry_symbol(const std::string& proc);  // "P.ent"
std::string entry_label(const Decl& d);             // "ent.P", "ent.Q.3"

}  // namespace qrm
