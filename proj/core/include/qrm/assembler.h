#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrm/image.h"
#include "qrm/isa.h"
#include "qrm/mid.h"

namespace qrm {

// One machine instruction before layout. At most one of target/abs_label/sym
// supplies the immediate.
struct LowLine {
  Instr ins;
  std::string label;      // defined here
  std::string target;     // branch: imm = address(target) - address(this)
  std::string abs_label;  // &label: imm = address(label)
  std::string sym;        // @name: imm = symbol-table slot of name

  std::string str(const GateTable& g) const;
};

struct LowProgram {
  std::vector<LowLine> code;
  GateTable gates;
  std::vector<EntryArray> entries;
  std::set<std::string> quantum;
  std::set<std::string> arrays;  // symbols used with a subscript
  std::vector<std::string> inputs;
};

struct AsmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mid-to-low translation. Operands are loaded into free registers before
// the core instruction and unloaded after it in reverse; free registers are
// 0 again after every mid instruction.
LowProgram lower(const MidProgram& m);

// Textual form; parse_asm reads it back, and also accepts handwritten code.
//   .entry P.ent ent.P        entry array (- for a missing family member)
//   .quantum q, p             symbols holding qubits
//   .array q                  symbols used with a subscript
//   .input n                  formals of the main procedure
//   L: bez r2, F              label definitions and branch targets
//   ld r1, @x                 symbol-table slot, subi r2, &L absolute address
// `;` starts a comment.
std::string listing(const LowProgram& p);
LowProgram parse_asm(std::string_view text);

// Resolves labels and symbols and lays out the QRAM image.
Image assemble(const LowProgram& p, const ImageConfig& cfg = {});

}  // namespace qrm
