#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/gates.h"
#include "qrm/isa.h"
#include "qrm/word.h"

namespace qrm {

struct Section {
  Word base = 0;
  Word size = 0;
  Word end() const { return base + size; }
  bool contains(Word a) const { return a >= base && a < end(); }
};

enum class SymbolKind { Classical, Quantum, Entry };

struct SymbolInfo {
  std::string name;
  SymbolKind kind = SymbolKind::Classical;
  Word slot = 0;     // @x: address of the symbol-table word
  Word address = 0;  // &x, 0 until allocated (entry arrays are placed at build)
  Word extent = 0;   // words reserved at &x
  bool array = false;  // used with subscripts
};

struct ImageConfig {
  Word n_qram = 1u << 16;
  Word var_words = 4096;
  Word qif_words = 8192;
  Word min_stack = 1024;
};

struct ImageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// QRAM contents plus the metadata needed to run and inspect it. Sections in
// address order: program, symbol table, variables, qif table, stack.
struct Image {
  Word n_qram = 0;
  Section program, symtab, vars, qif, stack;
  GateTable gates;
  std::vector<SymbolInfo> symbols;
  std::vector<std::string> inputs;  // formals of the main procedure
  std::vector<Word> words;          // n_qram words

  Regs initial_regs() const;  // pc at 0, sp at the stack base, qifv at the qif base
  const SymbolInfo* symbol(const std::string& name) const;
  SymbolInfo* symbol(const std::string& name);
  Word finish_address() const;  // address of the finish instruction
  Instr instr(Word addr) const { return decode(words.at(addr)); }
};

void write_image(std::ostream& os, const Image& img);
Image read_image(std::istream& is);
void save_image(const std::string& path, const Image& img);
Image load_image(const std::string& path);

}  // namespace qrm
