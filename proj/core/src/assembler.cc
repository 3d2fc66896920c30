#include "qrm/assembler.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace qrm {
namespace {

using K = MidOperand::Kind;

LowLine line(Opcode op, int r1 = 0, int r2 = 0, int r3 = 0) {
  LowLine l;
  l.ins.op = op;
  l.ins.r1 = r1;
  l.ins.r2 = r2;
  l.ins.r3 = r3;
  return l;
}

std::int32_t small_imm(Word c) {
  std::int32_t v = as_signed(c);
  if (v < kImmMin || v > kImmMax)
    throw AsmError("constant " + std::to_string(c) + " does not fit an immediate");
  return v;
}

class Lowerer {
 public:
  explicit Lowerer(const MidProgram& m) : m_(m) {}

  LowProgram run() {
    out_.gates = m_.gates;
    out_.entries = m_.entries;
    out_.quantum = m_.quantum;
    out_.inputs = m_.inputs;
    for (const auto& b : m_.blocks)
      for (const auto& i : b.code) {
        for (const auto& a : i.args)
          if (!a.index.empty()) out_.arrays.insert(a.name);
        instr(i);
      }
    return std::move(out_);
  }

 private:
  const MidProgram& m_;
  LowProgram out_;
  int returns_ = 0;

  // per mid instruction
  unsigned used_ = 0;
  std::vector<LowLine> pro_;
  std::map<std::string, std::pair<int, int>> scalar_;  // name -> (slot reg, value reg)
  std::map<std::string, int> base_;                    // shared array base registers
  std::map<std::string, int> elem_uses_;

  int alloc() {
    for (int r = 0; r < kNumRegs - kFirstFree; ++r)
      if (!(used_ & (1u << r))) {
        used_ |= 1u << r;
        return kFirstFree + r;
      }
    throw AsmError("free registers exhausted");
  }
  void release(int r) { used_ &= ~(1u << (r - kFirstFree)); }

  void ld(int r, const std::string& sym) {
    LowLine l = line(Opcode::Ld, r);
    l.sym = sym;
    pro_.push_back(l);
  }
  void op(Opcode o, int a, int b = 0) { pro_.push_back(line(o, a, b)); }

  int value(const std::string& v) {
    if (auto it = scalar_.find(v); it != scalar_.end()) return it->second.second;
    int rs = alloc(), rv = alloc();
    ld(rs, v);
    op(Opcode::Ldr, rv, rs);
    scalar_[v] = {rs, rv};
    return rv;
  }

  struct Sub {
    int rv = 0, rs = 0;
    bool transient = false;
  };
  Sub sub(const std::string& y) {
    if (auto it = scalar_.find(y); it != scalar_.end()) return {it->second.second, 0, false};
    Sub s;
    s.rs = alloc();
    s.rv = alloc();
    s.transient = true;
    ld(s.rs, y);
    op(Opcode::Ldr, s.rv, s.rs);
    return s;
  }
  void unsub(const Sub& s, const std::string& y) {
    if (!s.transient) return;
    op(Opcode::Ldr, s.rv, s.rs);
    ld(s.rs, y);
    release(s.rv);
    release(s.rs);
  }

  int base(const std::string& a) {
    if (auto it = base_.find(a); it != base_.end()) return it->second;
    int rb = alloc();
    ld(rb, a);
    return base_[a] = rb;
  }

  // a[y] swapped into a register until the epilogue
  int elem_value(const std::string& a, const std::string& y) {
    if (elem_uses_[a] < 2) {
      int ry = value(y);
      int ra = alloc();
      ld(ra, a);
      op(Opcode::Add, ra, ry);
      int rv = alloc();
      op(Opcode::Ldr, rv, ra);
      return rv;
    }
    int rb = base(a);
    Sub s = sub(y);
    int re = alloc();
    op(Opcode::Xor, re, rb);
    op(Opcode::Add, re, s.rv);
    unsub(s, y);
    int rv = alloc();
    op(Opcode::Ldr, rv, re);
    return rv;
  }

  // copy of a word; the variable stays in memory
  int read(const std::string& v, const std::string& y) {
    if (y.empty()) {
      if (auto it = scalar_.find(v); it != scalar_.end()) return it->second.second;
      int ra = alloc(), rv = alloc();
      ld(ra, v);
      op(Opcode::Fetr, rv, ra);
      ld(ra, v);
      release(ra);
      return rv;
    }
    Sub s = sub(y);
    int ra = alloc();
    auto it = base_.find(v);
    if (it != base_.end())
      op(Opcode::Xor, ra, it->second);
    else
      ld(ra, v);
    op(Opcode::Add, ra, s.rv);
    int rv = alloc();
    op(Opcode::Fetr, rv, ra);
    op(Opcode::Sub, ra, s.rv);
    if (it != base_.end())
      op(Opcode::Xor, ra, it->second);
    else
      ld(ra, v);
    release(ra);
    unsub(s, y);
    return rv;
  }

  int address(const MidOperand& o) {
    if (o.kind == K::Var) {
      int ra = alloc();
      ld(ra, o.name);
      return ra;
    }
    int ry = value(o.index);
    int ra = alloc();
    ld(ra, o.name);
    op(Opcode::Add, ra, ry);
    return ra;
  }

  int load(const MidOperand& o) {
    switch (o.kind) {
      case K::Var: return value(o.name);
      case K::Elem: return elem_value(o.name, o.index);
      case K::Reg: return o.reg;
      default: throw AsmError("operand " + o.str() + " cannot be loaded");
    }
  }

  int source(const MidOperand& o) {
    switch (o.kind) {
      case K::Var: return read(o.name, "");
      case K::Elem:
      case K::Entry: return read(o.name, o.index);
      case K::Imm: {
        int r = alloc();
        LowLine l = line(Opcode::Xori, r);
        l.ins.imm = small_imm(o.imm);
        pro_.push_back(l);
        return r;
      }
      case K::Reg: return o.reg;
      default: throw AsmError("operand " + o.str() + " cannot be read");
    }
  }

  LowLine branch(Opcode o, int r, const std::string& target) {
    LowLine l = line(o, r);
    l.target = target;
    return l;
  }

  void instr(const MidInstr& i) {
    used_ = 0;
    pro_.clear();
    scalar_.clear();
    base_.clear();
    elem_uses_.clear();
    for (const auto& a : i.args)
      if (a.kind == K::Elem) ++elem_uses_[a.name];

    std::vector<LowLine> core;
    const auto& a = i.args;
    switch (i.op) {
      case MidOp::Xori:
      case MidOp::Addi:
      case MidOp::Subi: {
        Opcode o = i.op == MidOp::Xori ? Opcode::Xori : i.op == MidOp::Addi ? Opcode::Addi : Opcode::Subi;
        LowLine l = line(o, load(a[0]));
        l.ins.imm = small_imm(a[1].imm);
        core.push_back(l);
        break;
      }
      case MidOp::Xor: {
        int d = load(a[0]);
        core.push_back(line(Opcode::Xor, d, source(a[1])));
        break;
      }
      case MidOp::Swap: {
        int x = load(a[0]);
        core.push_back(line(Opcode::Swap, x, load(a[1])));
        break;
      }
      case MidOp::Neg: core.push_back(line(Opcode::Neg, load(a[0]))); break;
      case MidOp::Swbr: core.push_back(line(Opcode::Swbr, load(a[0]))); break;
      case MidOp::Ari: {
        int d = load(a[0]);
        LowLine l = line(Opcode::Ari, d, source(a[1]));
        l.ins.para = i.para;
        core.push_back(l);
        break;
      }
      case MidOp::Arib: {
        int d = load(a[0]);
        int x = source(a[1]);
        LowLine l = line(Opcode::Arib, d, x, source(a[2]));
        l.ins.para = i.para;
        core.push_back(l);
        break;
      }
      case MidOp::Uni:
      case MidOp::Unib: {
        int q1 = load(a[0]);
        int q2 = i.op == MidOp::Unib ? load(a[1]) : 0;
        LowLine l = line(i.op == MidOp::Uni ? Opcode::Uni : Opcode::Unib, q1, q2);
        l.ins.para = i.para;
        core.push_back(l);
        break;
      }
      case MidOp::Bez:
      case MidOp::Bnz:
      case MidOp::Brc: {
        bool nz = i.op == MidOp::Bnz || (i.op == MidOp::Brc && i.brc_nz);
        core.push_back(branch(nz ? Opcode::Bnz : Opcode::Bez, load(a[0]), a[1].name));
        break;
      }
      case MidOp::Bra:
        if (a[0].kind == K::Label) {
          core.push_back(branch(Opcode::Bra, 0, a[0].name));
        } else {
          // call: subi e, &R; R: swbr e; neg e; addi e, &R
          int e = source(a[0]);
          std::string ret = "R" + std::to_string(returns_++);
          LowLine s = line(Opcode::Subi, e);
          s.abs_label = ret;
          LowLine w = line(Opcode::Swbr, e);
          w.label = ret;
          LowLine ad = line(Opcode::Addi, e);
          ad.abs_label = ret;
          core = {s, w, line(Opcode::Neg, e), ad};
        }
        break;
      case MidOp::Qif:
      case MidOp::Fiq:
        core.push_back(line(i.op == MidOp::Qif ? Opcode::Qif : Opcode::Fiq, address(a[0])));
        break;
      case MidOp::Push: {
        int v = load(a[0]);
        LowLine inc = line(Opcode::Addi, Sp);
        inc.ins.imm = 1;
        core = {inc, line(Opcode::Ldr, v, Sp)};
        break;
      }
      case MidOp::Pop: {
        int v = load(a[0]);
        LowLine dec = line(Opcode::Subi, Sp);
        dec.ins.imm = 1;
        core = {line(Opcode::Ldr, v, Sp), dec};
        break;
      }
      case MidOp::Start: core.push_back(line(Opcode::Start)); break;
      case MidOp::Finish: core.push_back(line(Opcode::Finish)); break;
    }
    if (!i.label.empty()) {
      if (!core[0].label.empty()) throw AsmError("two labels on one instruction");
      core[0].label = i.label;
    }
    for (auto& l : pro_) out_.code.push_back(l);
    for (auto& l : core) out_.code.push_back(l);
    for (auto it = pro_.rbegin(); it != pro_.rend(); ++it) {
      LowLine l = *it;
      l.ins = *inverse(l.ins);
      out_.code.push_back(l);
    }
  }
};

// ---- text ------------------------------------------------------------------

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

bool label_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

bool is_label(const std::string& s) {
  return !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0])) && s[0] != '-' &&
         std::all_of(s.begin(), s.end(), label_char);
}

std::string imm_text(const LowLine& l) {
  if (!l.target.empty()) return l.target;
  if (!l.abs_label.empty()) return "&" + l.abs_label;
  if (!l.sym.empty()) return "@" + l.sym;
  return std::to_string(l.ins.imm);
}

}  // namespace

LowProgram lower(const MidProgram& m) { return Lowerer(m).run(); }

std::string LowLine::str(const GateTable& g) const {
  std::string s(mnemonic(ins.op));
  auto r = [](int x) { return std::string(reg_name(x)); };
  switch (format_of(ins.op)) {
    case Format::I:
      if (ins.op == Opcode::Bra) return s + " " + imm_text(*this);
      return s + " " + r(ins.r1) + ", " + imm_text(*this);
    default: return to_string(ins, &g);
  }
}

std::string listing(const LowProgram& p) {
  std::ostringstream o;
  for (const auto& e : p.entries) {
    o << ".entry " << e.symbol;
    for (const auto& l : e.labels) o << " " << (l.empty() ? "-" : l);
    o << "\n";
  }
  auto names = [&](const char* d, const auto& xs) {
    if (xs.empty()) return;
    o << d;
    bool first = true;
    for (const auto& x : xs) {
      o << (first ? " " : ", ") << x;
      first = false;
    }
    o << "\n";
  };
  names(".quantum", p.quantum);
  names(".array", p.arrays);
  names(".input", p.inputs);
  for (const auto& l : p.code) {
    std::string lab = l.label.empty() ? "" : l.label + ":";
    o << lab << std::string(std::max<size_t>(1, 12 - lab.size()), ' ') << l.str(p.gates) << "\n";
  }
  return o.str();
}

LowProgram parse_asm(std::string_view text) {
  LowProgram p;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::string pending;
  while (std::getline(in, raw)) {
    ++lineno;
    auto fail = [&](const std::string& m) -> AsmError {
      return AsmError("line " + std::to_string(lineno) + ": " + m);
    };
    std::string s = trim(raw.substr(0, raw.find(';')));
    if (s.empty()) continue;
    if (s[0] == '.') {
      std::istringstream ds(s);
      std::string d;
      ds >> d;
      std::string rest;
      std::getline(ds, rest);
      if (d == ".entry") {
        std::istringstream rs(rest);
        EntryArray e;
        rs >> e.symbol;
        std::string l;
        while (rs >> l) e.labels.push_back(l == "-" ? "" : l);
        if (e.symbol.empty() || e.labels.empty()) throw fail("bad .entry");
        p.entries.push_back(e);
      } else if (d == ".quantum") {
        for (auto& n : split_args(rest)) p.quantum.insert(n);
      } else if (d == ".array") {
        for (auto& n : split_args(rest)) p.arrays.insert(n);
      } else if (d == ".input") {
        for (auto& n : split_args(rest)) p.inputs.push_back(n);
      } else {
        throw fail("unknown directive " + d);
      }
      continue;
    }
    LowLine l;
    if (auto c = s.find(':'); c != std::string::npos && is_label(trim(s.substr(0, c)))) {
      l.label = trim(s.substr(0, c));
      s = trim(s.substr(c + 1));
      if (s.empty()) {  // label alone on its line
        if (!pending.empty()) throw fail("two labels on one instruction");
        pending = l.label;
        continue;
      }
    }
    if (!pending.empty()) {
      if (!l.label.empty()) throw fail("two labels on one instruction");
      l.label = pending;
      pending.clear();
    }
    size_t sp = s.find_first_of(" \t");
    std::string mn = s.substr(0, sp);
    auto args = split_args(sp == std::string::npos ? "" : s.substr(sp));
    auto op = opcode_from(mn);
    if (!op) throw fail("unknown mnemonic " + mn);
    l.ins.op = *op;
    auto reg = [&](size_t k) {
      if (k >= args.size()) throw fail("missing operand for " + mn);
      auto r = reg_from_name(args[k]);
      if (!r) throw fail("bad register " + args[k]);
      return *r;
    };
    auto imm = [&](size_t k) {
      if (k >= args.size()) throw fail("missing operand for " + mn);
      const std::string& a = args[k];
      if (a[0] == '@') {
        l.sym = a.substr(1);
      } else if (a[0] == '&') {
        l.abs_label = a.substr(1);
      } else if (is_label(a)) {
        l.target = a;
      } else {
        long v = 0;
        auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
        if (ec != std::errc() || ptr != a.data() + a.size()) throw fail("bad immediate " + a);
        l.ins.imm = static_cast<std::int32_t>(v);
      }
    };
    auto want = [&](size_t n) {
      if (args.size() != n) throw fail(mn + " takes " + std::to_string(n) + " operands");
    };
    switch (*op) {
      case Opcode::Bra: want(1); imm(0); break;
      case Opcode::Ld: case Opcode::Xori: case Opcode::Addi: case Opcode::Subi:
      case Opcode::Bez: case Opcode::Bnz:
        want(2); l.ins.r1 = reg(0); imm(1); break;
      case Opcode::Neg: case Opcode::Swbr: case Opcode::Qif: case Opcode::Fiq:
        want(1); l.ins.r1 = reg(0); break;
      case Opcode::Start: case Opcode::Finish: want(0); break;
      case Opcode::Uni: case Opcode::Unib: {
        want(*op == Opcode::Uni ? 2 : 3);
        std::string g = args[0], name = g;
        std::vector<double> params;
        if (auto lp = g.find('('); lp != std::string::npos) {
          name = g.substr(0, lp);
          try {
            params.push_back(std::stod(g.substr(lp + 1, g.size() - lp - 2)));
          } catch (const std::exception&) {
            throw fail("bad gate parameter in " + g);
          }
        }
        if (!make_gate(name, params)) throw fail("unknown gate " + g);
        l.ins.para = p.gates.intern(name, params);
        l.ins.r1 = reg(1);
        if (*op == Opcode::Unib) l.ins.r2 = reg(2);
        break;
      }
      case Opcode::Ari: case Opcode::Arib: {
        want(*op == Opcode::Ari ? 3 : 4);
        auto o = op_from_mnemonic(args[0]);
        if (!o) throw fail("unknown operator " + args[0]);
        l.ins.para = static_cast<int>(*o);
        l.ins.r1 = reg(1);
        l.ins.r2 = reg(2);
        if (*op == Opcode::Arib) l.ins.r3 = reg(3);
        break;
      }
      default: want(2); l.ins.r1 = reg(0); l.ins.r2 = reg(1); break;
    }
    p.code.push_back(l);
  }
  if (!pending.empty()) throw AsmError("label " + pending + " at end of program");
  return p;
}

Image assemble(const LowProgram& p, const ImageConfig& cfg) {
  std::map<std::string, Word> label_addr;
  for (size_t i = 0; i < p.code.size(); ++i)
    if (!p.code[i].label.empty() && !label_addr.emplace(p.code[i].label, i).second)
      throw AsmError("label " + p.code[i].label + " defined twice");
  auto addr_of = [&](const std::string& l) {
    auto it = label_addr.find(l);
    if (it == label_addr.end()) throw AsmError("undefined label " + l);
    return it->second;
  };

  Image img;
  img.n_qram = cfg.n_qram;
  img.gates = p.gates;
  img.inputs = p.inputs;
  if (img.gates.size() > kMaxGates) throw AsmError("more than 64 gates");

  std::map<std::string, size_t> sym_index;
  auto add_symbol = [&](const std::string& n) {
    if (sym_index.count(n)) return;
    sym_index[n] = img.symbols.size();
    SymbolInfo s;
    s.name = n;
    s.kind = p.quantum.count(n) ? SymbolKind::Quantum : SymbolKind::Classical;
    s.array = p.arrays.count(n) > 0;
    img.symbols.push_back(s);
  };
  for (const auto& l : p.code)
    if (!l.sym.empty()) add_symbol(l.sym);
  for (const auto& e : p.entries) add_symbol(e.symbol);
  for (const auto& n : p.inputs) add_symbol(n);

  const Word nprog = static_cast<Word>(p.code.size());
  const Word nsym = static_cast<Word>(img.symbols.size());
  img.program = {0, nprog};
  img.symtab = {nprog, nsym};
  img.vars = {img.symtab.end(), cfg.var_words};
  img.qif = {img.vars.end(), cfg.qif_words};
  if (static_cast<std::uint64_t>(img.qif.end()) + cfg.min_stack > cfg.n_qram)
    throw ImageError("image does not fit " + std::to_string(cfg.n_qram) + " words");
  img.stack = {img.qif.end(), cfg.n_qram - img.qif.end()};
  img.words.assign(cfg.n_qram, 0);

  for (auto& s : img.symbols) s.slot = img.symtab.base + static_cast<Word>(sym_index[s.name]);

  Word cursor = img.vars.base;
  for (const auto& e : p.entries) {
    SymbolInfo& s = img.symbols[sym_index[e.symbol]];
    s.kind = SymbolKind::Entry;
    s.address = cursor;
    s.extent = static_cast<Word>(e.labels.size());
    if (s.address + s.extent > img.vars.end()) throw ImageError("entry arrays overflow the variable section");
    for (size_t k = 0; k < e.labels.size(); ++k)
      img.words[cursor + k] = e.labels[k].empty() ? 0 : addr_of(e.labels[k]);
    img.words[s.slot] = s.address;
    cursor += s.extent;
  }

  for (Word i = 0; i < nprog; ++i) {
    const LowLine& l = p.code[i];
    Instr ins = l.ins;
    if (!l.target.empty()) {
      std::int64_t off = static_cast<std::int64_t>(addr_of(l.target)) - i;
      if (off == 0) throw AsmError("branch to itself at " + l.target);
      ins.imm = static_cast<std::int32_t>(off);
    } else if (!l.abs_label.empty()) {
      ins.imm = static_cast<std::int32_t>(addr_of(l.abs_label));
    } else if (!l.sym.empty()) {
      ins.imm = static_cast<std::int32_t>(img.symbols[sym_index[l.sym]].slot);
    }
    try {
      img.words[i] = encode(ins);
    } catch (const EncodeError& e) {
      throw AsmError(std::string(e.what()) + " at address " + std::to_string(i));
    }
  }
  return img;
}

}  // namespace qrm
