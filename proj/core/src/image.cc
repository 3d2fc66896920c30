#include "qrm/image.h"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace qrm {

Regs Image::initial_regs() const {
  Regs r{};
  r[Pc] = program.base;
  r[Sp] = stack.base;
  r[Qifv] = qif.base;
  return r;
}

const SymbolInfo* Image::symbol(const std::string& name) const {
  for (const auto& s : symbols)
    if (s.name == name) return &s;
  return nullptr;
}

SymbolInfo* Image::symbol(const std::string& name) {
  for (auto& s : symbols)
    if (s.name == name) return &s;
  return nullptr;
}

Word Image::finish_address() const {
  for (Word a = program.base; a < program.end(); ++a)
    if (opcode_of(words[a]) == Opcode::Finish) return a;
  throw ImageError("program has no finish instruction");
}

namespace {

constexpr char kMagic[4] = {'Q', 'R', 'M', '1'};

struct Writer {
  std::ostream& os;
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
  }
  void f64(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void section(const Section& s) {
    u32(s.base);
    u32(s.size);
  }
};

struct Reader {
  std::istream& is;
  std::uint32_t u32() {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw ImageError("truncated image");
    return b[0] | b[1] << 8 | b[2] << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  }
  double f64() {
    std::uint64_t lo = u32(), hi = u32();
    std::uint64_t v = lo | hi << 32;
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (n > (1u << 20)) throw ImageError("corrupt string length");
    std::string s(n, '\0');
    if (!is.read(s.data(), n)) throw ImageError("truncated image");
    return s;
  }
  Section section() {
    Section s;
    s.base = u32();
    s.size = u32();
    return s;
  }
};

}  // namespace

void write_image(std::ostream& os, const Image& img) {
  Writer w{os};
  os.write(kMagic, 4);
  w.u32(kWordBits);
  w.u32(img.n_qram);
  for (const Section* s : {&img.program, &img.symtab, &img.vars, &img.qif, &img.stack}) w.section(*s);
  w.u32(static_cast<std::uint32_t>(img.gates.size()));
  for (const auto& g : img.gates.gates()) {
    w.str(g.name);
    w.u32(static_cast<std::uint32_t>(g.params.size()));
    for (double p : g.params) w.f64(p);
  }
  w.u32(kNumOps);
  for (int i = 0; i < kNumOps; ++i) w.str(std::string(op_mnemonic(static_cast<Op>(i))));
  w.u32(kNumRegs);
  for (int i = 0; i < kNumRegs; ++i) w.str(std::string(reg_name(i)));
  w.u32(static_cast<std::uint32_t>(img.symbols.size()));
  for (const auto& s : img.symbols) {
    w.str(s.name);
    w.u32(static_cast<std::uint32_t>(s.kind) | (s.array ? 0x100u : 0u));
    w.u32(s.slot);
    w.u32(s.address);
    w.u32(s.extent);
  }
  w.u32(static_cast<std::uint32_t>(img.inputs.size()));
  for (const auto& n : img.inputs) w.str(n);
  w.u32(static_cast<std::uint32_t>(img.words.size()));
  for (Word x : img.words) w.u32(x);
}

Image read_image(std::istream& is) {
  Reader r{is};
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ImageError("not a QRM1 image");
  if (r.u32() != kWordBits) throw ImageError("unsupported word size");
  Image img;
  img.n_qram = r.u32();
  for (Section* s : {&img.program, &img.symtab, &img.vars, &img.qif, &img.stack}) *s = r.section();
  std::uint32_t ng = r.u32();
  if (ng > kMaxGates) throw ImageError("too many gates");
  img.gates.clear();
  for (std::uint32_t i = 0; i < ng; ++i) {
    std::string name = r.str();
    std::uint32_t np = r.u32();
    if (np > 1) throw ImageError("bad gate parameter count");
    std::vector<double> params(np);
    for (auto& p : params) p = r.f64();
    auto g = make_gate(name, params);
    if (!g) throw ImageError("unknown gate " + name);
    img.gates.add_raw(*g);
  }
  std::uint32_t nops = r.u32();
  for (std::uint32_t i = 0; i < nops; ++i)
    if (r.str() != op_mnemonic(static_cast<Op>(i))) throw ImageError("operator table mismatch");
  std::uint32_t nregs = r.u32();
  for (std::uint32_t i = 0; i < nregs; ++i)
    if (r.str() != reg_name(static_cast<int>(i))) throw ImageError("register table mismatch");
  std::uint32_t ns = r.u32();
  for (std::uint32_t i = 0; i < ns; ++i) {
    SymbolInfo s;
    s.name = r.str();
    std::uint32_t k = r.u32();
    if ((k & 0xff) > 2 || k > 0x1ff) throw ImageError("bad symbol kind");
    s.kind = static_cast<SymbolKind>(k & 0xff);
    s.array = k & 0x100;
    s.slot = r.u32();
    s.address = r.u32();
    s.extent = r.u32();
    img.symbols.push_back(s);
  }
  std::uint32_t ni = r.u32();
  for (std::uint32_t i = 0; i < ni; ++i) img.inputs.push_back(r.str());
  std::uint32_t nw = r.u32();
  if (nw != img.n_qram) throw ImageError("word count does not match N_QRAM");
  img.words.resize(nw);
  for (auto& x : img.words) x = r.u32();
  return img;
}

void save_image(const std::string& path, const Image& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ImageError("cannot write " + path);
  write_image(f, img);
}

Image load_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ImageError("cannot read " + path);
  return read_image(f);
}

}  // namespace qrm
