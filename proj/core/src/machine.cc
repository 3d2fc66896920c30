#include "qrm/machine.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace qrm {

std::size_t Config::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (Word r : regs) mix(r);
  for (auto [a, v] : delta) mix((std::uint64_t{a} << 32) | v);
  return static_cast<std::size_t>(h);
}

std::string Config::fingerprint() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016zx@pc%u", hash(), regs[Pc]);
  return buf;
}

namespace {

struct ConfigHash {
  std::size_t operator()(const Config& c) const { return c.hash(); }
};

Word get_word(const Image& img, const Config& c, Word a) {
  auto it = std::lower_bound(c.delta.begin(), c.delta.end(), std::make_pair(a, Word{0}));
  if (it != c.delta.end() && it->first == a) return it->second;
  return img.words[a];
}

void set_word(const Image& img, Config& c, Word a, Word v) {
  auto it = std::lower_bound(c.delta.begin(), c.delta.end(), std::make_pair(a, Word{0}));
  bool same = img.words[a] == v;
  if (it != c.delta.end() && it->first == a) {
    if (same)
      c.delta.erase(it);
    else
      it->second = v;
  } else if (!same) {
    c.delta.insert(it, {a, v});
  }
}

struct Fault {
  std::string msg;
};

// Memory seen by the classical instructions; every access is one QRAM
// operation.
struct BranchMem {
  const Image& img;
  Config& c;
  std::uint64_t& qram;
  Word get(Word a) {
    if (a >= img.n_qram) throw Fault{"address " + std::to_string(a) + " beyond the QRAM"};
    ++qram;
    return get_word(img, c, a);
  }
  void set(Word a, Word v) {
    if (a >= img.n_qram) throw Fault{"address " + std::to_string(a) + " beyond the QRAM"};
    set_word(img, c, a, v);
  }
};

}  // namespace

Machine::Machine(Image img, MachineOptions opt) : img_(std::move(img)), opt_(opt) {
  finish_ = img_.finish_address();
  load({});
}

Word Machine::mem(const Config& c, Word addr) const { return get_word(img_, c, addr); }

void Machine::load(const std::vector<QVar>& qvars, const Eigen::VectorXcd& psi) {
  state_.clear();
  const int n = static_cast<int>(qvars.size());
  Config base;
  base.regs = img_.initial_regs();
  if (psi.size() == 0) {
    state_.push_back({base, 1.0});
    return;
  }
  if (psi.size() != (Eigen::Index{1} << n)) throw std::invalid_argument("state size does not match qvars");
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    if (std::abs(psi[j]) < opt_.prune) continue;
    Config c = base;
    for (int i = 0; i < n; ++i) set_word(img_, c, qvars[i].address, (j >> (n - 1 - i)) & 1);
    state_.push_back({c, psi[j]});
  }
}

double Machine::norm() const {
  double s = 0;
  for (const auto& b : state_) s += std::norm(b.amp);
  return s;
}

bool Machine::finished() const {
  return std::all_of(state_.begin(), state_.end(),
                     [&](const Branch& b) { return b.config.regs[Pc] == finish_ + 1; });
}

// One application of the cycle unitary to one basis configuration.
void Machine::step(const Branch& b, std::vector<Branch>& out, std::uint64_t& reg, std::uint64_t& qram,
                   bool& split) {
  Config c = b.config;
  Regs& r = c.regs;
  BranchMem m{img_, c, qram};
  auto node = [&](Word v, int field) { return m.get(v + static_cast<Word>(field)); };

  // set wait flag: a scratch register fetches M[pc], compares, unfetches
  Word word = m.get(r[Pc]);
  m.get(r[Pc]);
  reg += 2;
  if (r[Qifw] > 0 && opcode_of(word) == Opcode::Fiq) r[Wait] ^= 1;

  std::vector<Config> results;
  if (r[Wait]) {
    --r[Qifw];
    ++reg;
    results.push_back(c);
  } else {
    r[Ins] ^= m.get(r[Pc]);
    ++reg;
    Instr ins;
    try {
      ins = decode(r[Ins]);
    } catch (const DecodeError& e) {
      throw Fault{e.what()};
    }
    Effect eff;
    try {
      eff = execute(ins, r, m);
    } catch (const MachineFault& f) {
      throw Fault{f.what()};
    }
    ++reg;
    std::vector<std::pair<Config, Complex>> outs;
    switch (eff) {
      case Effect::Done:
      case Effect::Finish: outs.push_back({c, 1.0}); break;
      case Effect::Gate: {
        const Gate& g = img_.gates[ins.para];
        if (ins.op == Opcode::Uni) {
          Word in = r[ins.r1];
          if (in > 1) throw Fault{"gate on a register holding " + std::to_string(in)};
          for (Word o = 0; o < 2; ++o) {
            Complex a = g.at(static_cast<int>(o), static_cast<int>(in));
            if (a == Complex(0)) continue;
            Config d = c;
            d.regs[ins.r1] = o;
            outs.push_back({d, a});
          }
        } else {
          if (ins.r1 == ins.r2) throw Fault{"two-qubit gate on one register"};
          Word i1 = r[ins.r1], i2 = r[ins.r2];
          if (i1 > 1 || i2 > 1) throw Fault{"gate on a register that is not a qubit"};
          int in = static_cast<int>(2 * i1 + i2);
          for (int o = 0; o < 4; ++o) {
            Complex a = g.at(o, in);
            if (a == Complex(0)) continue;
            Config d = c;
            d.regs[ins.r1] = static_cast<Word>(o >> 1);
            d.regs[ins.r2] = static_cast<Word>(o & 1);
            outs.push_back({d, a});
          }
        }
        if (outs.size() != 1 || outs[0].second != Complex(1)) split = true;
        break;
      }
      case Effect::Qif: {
        Word x = m.get(r[ins.r1]);
        if (x > 1) throw Fault{"coin is not a qubit"};
        Word v = r[Qifv];
        r[Qifw] ^= node(v, 0);
        if (r[Qifw]) throw Fault{"qif with a pending wait"};
        Word ch = node(v, 1 + Fc0 + static_cast<int>(x));
        if (!ch) throw Fault{"qif table has no child here"};
        if (node(ch, 1 + Cf) != v) throw Fault{"qif table child does not point back"};
        m.get(ch + 1 + Cf);
        r[Qifv] = ch;
        r[Qifw] ^= node(ch, 0);
        m.get(r[ins.r1]);
        reg += 4;
        outs.push_back({c, 1.0});
        break;
      }
      case Effect::Fiq: {
        if (r[Qifw]) throw Fault{"fiq with a pending wait"};
        Word x = m.get(r[ins.r1]);
        if (x > 1) throw Fault{"coin is not a qubit"};
        Word v = r[Qifv];
        Word p = node(v, 1 + Cl);
        if (!p) throw Fault{"fiq at a node without a parent"};
        if (node(p, 1 + Lc0 + static_cast<int>(x)) != v) throw Fault{"qif table parent does not point back"};
        m.get(p + 1 + Lc0 + x);
        Word u = node(p, 1 + Nx);
        if (!u) throw Fault{"qif table has no continuation"};
        if (node(u, 1 + Pr) != p) throw Fault{"continuation does not point back"};
        m.get(u + 1 + Pr);
        m.get(v + 1 + Cl);
        r[Qifv] = u;
        r[Qifw] ^= node(u, 0);
        m.get(r[ins.r1]);
        reg += 4;
        outs.push_back({c, 1.0});
        break;
      }
    }
    for (auto& [d, a] : outs) {
      BranchMem dm{img_, d, qram};
      d.regs[Ins] ^= dm.get(d.regs[Pc]);
      if (d.regs[Ins]) throw Fault{"instruction register not cleared"};
      branch_stage(d.regs);
      results.push_back(d);
      out.push_back({std::move(d), b.amp * a});
    }
    qram -= outs.size() - (outs.empty() ? 0 : 1);  // siblings are parallel
    reg += 2;
  }
  if (r[Wait]) out.push_back({c, b.amp});

  // clear wait flag against the w of the node each result sits on
  for (size_t k = out.size() - results.size(); k < out.size(); ++k) {
    Config& d = out[k].config;
    BranchMem dm{img_, d, qram};
    Word w = dm.get(d.regs[Qifv]);
    if (d.regs[Qifw] < w) d.regs[Wait] ^= 1;
    if (d.regs[Wait]) throw Fault{"wait flag not cleared"};
  }
  qram += 1;
  reg += 2;
}

void Machine::cycle() {
  const std::uint64_t t = costs_.cycles + 1;
  std::vector<Branch> next;
  next.reserve(state_.size());
  std::uint64_t worst_reg = 0, worst_qram = 0, worst = 0;
  bool split = false;
  for (const auto& b : state_) {
    std::uint64_t reg = 0, qram = 0;
    try {
      step(b, next, reg, qram, split);
    } catch (const Fault& f) {
      throw RunFault(f.msg, t, b.config.fingerprint());
    }
    worst_reg = std::max(worst_reg, reg);
    worst_qram = std::max(worst_qram, qram);
    worst = std::max(worst, reg + qram);
  }
  if (split) {
    std::unordered_map<Config, size_t, ConfigHash> index;
    std::vector<Branch> merged;
    for (auto& b : next) {
      auto [it, fresh] = index.emplace(b.config, merged.size());
      if (fresh)
        merged.push_back(std::move(b));
      else
        merged[it->second].amp += b.amp;
    }
    next.clear();
    for (auto& b : merged)
      if (std::abs(b.amp) >= opt_.prune) next.push_back(std::move(b));
  }
  state_ = std::move(next);
  ++costs_.cycles;
  costs_.reg_ops += worst_reg;
  costs_.qram_ops += worst_qram;
  costs_.max_reg_per_cycle = std::max(costs_.max_reg_per_cycle, worst_reg);
  costs_.max_qram_per_cycle = std::max(costs_.max_qram_per_cycle, worst_qram);
  costs_.max_ops_per_cycle = std::max(costs_.max_ops_per_cycle, worst);

  double err = std::abs(norm() - 1.0);
  max_norm_err_ = std::max(max_norm_err_, err);
  if (err > opt_.norm_tol)
    throw RunFault("norm drifted to " + std::to_string(norm()), t,
                   state_.empty() ? "-" : state_[0].config.fingerprint());
  if (opt_.trace) {
    CycleRecord rec;
    rec.cycle = t;
    rec.branches = state_.size();
    for (const auto& b : state_) rec.pcs.push_back(b.config.regs[Pc]);
    std::sort(rec.pcs.begin(), rec.pcs.end());
    rec.pcs.erase(std::unique(rec.pcs.begin(), rec.pcs.end()), rec.pcs.end());
    rec.reg_ops = worst_reg;
    rec.qram_ops = worst_qram;
    trace_.push_back(std::move(rec));
  }
}

void Machine::run(std::uint64_t cycles) {
  for (std::uint64_t k = 0; k < cycles; ++k) cycle();
}

Extraction extract_qvar_state(const Machine& m, const std::vector<QVar>& qvars) {
  Extraction ex;
  const int n = static_cast<int>(qvars.size());
  ex.psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  std::vector<Config> groups;
  for (const auto& b : m.branches()) {
    Config rest = b.config;
    Eigen::Index j = 0;
    for (int i = 0; i < n; ++i) {
      Word v = m.mem(rest, qvars[i].address);
      if (v > 1) {
        ex.reason = "quantum variable " + qvars[i].name + " holds " + std::to_string(v);
        return ex;
      }
      j = (j << 1) | v;
      auto it = std::lower_bound(rest.delta.begin(), rest.delta.end(), std::make_pair(qvars[i].address, Word{0}));
      if (it != rest.delta.end() && it->first == qvars[i].address) rest.delta.erase(it);
    }
    if (groups.empty()) {
      groups.push_back(rest);
    } else if (!(rest == groups[0])) {
      const Config& g = groups[0];
      std::string where;
      for (int k = 0; k < kNumRegs && where.empty(); ++k)
        if (g.regs[k] != rest.regs[k])
          where = "register " + std::string(reg_name(k)) + " (" + std::to_string(g.regs[k]) + " vs " +
                  std::to_string(rest.regs[k]) + ")";
      if (where.empty()) {
        std::map<Word, int> addrs;
        for (auto [a, v] : g.delta) addrs[a];
        for (auto [a, v] : rest.delta) addrs[a];
        for (auto& [a, unused] : addrs)
          if (m.mem(g, a) != m.mem(rest, a)) {
            where = "word " + std::to_string(a) + " (" + std::to_string(m.mem(g, a)) + " vs " +
                    std::to_string(m.mem(rest, a)) + ")";
            break;
          }
      }
      ex.reason = "branches " + g.fingerprint() + " and " + rest.fingerprint() + " differ at " + where;
      return ex;
    }
    ex.psi[j] += b.amp;
  }
  ex.disentangled = true;
  return ex;
}

}  // namespace qrm
