#include "qrm/partial_eval.h"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

namespace qrm {

// ---- qif table ---------------------------------------------------------------

std::vector<Word> QifTable::encode(Word base) const {
  std::vector<Word> out;
  out.reserve(nodes.size() * kNodeWords);
  auto addr = [&](int id) { return id ? base + static_cast<Word>(id - 1) * kNodeWords : Word{0}; };
  for (const auto& n : nodes) {
    out.push_back(n.w);
    for (int l : n.link) out.push_back(addr(l));
  }
  return out;
}

QifTable QifTable::decode(const std::vector<Word>& words, Word base) {
  if (words.size() % kNodeWords) throw EvalError("qif table length is not a multiple of 9");
  QifTable t;
  const Word count = static_cast<Word>(words.size() / kNodeWords);
  for (Word k = 0; k < count; ++k) {
    QifNode n;
    n.w = words[k * kNodeWords];
    for (int l = 0; l < 8; ++l) {
      Word a = words[k * kNodeWords + 1 + l];
      if (!a) continue;
      if (a < base || (a - base) % kNodeWords || (a - base) / kNodeWords >= count)
        throw EvalError("qif table link " + std::to_string(a) + " is not a node address");
      n.link[l] = static_cast<int>((a - base) / kNodeWords) + 1;
    }
    t.nodes.push_back(n);
  }
  return t;
}

std::string QifTable::check() const {
  if (nodes.empty()) return "empty table";
  const QifNode& root = at(1);
  if (root.w || root.link[Pr] || root.link[Cf] || root.link[Cl]) return "root has a wait or a parent";
  auto bad = [](int v, const char* what) { return "node " + std::to_string(v) + ": " + what; };
  for (int v = 1; v <= size(); ++v) {
    const QifNode& n = at(v);
    for (int l : n.link)
      if (l < 0 || l > size()) return bad(v, "link out of range");
    if (n.link[Nx] && at(n.link[Nx]).link[Pr] != v) return bad(v, "nx without pr");
    if (n.link[Pr] && at(n.link[Pr]).link[Nx] != v) return bad(v, "pr without nx");
    for (int i : {Fc0, Fc1})
      if (n.link[i] && at(n.link[i]).link[Cf] != v) return bad(v, "fc without cf");
    for (int i : {Lc0, Lc1})
      if (n.link[i] && at(n.link[i]).link[Cl] != v) return bad(v, "lc without cl");
    if (int c = n.link[Cf]; c && at(c).link[Fc0] != v && at(c).link[Fc1] != v) return bad(v, "cf without fc");
    if (int c = n.link[Cl]; c && at(c).link[Lc0] != v && at(c).link[Lc1] != v) return bad(v, "cl without lc");
    bool has0 = n.link[Fc0], has1 = n.link[Fc1];
    if (has0 != has1 || has0 != bool(n.link[Lc0]) || has0 != bool(n.link[Lc1]))
      return bad(v, "incomplete children");
    if (has0 && std::min(at(n.link[Lc0]).w, at(n.link[Lc1]).w) != 0)
      return bad(v, "neither branch of the join has zero wait");
    if (n.w && n.link[Nx]) return bad(v, "wait on a node that is not last in its chain");
  }
  return "";
}

std::string QifTable::dump() const {
  std::ostringstream o;
  std::vector<std::pair<int, int>> stack = {{1, 0}};
  while (!stack.empty()) {
    auto [v, depth] = stack.back();
    stack.pop_back();
    const QifNode& n = at(v);
    o << std::string(depth * 2, ' ') << (n.link[Fc0] ? "*" : "o") << " v" << v << " w=" << n.w;
    static const char* names[] = {"nx", "fc0", "fc1", "lc0", "lc1", "pr", "cf", "cl"};
    for (int l = 0; l < 8; ++l)
      if (n.link[l]) o << " " << names[l] << "=v" << n.link[l];
    o << "\n";
    if (n.link[Nx]) stack.push_back({n.link[Nx], depth});
    if (n.link[Fc1]) stack.push_back({n.link[Fc1], depth + 1});
    if (n.link[Fc0]) stack.push_back({n.link[Fc0], depth + 1});
  }
  return o.str();
}

namespace {

// Renumber in preorder (fc0 subtree, fc1 subtree, then nx) so the ids do
// not depend on the order in which processes created the nodes.
QifTable canonical(const QifTable& t) {
  std::vector<int> order, id(t.size() + 1, 0);
  std::vector<int> stack = {1};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (id[v]) continue;
    order.push_back(v);
    id[v] = static_cast<int>(order.size());
    const auto& n = t.at(v);
    for (int l : {Nx, Fc1, Fc0})
      if (n.link[l]) stack.push_back(n.link[l]);
  }
  if (static_cast<int>(order.size()) != t.size()) throw EvalError("qif table has unreachable nodes");
  QifTable out;
  for (int v : order) {
    QifNode n = t.at(v);
    for (int& l : n.link) l = l ? id[l] : 0;
    out.nodes.push_back(n);
  }
  return out;
}

constexpr Word kVirt = 1u << 28;
constexpr Word kStride = 1u << 20;
constexpr Word kMaxOffset = 1u << 19;

struct Proc {
  enum State { Ready, Blocked, Arrived, Finished, Dead };
  Regs regs{};
  std::unordered_map<Word, Word> mem;
  int node = 1;
  std::uint64_t t = 0;
  std::string path;
  int fork = -1;
  int side = 0;
  State state = Ready;
};

struct Fork {
  int parent = 0;
  int node = 0;
  Word coin = 0;
  Word coin_value = 0;
  int child[2] = {0, 0};
};

struct FirstTouch {
  bool seen = false;
  std::uint64_t t = 0;
  std::string path;
  Word max_offset = 0;
};

struct Range {
  Word begin, end;
  int sym;
};

struct Timeout {};

class Evaluator {
 public:
  Evaluator(const Image& img, const EvalOptions& opt, bool virt)
      : img_(img), opt_(opt), virt_(virt), rng_(opt.seed), touch_(img.symbols.size()) {}

  std::vector<Range> ranges;  // pass 2: where variables live
  std::vector<std::string> diagnostics;

  // Runs to finish from the given root memory. Returns false on timeout.
  bool run(std::unordered_map<Word, Word> mem0) {
    Proc root;
    root.regs = img_.initial_regs();
    root.mem = std::move(mem0);
    table_.nodes.push_back({});
    procs_.push_back(std::move(root));
    ready_.push_back(0);
    try {
      while (!done_) {
        if (ready_.empty()) throw EvalError("no runnable process (unmatched fiq)");
        size_t pick = ready_.size() - 1;
        std::uint64_t budget = ~std::uint64_t{0};
        if (opt_.schedule == Schedule::Random) {
          pick = std::uniform_int_distribution<size_t>(0, ready_.size() - 1)(rng_);
          budget = 1 + rng_() % 16;
        }
        int id = ready_[pick];
        ready_.erase(ready_.begin() + static_cast<long>(pick));
        run_process(id, budget);
      }
    } catch (const Timeout&) {
      return false;
    }
    return true;
  }

  const QifTable& table() const { return table_; }
  std::uint64_t t_exe() const { return t_exe_; }
  std::uint64_t work() const { return work_; }
  const std::vector<FirstTouch>& touches() const { return touch_; }
  const std::set<Word>& touched() const { return touched_; }
  const Proc& final_process() const { return procs_[0]; }

 private:
  const Image& img_;
  EvalOptions opt_;
  bool virt_;
  std::mt19937_64 rng_;
  std::deque<Proc> procs_;
  std::vector<Fork> forks_;
  std::vector<int> ready_;
  QifTable table_;
  bool done_ = false;
  std::uint64_t t_exe_ = 0, work_ = 0;
  std::vector<FirstTouch> touch_;
  std::set<Word> touched_;

  void access(const Proc& p, Word a) {
    if (virt_ && a >= kVirt) {
      Word sym = (a - kVirt) / kStride, off = (a - kVirt) % kStride;
      if (sym >= touch_.size()) throw EvalError("address " + std::to_string(a) + " is out of range");
      if (off >= kMaxOffset)
        throw EvalError("subscript " + std::to_string(off) + " of " + img_.symbols[sym].name +
                        " is out of range");
      FirstTouch& f = touch_[sym];
      if (!f.seen || std::tie(p.t, p.path) < std::tie(f.t, f.path)) {
        f.t = p.t;
        f.path = p.path;
      }
      f.seen = true;
      f.max_offset = std::max(f.max_offset, off);
      return;
    }
    if (a >= img_.n_qram) throw EvalError("address " + std::to_string(a) + " is out of range");
    if (!virt_ && img_.vars.contains(a)) {
      auto it = std::upper_bound(ranges.begin(), ranges.end(), a,
                                 [](Word x, const Range& r) { return x < r.begin; });
      if (it == ranges.begin() || a >= std::prev(it)->end)
        throw EvalError("address " + std::to_string(a) + " is outside every variable");
      touched_.insert(a);
    }
  }

  struct Mem {
    Evaluator& e;
    Proc& p;
    Word get(Word a) {
      e.access(p, a);
      auto it = p.mem.find(a);
      if (it != p.mem.end()) return it->second;
      return a < e.img_.n_qram ? e.img_.words[a] : 0;
    }
    void set(Word a, Word v) {
      e.access(p, a);
      p.mem[a] = v;
    }
  };

  Word read(const Proc& p, Word a) const {
    auto it = p.mem.find(a);
    if (it != p.mem.end()) return it->second;
    return a < img_.n_qram ? img_.words[a] : 0;
  }

  int new_node() {
    table_.nodes.push_back({});
    return table_.size();
  }

  void run_process(int id, std::uint64_t budget) {
    for (std::uint64_t k = 0; k < budget; ++k) {
      Proc& p = procs_[id];
      if (p.t >= opt_.t_prac) throw Timeout{};
      ++p.t;
      ++work_;
      Word pc = p.regs[Pc];
      if (!img_.program.contains(pc)) throw EvalError("pc " + std::to_string(pc) + " left the program");
      Instr ins;
      try {
        ins = decode(read(p, pc));
      } catch (const DecodeError& e) {
        throw EvalError(std::string(e.what()) + " at pc " + std::to_string(pc));
      }
      Mem m{*this, p};
      Effect eff;
      try {
        eff = execute(ins, p.regs, m);
      } catch (const MachineFault& f) {
        throw EvalError(std::string(f.what()) + " at pc " + std::to_string(pc));
      }
      switch (eff) {
        case Effect::Done:
        case Effect::Gate: branch_stage(p.regs); break;
        case Effect::Qif:
          branch_stage(p.regs);
          fork(id, p.regs[ins.r1]);
          return;
        case Effect::Fiq: arrive(id); return;
        case Effect::Finish:
          branch_stage(p.regs);
          if (p.fork >= 0) throw EvalError("finish reached inside a quantum branch");
          p.state = Proc::Finished;
          t_exe_ = p.t;
          done_ = true;
          return;
      }
    }
    ready_.push_back(id);
  }

  void fork(int id, Word coin) {
    int v = procs_[id].node;
    if (table_.at(v).link[Fc0]) throw EvalError("node forked twice");
    Word cv = Mem{*this, procs_[id]}.get(coin);
    if (cv > 1) throw EvalError("coin at " + std::to_string(coin) + " is not a qubit");
    Fork f;
    f.parent = id;
    f.node = v;
    f.coin = coin;
    f.coin_value = cv;
    int fid = static_cast<int>(forks_.size());
    for (int i = 0; i < 2; ++i) {
      int c = new_node();
      table_.at(v).link[Fc0 + i] = c;
      table_.at(v).link[Lc0 + i] = c;
      table_.at(c).link[Cf] = v;
      table_.at(c).link[Cl] = v;
      Proc child = procs_[id];
      child.mem[coin] = static_cast<Word>(i);
      child.node = c;
      child.path += static_cast<char>('0' + i);
      child.fork = fid;
      child.side = i;
      child.state = Proc::Ready;
      f.child[i] = static_cast<int>(procs_.size());
      procs_.push_back(std::move(child));
    }
    procs_[id].state = Proc::Blocked;
    procs_[id].mem.clear();
    forks_.push_back(f);
    ready_.push_back(f.child[1]);
    ready_.push_back(f.child[0]);
  }

  void arrive(int id) {
    Proc& p = procs_[id];
    if (p.fork < 0) throw EvalError("fiq outside any qif");
    Fork& f = forks_[p.fork];
    if (table_.at(p.node).link[Cl] != f.node) throw EvalError("fiq does not close the open qif");
    p.state = Proc::Arrived;
    Proc& s = procs_[f.child[1 - p.side]];
    if (s.state != Proc::Arrived) return;
    merge(f);
  }

  void merge(const Fork& f) {
    Proc& c0 = procs_[f.child[0]];
    Proc& c1 = procs_[f.child[1]];
    std::uint64_t t = std::max(c0.t, c1.t);
    table_.at(c0.node).w = static_cast<Word>(t - c0.t);
    table_.at(c1.node).w = static_cast<Word>(t - c1.t);

    std::set<Word> keys;
    for (auto& [a, v] : c0.mem) keys.insert(a);
    for (auto& [a, v] : c1.mem) keys.insert(a);
    for (Word a : keys)
      if (a != f.coin && read(c0, a) != read(c1, a)) {
        diagnostics.push_back("branches of the qif at " + std::to_string(f.coin) +
                              " disagree at address " + std::to_string(a) + " (" +
                              std::to_string(read(c0, a)) + " vs " + std::to_string(read(c1, a)) + ")");
        break;
      }
    if (c0.regs != c1.regs)
      diagnostics.push_back("branches of the qif at " + std::to_string(f.coin) + " disagree in registers");

    int u = new_node();
    QifNode& pn = table_.at(f.node);
    if (pn.link[Nx]) throw EvalError("node joined twice");
    pn.link[Nx] = u;
    table_.at(u).link[Pr] = f.node;
    if (int pp = pn.link[Cl]) {
      QifNode& g = table_.at(pp);
      int x = g.link[Lc0] == f.node ? Lc0 : Lc1;
      g.link[x] = u;
      table_.at(u).link[Cl] = pp;
      table_.at(f.node).link[Cl] = 0;
    }

    Proc& par = procs_[f.parent];
    par.regs = c0.regs;
    par.mem = std::move(c0.mem);
    par.mem[f.coin] = f.coin_value;
    par.t = t;
    par.node = u;
    branch_stage(par.regs);
    par.state = Proc::Ready;
    c0.state = c1.state = Proc::Dead;
    c1.mem.clear();
    ready_.push_back(f.parent);
  }
};

std::unordered_map<Word, Word> initial_memory(const Image& img, const std::map<std::string, Word>& inputs,
                                              const std::vector<Word>& addr) {
  std::unordered_map<Word, Word> mem;
  for (size_t i = 0; i < img.symbols.size(); ++i)
    if (img.symbols[i].kind != SymbolKind::Entry) mem[img.symbols[i].slot] = addr[i];
  for (const auto& [name, v] : inputs) {
    auto it = std::find_if(img.symbols.begin(), img.symbols.end(),
                           [&](const SymbolInfo& s) { return s.name == name; });
    if (it == img.symbols.end() || it->kind != SymbolKind::Classical)
      throw EvalError("unknown input " + name);
    mem[addr[it - img.symbols.begin()]] = v;
  }
  return mem;
}

}  // namespace

EvalResult evaluate(const Image& img, const std::map<std::string, Word>& inputs, const EvalOptions& opt) {
  EvalResult r;
  r.inputs = inputs;
  const size_t ns = img.symbols.size();

  // pass 1: every symbol gets its own virtual window
  std::vector<Word> vaddr(ns);
  for (size_t i = 0; i < ns; ++i) vaddr[i] = kVirt + static_cast<Word>(i) * kStride;
  Evaluator first(img, opt, true);
  auto mem1 = initial_memory(img, inputs, vaddr);
  if (!first.run(mem1)) {
    r.timeout = true;
    return r;
  }
  auto touch = first.touches();
  for (const auto& [name, v] : inputs)
    for (size_t i = 0; i < ns; ++i)
      if (img.symbols[i].name == name) {
        touch[i].seen = true;
        touch[i].t = 0;
        touch[i].path.clear();
      }

  // layout: entry arrays stay where the assembler put them
  Word cursor = img.vars.base;
  for (const auto& s : img.symbols)
    if (s.kind == SymbolKind::Entry) cursor = std::max(cursor, s.address + s.extent);
  std::vector<size_t> order;
  for (size_t i = 0; i < ns; ++i)
    if (img.symbols[i].kind != SymbolKind::Entry && touch[i].seen) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::tie(touch[a].t, touch[a].path, a) < std::tie(touch[b].t, touch[b].path, b);
  });
  std::vector<Word> addr(ns, 0), extent(ns, 0);
  for (size_t i : order) {
    addr[i] = cursor;
    extent[i] = touch[i].max_offset + 1 + opt.margin;
    if (static_cast<std::uint64_t>(cursor) + extent[i] > img.vars.end())
      throw EvalError("variable section overflow while placing " + img.symbols[i].name);
    cursor += extent[i];
  }
  for (size_t i : order) r.allocation.push_back({img.symbols[i].name, addr[i], extent[i]});
  for (size_t i = 0; i < ns; ++i)
    if (img.symbols[i].kind != SymbolKind::Entry && !touch[i].seen)
      r.allocation.push_back({img.symbols[i].name, 0, 0});

  // pass 2 on real addresses
  Evaluator second(img, opt, false);
  for (size_t i = 0; i < ns; ++i) {
    if (img.symbols[i].kind == SymbolKind::Entry) {
      addr[i] = img.symbols[i].address;
      extent[i] = img.symbols[i].extent;
    }
    if (extent[i]) second.ranges.push_back({addr[i], addr[i] + extent[i], static_cast<int>(i)});
  }
  std::sort(second.ranges.begin(), second.ranges.end(),
            [](const Range& a, const Range& b) { return a.begin < b.begin; });
  auto mem2 = initial_memory(img, inputs, addr);
  if (!second.run(mem2)) {
    r.timeout = true;
    return r;
  }
  if (second.t_exe() != first.t_exe()) throw EvalError("cycle count changed after allocation");
  r.t_exe = second.t_exe();
  r.work = second.work();
  r.parallel_depth = second.t_exe();
  r.table = canonical(second.table());
  r.diagnostics = first.diagnostics;
  r.diagnostics.insert(r.diagnostics.end(), second.diagnostics.begin(), second.diagnostics.end());

  for (Word a : second.touched()) {
    auto it = std::upper_bound(second.ranges.begin(), second.ranges.end(), a,
                               [](Word x, const Range& g) { return x < g.begin; });
    const SymbolInfo& s = img.symbols[std::prev(it)->sym];
    if (s.kind != SymbolKind::Quantum) continue;
    QVar q{s.name, std::nullopt, a};
    if (s.array) q.index = a - std::prev(it)->begin;
    r.qvars.push_back(q);
  }
  std::sort(r.qvars.begin(), r.qvars.end(),
            [](const QVar& a, const QVar& b) { return std::tie(a.name, a.index) < std::tie(b.name, b.index); });

  const Proc& fin = second.final_process();
  for (const auto& [a, v] : fin.mem) {
    if (!img.vars.contains(a)) continue;
    Word want = mem2.count(a) ? mem2.at(a) : img.words[a];
    if (v != want) {
      r.diagnostics.push_back("memory at " + std::to_string(a) + " is not restored at finish");
      break;
    }
  }
  return r;
}

void apply(Image& img, const EvalResult& r) {
  for (const auto& a : r.allocation) {
    SymbolInfo* s = img.symbol(a.name);
    if (!s) throw EvalError("allocation names unknown symbol " + a.name);
    s->address = a.address;
    s->extent = a.extent;
    img.words[s->slot] = a.address;
  }
  for (const auto& [name, v] : r.inputs) {
    const SymbolInfo* s = img.symbol(name);
    if (!s || !s->address) throw EvalError("input " + name + " has no address");
    img.words[s->address] = v;
  }
  auto words = r.table.encode(img.qif.base);
  if (words.size() > img.qif.size) throw EvalError("qif table does not fit its section");
  std::copy(words.begin(), words.end(), img.words.begin() + img.qif.base);
}

std::string qtab_to_json(const Image& img, const EvalResult& r) {
  using nlohmann::json;
  json j;
  j["format"] = "qtab/1";
  j["timeout"] = r.timeout;
  j["t_exe"] = r.t_exe;
  j["work"] = r.work;
  j["parallel_depth"] = r.parallel_depth;
  j["qif_base"] = img.qif.base;
  j["qif_words"] = r.table.encode(img.qif.base);
  json syms = json::array();
  for (const auto& a : r.allocation) syms.push_back({{"name", a.name}, {"address", a.address}, {"extent", a.extent}});
  j["symbols"] = syms;
  j["inputs"] = r.inputs;
  json qs = json::array();
  for (const auto& q : r.qvars) {
    json e = {{"name", q.name}, {"address", q.address}};
    e["index"] = q.index ? json(*q.index) : json(nullptr);
    qs.push_back(e);
  }
  j["qvars"] = qs;
  j["diagnostics"] = r.diagnostics;
  return j.dump(1);
}

EvalResult qtab_from_json(const std::string& text) {
  using nlohmann::json;
  EvalResult r;
  try {
    json j = json::parse(text);
    if (j.at("format") != "qtab/1") throw EvalError("not a qtab/1 file");
    r.timeout = j.at("timeout");
    r.t_exe = j.at("t_exe");
    r.work = j.at("work");
    r.parallel_depth = j.at("parallel_depth");
    r.table = QifTable::decode(j.at("qif_words").get<std::vector<Word>>(), j.at("qif_base").get<Word>());
    for (const auto& s : j.at("symbols")) r.allocation.push_back({s.at("name"), s.at("address"), s.at("extent")});
    r.inputs = j.at("inputs").get<std::map<std::string, Word>>();
    for (const auto& q : j.at("qvars")) {
      QVar v{q.at("name"), std::nullopt, q.at("address")};
      if (!q.at("index").is_null()) v.index = q.at("index").get<Word>();
      r.qvars.push_back(v);
    }
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw EvalError(std::string("bad qtab: ") + e.what());
  }
  return r;
}

}  // namespace qrm
