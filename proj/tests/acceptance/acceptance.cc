// One line per criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "driver.h"
#include "isa_fuzz.h"
#include "qrm/assembler.h"
#include "qrm/corpus.h"
#include "qrm/frontend.h"
#include "qrm/pipeline.h"

using namespace qrm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct CorpusCase {
  std::string name;
  std::string source;
  Word n = 0;
  bool random_input = false;  // start from a random state instead of |0...0>
};

struct CaseRun {
  CorpusCase c;
  double fidelity = 0;
  bool disentangled = false;
  std::string reason;
  bool finished = false;
  double seconds = 0;
  double norm_error = 0;
  std::uint64_t max_ops = 0, max_reg = 0, max_qram = 0, t_exe = 0;
  Program program;
  Image image;
  std::string error;
};

std::uint64_t g_seed = 0;

std::vector<CorpusCase> corpus_cases() {
  std::vector<CorpusCase> out;
  std::mt19937_64 rng(g_seed);
  for (Word n = 1; n <= 8; ++n) out.push_back({"ghz n=" + std::to_string(n), corpus::ghz_source(), n});
  const char* mcg_gates[] = {"X", "H", "Ry(0.7)", "T", "Z"};
  for (Word n = 2; n <= 6; ++n)
    out.push_back({"mcg n=" + std::to_string(n), corpus::mcg_source(mcg_gates[n - 2]), n, true});
  for (Word n = 1; n <= 3; ++n)
    for (int k = 0; k < 3; ++k)
      out.push_back({"qmux n=" + std::to_string(n) + " #" + std::to_string(k),
                     corpus::qmux_source(corpus::random_gate_lists(1 << n, 8, 2, rng)), n, true});
  for (int n = 2; n <= 4; ++n)
    out.push_back({"qsp n=" + std::to_string(n),
                   corpus::qsp_source(n, corpus::random_amplitudes(n, rng)), static_cast<Word>(n)});
  return out;
}

Eigen::VectorXcd random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v.normalized();
}

CaseRun run_case(const CorpusCase& c, std::mt19937_64& rng) {
  CaseRun r;
  r.c = c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.program = parse(c.source);
    auto comp = compile(r.program);
    r.image = comp.image;
    std::map<std::string, Word> in{{"n", c.n}};
    auto pre = evaluate(comp.image, in);
    Eigen::VectorXcd psi;
    if (c.random_input) psi = random_state(Eigen::Index{1} << pre.qvars.size(), rng);
    auto ex = execute(comp.image, in, psi);
    r.t_exe = ex.eval.t_exe;
    r.disentangled = ex.result.disentangled;
    r.reason = ex.result.reason;
    r.finished = ex.finished;
    r.norm_error = ex.max_norm_error;
    r.max_ops = ex.costs.max_ops_per_cycle;
    r.max_reg = ex.costs.max_reg_per_cycle;
    r.max_qram = ex.costs.max_qram_per_cycle;
    if (r.disentangled) {
      auto st = run_oracle(r.program, classical_inputs(in), var_keys(ex.eval.qvars), psi);
      r.fidelity = fidelity(ex.result.psi, st.psi);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CaseRun> g_runs;

// ---- 1 -------------------------------------------------------------------
Outcome semantic_correctness() {
  Outcome o;
  double worst = 1, slowest = 0;
  for (const auto& r : g_runs) {
    if (!r.error.empty()) o.fail(r.c.name + ": " + r.error);
    else if (!r.disentangled) o.fail(r.c.name + ": not disentangled");
    else if (!r.finished) o.fail(r.c.name + ": did not reach finish");
    else if (r.fidelity < 1 - 1e-9) o.fail(r.c.name + ": fidelity " + std::to_string(r.fidelity));
    if (r.seconds >= 60) o.fail(r.c.name + " took " + std::to_string(r.seconds) + " s");
    worst = std::min(worst, r.fidelity);
    slowest = std::max(slowest, r.seconds);
  }
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu runs, min fidelity 1-%.1e, slowest %.2f s", g_runs.size(),
                  1 - worst, slowest);
    o.detail = buf;
  }
  return o;
}

// ---- 2 -------------------------------------------------------------------
Outcome ghz_closed_form() {
  Outcome o;
  const double r2 = 1 / std::sqrt(2.0);
  for (Word n = 1; n <= 8; ++n) {
    auto ex = execute(compile(corpus::ghz_source()).image, {{"n", n}});
    if (!ex.result.disentangled) {
      o.fail("n=" + std::to_string(n) + " not disentangled");
      continue;
    }
    const auto& psi = ex.result.psi;
    const Eigen::Index last = psi.size() - 1;
    if (psi.size() != (Eigen::Index{1} << n)) o.fail("n=" + std::to_string(n) + " wrong dimension");
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      Complex want = (j == 0 || j == last) ? Complex(r2) : Complex(0);
      if (std::abs(psi[j] - want) > 1e-9) o.fail("n=" + std::to_string(n) + " amplitude " + std::to_string(j));
    }
  }
  if (o.pass) o.detail = "n=1..8";
  return o;
}

// ---- 3 -------------------------------------------------------------------
Eigen::Matrix4cd embed(const corpus::GateOp& g) {
  const Gate gate = *make_gate(g.gate, g.params);
  Eigen::Matrix4cd m;
  if (gate.arity == 1) {
    Eigen::Matrix2cd u;
    u << gate.at(0, 0), gate.at(0, 1), gate.at(1, 0), gate.at(1, 1);
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd& a = g.targets[0] == 1 ? u : id;
    const Eigen::Matrix2cd& b = g.targets[0] == 1 ? id : u;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = a(i >> 1, j >> 1) * b(i & 1, j & 1);
    return m;
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = gate.at(i, j);
  if (g.targets[0] == 2) {  // operands reversed: conjugate by SWAP
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1;
    m = s * m * s;
  }
  return m;
}

Outcome multiplexor_unitary() {
  Outcome o;
  std::mt19937_64 rng(g_seed + 3);
  auto lists = corpus::random_gate_lists(4, 6, 2, rng);
  auto comp = compile(corpus::qmux_source(lists));
  auto ev = evaluate(comp.image, {{"n", 2}});
  std::vector<std::string> names;
  for (const auto& q : ev.qvars) names.push_back(VarKey{q.name, q.index}.str());
  if (names != std::vector<std::string>{"p[1]", "p[2]", "q[1]", "q[2]"}) {
    o.fail("unexpected quantum variables");
    return o;
  }
  // simulated matrix over basis index p1 p2 q1 q2
  Eigen::MatrixXcd sim(16, 16);
  for (int col = 0; col < 16; ++col) {
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(16);
    in[col] = 1;
    auto ex = execute(comp.image, {{"n", 2}}, in);
    if (!ex.result.disentangled) {
      o.fail("column " + std::to_string(col) + " not disentangled");
      return o;
    }
    sim.col(col) = ex.result.psi;
  }
  // sum_x |x><x| (x) U_x with x = q[2] q[1]
  std::array<Eigen::Matrix4cd, 4> u;
  for (int x = 0; x < 4; ++x) {
    u[x].setIdentity();
    for (const auto& g : lists[x]) u[x] = embed(g) * u[x];
  }
  double err = 0;
  for (int row = 0; row < 16; ++row)
    for (int col = 0; col < 16; ++col) {
      int dr = row >> 2, dc = col >> 2;
      int xr = (row >> 0 & 1) << 1 | (row >> 1 & 1), xc = (col >> 0 & 1) << 1 | (col >> 1 & 1);
      Complex want = xr == xc ? u[xr](dr, dc) : Complex(0);
      err = std::max(err, std::abs(sim(row, col) - want));
    }
  if (err > 1e-9) o.fail("max entry error " + std::to_string(err));
  if ((sim - Eigen::MatrixXcd::Identity(16, 16)).norm() < 1e-3) o.fail("blocks are trivial");
  char buf[64];
  std::snprintf(buf, sizeof buf, "max entry error %.1e", err);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- 4 -------------------------------------------------------------------
bool faulty_build_fails(std::string& how) {
  Program p = parse(corpus::mcg_source("X"));
  auto hl = transform(p);
  MidProgram mid = translate(hl.program);
  bool removed = false;
  for (auto& b : mid.blocks) {
    if (b.name != "P") continue;
    for (auto it = b.code.rbegin(); it != b.code.rend(); ++it)
      if (it->uncp && (it->op == MidOp::Ari || it->op == MidOp::Arib) && it->label.empty()) {
        b.code.erase(std::next(it).base());
        removed = true;
        break;
      }
  }
  if (!removed) {
    how = "no uncp instruction to delete";
    return false;
  }
  try {
    Image img = assemble(lower(mid));
    // all three coins in superposition
    Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(8, 1 / std::sqrt(8.0));
    auto ex = execute(img, {{"n", 3}}, psi);
    if (!ex.eval.diagnostics.empty()) how = "evaluation: " + ex.eval.diagnostics.front();
    if (!ex.result.disentangled) {
      if (how.empty()) how = ex.result.reason;
      return true;
    }
    return !ex.eval.diagnostics.empty();
  } catch (const std::exception& e) {
    how = e.what();
    return true;
  }
}

Outcome disentanglement() {
  Outcome o;
  for (const auto& r : g_runs)
    if (!r.disentangled) o.fail(r.c.name + ": " + (r.error.empty() ? r.reason : r.error));
  std::string how;
  if (!faulty_build_fails(how)) o.fail("fault-injected build was not caught " + how);
  if (o.pass) o.detail = std::to_string(g_runs.size()) + " runs PASS; injected fault FAIL (" + how.substr(0, 60) + ")";
  return o;
}

// ---- 5 -------------------------------------------------------------------
Outcome unitarity() {
  Outcome o;
  double worst = 0;
  for (const auto& r : g_runs) {
    worst = std::max(worst, r.norm_error);
    if (r.norm_error > 1e-9) o.fail(r.c.name + ": norm error " + std::to_string(r.norm_error));
  }
  std::mt19937_64 g(g_seed + 5);
  int checked = 0;
  while (checked < 10000) {
    Instr i = testing::random_valid(g);
    auto inv = inverse(i);
    if (!inv) continue;
    Regs r{};
    testing::MapMem m;
    testing::random_config(g, r, m);
    const Regs r0 = r;
    const auto m0 = m;
    execute(i, r, m);
    execute(*inv, r, m);
    if (r != r0 || !(m == m0)) o.fail("inverse fails for " + to_string(i));
    ++checked;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max norm drift %.1e, %d inverse pairs", worst, checked);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- 6 -------------------------------------------------------------------
std::string shape(const QifTable& t, int v) {
  const QifNode& n = t.at(v);
  std::string s = n.link[Fc0] ? "*[" + shape(t, n.link[Fc0]) + "|" + shape(t, n.link[Fc1]) + "]" : "o";
  if (n.link[Nx]) s += ">" + shape(t, n.link[Nx]);
  return s;
}

// k nested qif levels below this node
std::string expected_shape(int k) {
  if (k == 0) return "o";
  auto child = [](int j) { return j == 0 ? expected_shape(0) : expected_shape(j) + ">o"; };
  return "*[" + child(k - 1) + "|" + child(k - 1) + "]";
}

int last_in_chain(const QifTable& t, int v) {
  while (t.at(v).link[Nx]) v = t.at(v).link[Nx];
  return v;
}

Outcome qif_table_structure() {
  Outcome o;
  // block x has x+1 gates, so every pair of sibling branches differs in length
  std::vector<corpus::GateList> lists(8);
  for (int x = 0; x < 8; ++x) lists[x] = corpus::uniform_gate_list(x + 1, 1);
  auto ev = evaluate(compile(corpus::qmux_source(lists)).image, {{"n", 3}});
  const QifTable& t = ev.table;
  if (t.size() != 22) o.fail("expected 22 nodes, got " + std::to_string(t.size()));
  if (auto c = t.check(); !c.empty()) o.fail("link check: " + c);
  const std::string want = expected_shape(3) + ">o";
  if (shape(t, 1) != want) o.fail("shape " + shape(t, 1));
  int pairs = 0;
  for (int v = 1; v <= t.size(); ++v) {
    const QifNode& n = t.at(v);
    if (!n.link[Fc0]) continue;
    ++pairs;
    if (n.link[Lc0] != last_in_chain(t, n.link[Fc0]) || n.link[Lc1] != last_in_chain(t, n.link[Fc1]))
      o.fail("lc links of v" + std::to_string(v));
    int zeros = (t.at(n.link[Lc0]).w == 0) + (t.at(n.link[Lc1]).w == 0);
    if (zeros != 1) o.fail("v" + std::to_string(v) + " has " + std::to_string(zeros) + " zero waits");
  }
  if (o.pass) o.detail = "22 nodes, depth-3 tree, " + std::to_string(pairs) + " sibling pairs";
  return o;
}

// ---- 7 -------------------------------------------------------------------
std::size_t groups(const Machine& m, const std::vector<QVar>& qvars) {
  std::set<Word> qaddr;
  for (const auto& q : qvars) qaddr.insert(q.address);
  std::set<std::string> g;
  for (const auto& b : m.branches()) {
    Config rest = b.config;
    std::erase_if(rest.delta, [&](const auto& e) { return qaddr.count(e.first) > 0; });
    g.insert(rest.fingerprint());
  }
  return g.size();
}

Outcome synchronisation() {
  Outcome o;
  Image img = assemble(parse_asm(driver::read_file(std::string(QRM_CORPUS_DIR) + "/sync.qasm")));
  auto ev = evaluate(img, {});
  const QifNode& root = ev.table.at(1);
  if (!root.link[Fc0] || !root.link[Fc1]) {
    o.fail("no qif node");
    return o;
  }
  const Word w0 = ev.table.at(root.link[Fc0]).w, w1 = ev.table.at(root.link[Fc1]).w;
  if (w0 != 5 || w1 != 0) o.fail("waits " + std::to_string(w0) + "/" + std::to_string(w1));
  Word fiq = 0;
  for (Word a = img.program.base; a < img.program.end(); ++a)
    if (img.instr(a).op == Opcode::Fiq) fiq = a;
  Image loaded = img;
  apply(loaded, ev);
  Machine m(loaded);
  // coin c in (|0>+|1>)/sqrt2, data d in |0>
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi[0] = psi[2] = 1 / std::sqrt(2.0);
  m.load(ev.qvars, psi);
  std::size_t before = 0, at_join = 0;
  std::uint64_t join = 0;
  for (std::uint64_t c = 1; c <= ev.t_exe; ++c) {
    std::size_t g0 = groups(m, ev.qvars);
    m.cycle();
    bool joined = !m.branches().empty();
    for (const auto& b : m.branches()) joined &= b.config.regs[Pc] == fiq + 1;
    if (joined && !join) {
      join = c;
      before = g0;
      at_join = groups(m, ev.qvars);
    }
  }
  if (!join) o.fail("branches never reached the join");
  else if (before != 2 || at_join != 1)
    o.fail("groups before/at join " + std::to_string(before) + "/" + std::to_string(at_join));
  auto ex = extract_qvar_state(m, ev.qvars);
  if (!ex.disentangled) o.fail("final state entangled: " + ex.reason);
  else if (std::abs(std::abs(ex.psi[0]) - 1 / std::sqrt(2.0)) > 1e-9 ||
           std::abs(std::abs(ex.psi[3]) - 1 / std::sqrt(2.0)) > 1e-9)
    o.fail("wrong final state");
  if (o.pass) o.detail = "w=5 on the short branch, single group at join cycle " + std::to_string(join);
  return o;
}

// ---- 8 -------------------------------------------------------------------
Outcome cycle_bound() {
  Outcome o;
  std::uint64_t ops = 0, reg = 0, qram = 0;
  for (const auto& r : g_runs) {
    ops = std::max(ops, r.max_ops);
    reg = std::max(reg, r.max_reg);
    qram = std::max(qram, r.max_qram);
  }
  if (ops > 64) o.fail("elementary operations per cycle reached " + std::to_string(ops));
  std::vector<driver::BenchRow> byn;
  for (int n = 2; n <= 6; ++n) byn.push_back(driver::bench_qmux(n, 4));
  const long d0 = static_cast<long>(byn[1].t_exe - byn[0].t_exe);
  for (size_t i = 1; i < byn.size(); ++i) {
    long d = static_cast<long>(byn[i].t_exe - byn[i - 1].t_exe);
    if (std::abs(d - d0) > 1) o.fail("T_exe increment over n varies: " + std::to_string(d));
    if (byn[i].baseline != 2 * byn[i - 1].baseline) o.fail("baseline does not double");
  }
  auto t4 = driver::bench_qmux(3, 4), t8 = driver::bench_qmux(3, 8), t16 = driver::bench_qmux(3, 16);
  long s1 = static_cast<long>(t8.t_exe - t4.t_exe), s2 = static_cast<long>(t16.t_exe - t8.t_exe);
  if (std::abs(s2 - 2 * s1) > 2) o.fail("T_exe not affine in block length");
  if (o.pass) {
    std::ostringstream s;
    s << "dT/dn=" << d0 << ", dT/dlen=" << s1 / 4.0 << ", max per cycle: ops " << ops << " reg " << reg
      << " qram " << qram;
    o.detail = s.str();
  }
  return o;
}

// ---- 9 -------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  int runs = 0;
  for (const auto& r : g_runs) {
    if (!r.error.empty()) continue;
    std::map<std::string, Word> in{{"n", r.c.n}};
    auto d = evaluate(r.image, in);
    for (std::uint64_t s = 1; s <= 3; ++s) {
      EvalOptions opt;
      opt.schedule = Schedule::Random;
      opt.seed = g_seed * 31 + s;
      auto x = evaluate(r.image, in, opt);
      if (x.t_exe != d.t_exe || x.table.encode(r.image.qif.base) != d.table.encode(r.image.qif.base))
        o.fail(r.c.name + ": schedules disagree");
      ++runs;
    }
    EvalOptions lim;
    lim.t_prac = d.t_exe;
    if (evaluate(r.image, in, lim).timeout) o.fail(r.c.name + ": timeout at T_prac = T_exe");
    lim.t_prac = d.t_exe - 1;
    if (!evaluate(r.image, in, lim).timeout) o.fail(r.c.name + ": no timeout at T_prac = T_exe - 1");
  }
  if (o.pass) o.detail = std::to_string(runs) + " random schedules match depth-first";
  return o;
}

}  // namespace

int main() {
  g_seed = corpus::seed_from_env(20240917);
  std::mt19937_64 rng(g_seed);
  for (const auto& c : corpus_cases()) g_runs.push_back(run_case(c, rng));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"end-to-end semantic correctness", semantic_correctness},
      {"GHZ closed form", ghz_closed_form},
      {"multiplexor unitary", multiplexor_unitary},
      {"disentanglement", disentanglement},
      {"unitarity and reversibility", unitarity},
      {"qif table structure", qif_table_structure},
      {"synchronisation", synchronisation},
      {"cycle-level time bound", cycle_bound},
      {"partial evaluation determinism", determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k << " " << name << ": " << o.detail << std::endl;
  }
  std::cout << "seed " << g_seed << "\n";
  return failed;
}
