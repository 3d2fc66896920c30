// qrm: compile, evaluate and run RQC++ programs on the register machine.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "driver.h"
#include "qrm/assembler.h"
#include "qrm/corpus.h"
#include "qrm/frontend.h"

using namespace qrm;

namespace {

enum Exit { Ok = 0, Fault = 1, CompileErr = 2, Timeout = 3 };

struct TimedOut : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void out_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    driver::write_file(path, text);
}

int cmd_compile(const std::string& src, const std::string& emit, std::string out,
                const std::vector<std::string>& inputs) {
  if (!inputs.empty()) {
    Program p = parse(driver::read_file(src));
    auto rep = check_conditions(p, classical_inputs(driver::parse_inputs(inputs)));
    if (!rep.ok) throw LangError(rep.message, rep.span);
  }
  if (emit == "image") {
    Image img = driver::load_any(src);
    if (out.empty()) out = src.substr(0, src.rfind('.')) + ".qimg";
    save_image(out, img);
    std::cerr << "wrote " << out << " (" << img.program.size << " instructions)\n";
    return Ok;
  }
  Compiled c = compile(driver::read_file(src));
  if (emit == "hl")
    out_text(out, print(c.hl.program));
  else if (emit == "mid")
    out_text(out, listing(c.mid));
  else
    out_text(out, listing(c.low));
  return Ok;
}

int cmd_check(const std::string& src, const std::vector<std::string>& inputs) {
  Program p = parse(driver::read_file(src));
  auto rep = check_conditions(p, classical_inputs(driver::parse_inputs(inputs)));
  if (!rep.ok) {
    std::cerr << src << ":" << rep.span.line << ":" << rep.span.col << ": " << rep.message << "\n";
    return CompileErr;
  }
  compile(p);
  std::cout << "ok\n";
  return Ok;
}

int cmd_eval(const std::string& img_path, const std::vector<std::string>& inputs, std::uint64_t tprac,
             const std::string& out, bool dump, const std::string& sched, std::uint64_t seed) {
  Image img = driver::load_any(img_path);
  EvalOptions opt;
  opt.t_prac = tprac;
  opt.schedule = sched == "random" ? Schedule::Random : Schedule::DepthFirst;
  opt.seed = corpus::seed_from_env(seed);
  EvalResult r = evaluate(img, driver::parse_inputs(inputs), opt);
  if (r.timeout) throw TimedOut("partial evaluation exceeded " + std::to_string(tprac) + " cycles");
  for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
  std::cout << "T_exe " << r.t_exe << "\nwork " << r.work << "\nparallel depth " << r.parallel_depth
            << "\nqif nodes " << r.table.size() << "\nquantum words " << r.qvars.size() << "\n";
  if (dump) std::cout << r.table.dump();
  if (!out.empty()) driver::write_file(out, qtab_to_json(img, r));
  return Ok;
}

int cmd_run(const std::string& img_path, const std::string& qtab, const std::vector<std::string>& inputs,
            const std::vector<std::string>& qinit, const std::string& dump_state, bool trace) {
  Image img = driver::load_any(img_path);
  EvalResult r = qtab_from_json(driver::read_file(qtab));
  for (const auto& [k, v] : driver::parse_inputs(inputs)) {
    auto it = r.inputs.find(k);
    if (it == r.inputs.end() || it->second != v)
      throw EvalError("input " + k + " does not match the evaluated table");
  }
  apply(img, r);
  MachineOptions mo;
  mo.trace = trace;
  Machine m(std::move(img), mo);
  m.load(r.qvars, driver::basis_state(var_keys(r.qvars), qinit));
  m.run(r.t_exe);
  if (trace)
    for (const auto& c : m.trace()) {
      std::cout << "cycle " << c.cycle << " branches " << c.branches << " reg " << c.reg_ops << " qram "
                << c.qram_ops << " pc";
      for (Word pc : c.pcs) std::cout << ' ' << pc;
      std::cout << "\n";
    }
  auto ex = extract_qvar_state(m, r.qvars);
  const auto& k = m.costs();
  std::cout << "cycles " << k.cycles << "\nfinished " << (m.finished() ? "yes" : "no") << "\nbranches "
            << m.branches().size() << "\nmax ops per cycle " << k.max_ops_per_cycle
            << "\nmax norm error " << m.max_norm_error() << "\ndisentangled "
            << (ex.disentangled ? "PASS" : "FAIL: " + ex.reason) << "\n";
  if (!dump_state.empty()) {
    std::ofstream os(dump_state);
    driver::write_qst(os, m, r.qvars);
  } else {
    driver::write_qst(std::cout, m, r.qvars);
  }
  return ex.disentangled && m.finished() ? Ok : Fault;
}

int cmd_oracle(const std::string& src, const std::vector<std::string>& inputs,
               const std::vector<std::string>& qinit, const std::string& out) {
  Program p = parse(driver::read_file(src));
  auto sigma = classical_inputs(driver::parse_inputs(inputs));
  auto qvars = discover_qvars(p, sigma);
  auto st = run_oracle(p, sigma, qvars, driver::basis_state(qvars, qinit));
  std::ostringstream os;
  driver::write_qst(os, qvars, st.psi);
  out_text(out, os.str());
  return Ok;
}

int cmd_bench(int n_lo, int n_hi, const std::vector<int>& lens, const std::string& out) {
  std::vector<driver::BenchRow> rows;
  for (int len : lens)
    for (int n = n_lo; n <= n_hi; ++n) rows.push_back(driver::bench_qmux(n, len));
  std::ostringstream os;
  driver::write_bench_csv(os, rows);
  out_text(out, os.str());
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"register machine toolchain for RQC++"};
  app.require_subcommand(1);

  std::string src, img, qtab, out, emit = "low", sched = "dfs", dump_state;
  std::vector<std::string> inputs, qinit;
  std::uint64_t tprac = 10'000'000, seed = 0;
  bool dump_qif = false, trace = false;
  int n_lo = 2, n_hi = 6;
  std::vector<int> lens{4, 8, 16};
  std::string corpus_name;

  auto* c = app.add_subcommand("compile", "compile a .rqc file (or assemble a .qasm file)");
  c->add_option("source", src)->required()->check(CLI::ExistingFile);
  c->add_option("--emit", emit, "hl, mid, low or image")->check(CLI::IsMember({"hl", "mid", "low", "image"}));
  c->add_option("-o,--output", out);
  c->add_option("--input", inputs, "check conditions under these inputs");

  auto* ck = app.add_subcommand("check", "check Conditions 1-3 and compile");
  ck->add_option("source", src)->required()->check(CLI::ExistingFile);
  ck->add_option("--input", inputs);

  auto* e = app.add_subcommand("eval", "partial evaluation: qif table, allocation, T_exe");
  e->add_option("image", img)->required()->check(CLI::ExistingFile);
  e->add_option("--input", inputs);
  e->add_option("--tprac", tprac);
  e->add_option("-o,--output", out, ".qtab file");
  e->add_flag("--dump-qif", dump_qif);
  e->add_option("--schedule", sched)->check(CLI::IsMember({"dfs", "random"}));
  e->add_option("--seed", seed, "random schedule seed (QRM_SEED overrides)");

  auto* r = app.add_subcommand("run", "simulate the machine for T_exe cycles");
  r->add_option("image", img)->required()->check(CLI::ExistingFile);
  r->add_option("qtab", qtab)->required()->check(CLI::ExistingFile);
  r->add_option("--input", inputs);
  r->add_option("--qinit", qinit, "q=010 or q[2]=1");
  r->add_option("--dump-state", dump_state, ".qst file");
  r->add_flag("--trace", trace);

  auto* o = app.add_subcommand("oracle", "dense reference state");
  o->add_option("source", src)->required()->check(CLI::ExistingFile);
  o->add_option("--input", inputs);
  o->add_option("--qinit", qinit);
  o->add_option("-o,--output", out);

  auto* b = app.add_subcommand("bench-qmux", "T_exe of the multiplexor against n and block length");
  b->add_option("--n-min", n_lo);
  b->add_option("--n-max", n_hi);
  b->add_option("--len", lens)->delimiter(',');
  b->add_option("-o,--output", out, "CSV file");

  auto* g = app.add_subcommand("corpus", "print a corpus program");
  g->add_option("name", corpus_name)->required()->check(CLI::IsMember({"ghz", "mcg", "qmux", "qsp"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c) return cmd_compile(src, emit, out, inputs);
    if (*ck) return cmd_check(src, inputs);
    if (*e) return cmd_eval(img, inputs, tprac, out, dump_qif, sched, seed);
    if (*r) return cmd_run(img, qtab, inputs, qinit, dump_state, trace);
    if (*o) return cmd_oracle(src, inputs, qinit, out);
    if (*b) return cmd_bench(n_lo, n_hi, lens, out);
    if (*g) {
      std::mt19937_64 rng(corpus::seed_from_env(1));
      if (corpus_name == "ghz") std::cout << corpus::ghz_source();
      if (corpus_name == "mcg") std::cout << corpus::mcg_source("X");
      if (corpus_name == "qmux") std::cout << corpus::qmux_source(corpus::random_gate_lists(4, 4, 2, rng));
      if (corpus_name == "qsp") std::cout << corpus::qsp_source(3, corpus::random_amplitudes(3, rng));
      return Ok;
    }
  } catch (const TimedOut& ex) {
    std::cerr << "timeout: " << ex.what() << "\n";
    return Timeout;
  } catch (const SyntaxError& ex) {
    std::cerr << ex.what() << "\n";
    return CompileErr;
  } catch (const LangError& ex) {
    std::cerr << ex.span.line << ":" << ex.span.col << ": " << ex.what() << "\n";
    return CompileErr;
  } catch (const TranslateError& ex) {
    std::cerr << "translate: " << ex.what() << "\n";
    return CompileErr;
  } catch (const AsmError& ex) {
    std::cerr << "assemble: " << ex.what() << "\n";
    return CompileErr;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return Fault;
  }
  return Ok;
}
