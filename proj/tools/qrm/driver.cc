#include "driver.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "qrm/assembler.h"
#include "qrm/corpus.h"
#include "qrm/frontend.h"

namespace qrm::driver {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

namespace {

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string bits(const Machine& m, const Config& c, const std::vector<QVar>& qvars) {
  std::string s;
  for (const auto& q : qvars) s += std::to_string(m.mem(c, q.address));
  return s;
}

}  // namespace

Image load_any(const std::string& path, const ImageConfig& cfg) {
  if (ends_with(path, ".rqc")) return compile(read_file(path), cfg).image;
  if (ends_with(path, ".qasm") || ends_with(path, ".s")) return assemble(parse_asm(read_file(path)), cfg);
  return load_image(path);
}

std::map<std::string, Word> parse_inputs(const std::vector<std::string>& kv) {
  std::map<std::string, Word> out;
  for (const auto& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected name=value, got " + s);
    out[s.substr(0, eq)] = static_cast<Word>(std::stoll(s.substr(eq + 1), nullptr, 0));
  }
  return out;
}

Eigen::VectorXcd basis_state(const std::vector<VarKey>& qvars, const std::vector<std::string>& init) {
  const int n = static_cast<int>(qvars.size());
  std::vector<int> val(n, 0);
  for (const auto& s : init) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected var=bits, got " + s);
    std::string lhs = s.substr(0, eq), rhs = s.substr(eq + 1);
    std::vector<int> pos;
    auto br = lhs.find('[');
    if (br != std::string::npos) {
      VarKey k{lhs.substr(0, br), static_cast<Word>(std::stoul(lhs.substr(br + 1)))};
      auto it = std::find(qvars.begin(), qvars.end(), k);
      if (it == qvars.end()) throw std::invalid_argument(lhs + " is not a quantum variable");
      pos.push_back(static_cast<int>(it - qvars.begin()));
    } else {
      for (int i = 0; i < n; ++i)
        if (qvars[i].name == lhs) pos.push_back(i);
    }
    if (pos.size() != rhs.size())
      throw std::invalid_argument(lhs + " has " + std::to_string(pos.size()) + " qubits, got " +
                                  std::to_string(rhs.size()) + " bits");
    for (size_t i = 0; i < pos.size(); ++i) {
      if (rhs[i] != '0' && rhs[i] != '1') throw std::invalid_argument("bad bit in " + s);
      val[pos[i]] = rhs[i] - '0';
    }
  }
  Eigen::Index idx = 0;
  for (int i = 0; i < n; ++i) idx = idx << 1 | val[i];
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  psi[idx] = 1;
  return psi;
}

void write_qst(std::ostream& os, const Machine& m, const std::vector<QVar>& qvars) {
  std::set<Word> qaddr;
  for (const auto& q : qvars) qaddr.insert(q.address);
  std::vector<std::tuple<std::string, std::string, Complex>> rows;
  for (const auto& b : m.branches()) {
    Config rest = b.config;
    std::erase_if(rest.delta, [&](const auto& e) { return qaddr.count(e.first) > 0; });
    rows.emplace_back(rest.fingerprint(), bits(m, b.config, qvars), b.amp);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  os << "# qst/1";
  for (const auto& q : qvars) os << ' ' << VarKey{q.name, q.index}.str();
  os << '\n';
  char buf[64];
  for (const auto& [f, s, a] : rows) {
    std::snprintf(buf, sizeof buf, " %.12f %.12f\n", a.real(), a.imag());
    os << f << ' ' << s << buf;
  }
}

void write_qst(std::ostream& os, const std::vector<VarKey>& qvars, const Eigen::VectorXcd& psi) {
  const int n = static_cast<int>(qvars.size());
  os << "# qst/1";
  for (const auto& q : qvars) os << ' ' << q.str();
  os << '\n';
  char buf[64];
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    if (std::abs(psi[j]) < 1e-12) continue;
    std::string s(n, '0');
    for (int i = 0; i < n; ++i) s[i] = (j >> (n - 1 - i) & 1) ? '1' : '0';
    std::snprintf(buf, sizeof buf, " %.12f %.12f\n", psi[j].real(), psi[j].imag());
    os << "- " << s << buf;
  }
}

BenchRow bench_qmux(int n, int len) {
  auto block = corpus::uniform_gate_list(len, 1);
  BenchRow row{n, len};
  // 64 blocks of 16 gates outgrow the default 2^16 words
  ImageConfig cfg;
  cfg.n_qram = 1u << 20;
  auto c = compile(corpus::qmux_source(std::vector<corpus::GateList>(size_t{1} << n, block)), cfg);
  auto r = evaluate(c.image, {{"n", static_cast<Word>(n)}});
  if (r.timeout) throw EvalError("partial evaluation timed out");
  row.t_exe = r.t_exe;
  row.work = r.work;
  row.parallel_depth = r.parallel_depth;
  row.table_nodes = r.table.size();
  // n = 0 runs the single block with no qif around it
  auto one = compile(corpus::qmux_source({block}));
  auto r1 = evaluate(one.image, {{"n", 0}});
  row.t_block = r1.t_exe;
  row.baseline = r1.t_exe << n;
  return row;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "n,len,t_exe,t_block,baseline,work,parallel_depth,table_nodes\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.len << ',' << r.t_exe << ',' << r.t_block << ',' << r.baseline << ','
       << r.work << ',' << r.parallel_depth << ',' << r.table_nodes << '\n';
}

}  // namespace qrm::driver
