#include "qrm/corpus.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "qrm/gates.h"

namespace qrm::corpus {

std::string ghz_source() {
  return R"(// GHZ state on q[1..n]
proc Pmain(n) <=
  if n = 1 then
    H[q[n]]
  else
    Pmain(n - 1);
    CNOT[q[n - 1], q[n]]
  fi
)";
}

std::string mcg_source(const std::string& gate) {
  return "// U on q[n] controlled by q[1..n-1]\n"
         "proc Pmain(n) <= P(1, n)\n"
         "proc P(m, n) <=\n"
         "  if m = n then\n"
         "    " + gate + "[q[n]]\n"
         "  else\n"
         "    qif[q[m]] (|0> -> skip) [] (|1> -> P(m + 1, n)) fiq\n"
         "  fi\n";
}

namespace {

std::string gate_text(const GateOp& g) {
  std::string s = g.gate;
  if (!g.params.empty()) {
    s += "(";
    for (size_t i = 0; i < g.params.size(); ++i) s += (i ? ", " : "") + format_double(g.params[i]);
    s += ")";
  }
  s += "[";
  for (size_t i = 0; i < g.targets.size(); ++i)
    s += (i ? ", p[" : "p[") + std::to_string(g.targets[i]) + "]";
  return s + "]";
}

}  // namespace

std::string qmux_source(const std::vector<GateList>& lists) {
  size_t n = 0;
  while ((size_t{1} << n) < lists.size()) ++n;
  if ((size_t{1} << n) != lists.size()) throw std::invalid_argument("need 2^n gate lists");
  std::ostringstream os;
  os << "// quantum multiplexor: Q[x] on p when q[n..1] = x\n"
        "proc Pmain(n) <= P(n, 0)\n"
        "proc P(k, x) <=\n"
        "  if k = 0 then\n"
        "    Q[x]\n"
        "  else\n"
        "    qif[q[k]] (|0> -> P(k - 1, 2 * x)) [] (|1> -> P(k - 1, 2 * x + 1)) fiq\n"
        "  fi\n";
  for (size_t x = 0; x < lists.size(); ++x) {
    os << "proc Q[" << x << "]() <=";
    if (lists[x].empty()) os << " skip";
    for (size_t i = 0; i < lists[x].size(); ++i) os << (i ? ";\n  " : "\n  ") << gate_text(lists[x][i]);
    os << "\n";
  }
  return os.str();
}

Rotation qsp_rotation(int n, const std::vector<std::complex<double>>& alpha, int k, long x) {
  const long xp = x - (1L << k);
  const long u = (1L << (n - k)) * xp, v = (1L << (n - k)) * (xp + 1), w = (u + v) / 2;
  auto S = [&](long l, long r) {
    double s = 0;
    for (long j = l; j <= r; ++j) s += std::norm(alpha[j]);
    return s;
  };
  const double den = S(u, v - 1);
  double gamma = den > 0 ? S(u, w - 1) / den : 1.0;
  gamma = std::min(1.0, std::max(0.0, gamma));
  Rotation r;
  r.theta = 2 * std::acos(std::sqrt(gamma));
  r.beta = std::arg(alpha[w]) - std::arg(alpha[u]);
  return r;
}

std::string qsp_source(int n, const std::vector<std::complex<double>>& alpha) {
  if (alpha.size() != (size_t{1} << n)) throw std::invalid_argument("need 2^n amplitudes");
  std::ostringstream os;
  os << "// state preparation on q[1..n]; Q[x] is the heap-indexed rotation\n"
        "proc Pmain(n) <= P(0, n, 1)\n"
        "proc P(k, n, x) <=\n"
        "  if k != n then\n"
        "    Q[x](k);\n"
        "    qif[q[k + 1]] (|0> -> P(k + 1, n, 2 * x)) [] (|1> -> P(k + 1, n, 2 * x + 1)) fiq\n"
        "  fi\n";
  for (int k = 0; k < n; ++k)
    for (long x = 1L << k; x < (2L << k); ++x) {
      Rotation r = qsp_rotation(n, alpha, k, x);
      os << "proc Q[" << x << "](k) <= Ry(" << format_double(r.theta) << ")[q[k + 1]]; Ph("
         << format_double(r.beta) << ")[q[k + 1]]\n";
    }
  return os.str();
}

std::vector<GateList> random_gate_lists(int count, int max_len, int data_qubits,
                                        std::mt19937_64& rng) {
  static const char* one[] = {"X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "Rx", "Ry", "Rz", "Ph"};
  static const char* two[] = {"CNOT", "CZ", "SWAP"};
  std::uniform_int_distribution<int> len(0, max_len), pick1(0, 11), pick2(0, 2),
      q(1, data_qubits);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::vector<GateList> out(count);
  for (auto& l : out) {
    int m = len(rng);
    for (int i = 0; i < m; ++i) {
      GateOp g;
      if (data_qubits >= 2 && rng() % 4 == 0) {
        g.gate = two[pick2(rng)];
        int a = q(rng), b = q(rng);
        while (b == a) b = q(rng);
        g.targets = {a, b};
      } else {
        g.gate = one[pick1(rng)];
        if (is_param_gate(g.gate)) g.params = {ang(rng)};
        g.targets = {q(rng)};
      }
      l.push_back(g);
    }
  }
  return out;
}

GateList uniform_gate_list(int len, int data_qubits) {
  GateList l;
  for (int i = 0; i < len; ++i) l.push_back({i % 2 ? "H" : "X", {}, {1 + i % data_qubits}});
  return l;
}

std::vector<std::complex<double>> random_amplitudes(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> a(size_t{1} << n);
  double s = 0;
  for (auto& x : a) {
    x = {g(rng), g(rng)};
    s += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(s);
  return a;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  if (const char* s = std::getenv("QRM_SEED")) return std::strtoull(s, nullptr, 10);
  return fallback;
}

}  // namespace qrm::corpus
