#include "qrm/gates.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qrm {
namespace {

constexpr std::array<const char*, 12> kBase = {
    "I", "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "CNOT", "CZ", "SWAP"};

const Complex kI{0, 1};

std::vector<Complex> base_matrix(const std::string& n) {
  const double r = 1 / std::sqrt(2.0);
  const Complex t = std::polar(1.0, M_PI / 4);
  if (n == "I") return {1, 0, 0, 1};
  if (n == "X") return {0, 1, 1, 0};
  if (n == "Y") return {0, -kI, kI, 0};
  if (n == "Z") return {1, 0, 0, -1};
  if (n == "H") return {r, r, r, -r};
  if (n == "S") return {1, 0, 0, kI};
  if (n == "Sdg") return {1, 0, 0, -kI};
  if (n == "T") return {1, 0, 0, t};
  if (n == "Tdg") return {1, 0, 0, std::conj(t)};
  if (n == "CNOT") return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
  if (n == "CZ") return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
  if (n == "SWAP") return {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
  return {};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string Gate::key() const {
  if (params.empty()) return name;
  std::string s = name + "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) s += ",";
    s += format_double(params[i]);
  }
  return s + ")";
}

bool is_base_gate(const std::string& name) {
  for (const char* b : kBase)
    if (name == b) return true;
  return false;
}

bool is_param_gate(const std::string& name) {
  return name == "Rx" || name == "Ry" || name == "Rz" || name == "Ph";
}

int gate_arity(const std::string& name) {
  if (name == "CNOT" || name == "CZ" || name == "SWAP") return 2;
  if (is_base_gate(name) || is_param_gate(name)) return 1;
  return 0;
}

std::optional<Gate> make_gate(const std::string& name, const std::vector<double>& params) {
  Gate g;
  g.name = name;
  g.arity = gate_arity(name);
  if (g.arity == 0) return std::nullopt;
  if (is_base_gate(name)) {
    if (!params.empty()) return std::nullopt;
    g.matrix = base_matrix(name);
    return g;
  }
  if (params.size() != 1) return std::nullopt;
  const double th = params[0];
  g.params = params;
  const double c = std::cos(th / 2), s = std::sin(th / 2);
  if (name == "Rx") g.matrix = {c, -kI * s, -kI * s, c};
  else if (name == "Ry") g.matrix = {c, -s, s, c};
  else if (name == "Rz") g.matrix = {std::polar(1.0, -th / 2), 0, 0, std::polar(1.0, th / 2)};
  else g.matrix = {1, 0, 0, std::polar(1.0, th)};
  return g;
}

GateTable::GateTable() {
  for (const char* b : kBase) gates_.push_back(*make_gate(b, {}));
}

std::optional<int> GateTable::find(const std::string& key) const {
  for (int i = 0; i < size(); ++i)
    if (gates_[i].key() == key) return i;
  return std::nullopt;
}

int GateTable::intern(const std::string& name, const std::vector<double>& params) {
  auto g = make_gate(name, params);
  if (!g) throw std::invalid_argument("unknown gate " + name);
  if (auto i = find(g->key())) return *i;
  if (size() >= kMaxGates) throw std::length_error("gate table full");
  gates_.push_back(std::move(*g));
  return size() - 1;
}

}  // namespace qrm
