#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qrm {

using Complex = std::complex<double>;

// A named gate with its matrix. Two-qubit matrices index the basis as
// 2*first + second, so CNOT's control is its first operand.
struct Gate {
  std::string name;            // base name: H, CNOT, Ry, ...
  std::vector<double> params;  // angle for the rotation families
  int arity = 1;
  std::vector<Complex> matrix;  // row-major, 2x2 or 4x4

  std::string key() const;  // canonical spelling, e.g. "Ry(0.5)"
  Complex at(int row, int col) const { return matrix[row * (1 << arity) + col]; }
};

// Fixed base gates first (indices 0..11), then any parameterised gates a
// program uses. The index is the para field of uni/unib.
class GateTable {
 public:
  GateTable();  // the base table

  int size() const { return static_cast<int>(gates_.size()); }
  const Gate& operator[](int i) const { return gates_[i]; }
  const std::vector<Gate>& gates() const { return gates_; }

  // Index of the gate, adding it when it is a valid parameterised gate.
  int intern(const std::string& name, const std::vector<double>& params);
  std::optional<int> find(const std::string& key) const;
  void add_raw(Gate g) { gates_.push_back(std::move(g)); }
  void clear() { gates_.clear(); }

 private:
  std::vector<Gate> gates_;
};

inline constexpr int kMaxGates = 64;  // para field is 6 bits

bool is_base_gate(const std::string& name);
bool is_param_gate(const std::string& name);  // Rx, Ry, Rz, Ph
int gate_arity(const std::string& name);      // 0 when unknown
std::optional<Gate> make_gate(const std::string& name, const std::vector<double>& params);

std::string format_double(double v);  // shortest round-tripping text

}  // namespace qrm
