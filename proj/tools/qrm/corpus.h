#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

namespace qrm::corpus {

// One gate application inside a multiplexor block; targets are 1-based
// indices into the data register p.
struct GateOp {
  std::string gate;
  std::vector<double> params;
  std::vector<int> targets;
};
using GateList = std::vector<GateOp>;

std::string ghz_source();
// U is applied to q[n] when q[1..n-1] are all 1.
std::string mcg_source(const std::string& gate = "X");
// Q[x] runs lists[x]; lists.size() must be a power of two.
std::string qmux_source(const std::vector<GateList>& lists);
// Prepares sum_j alpha_j |j> on q[1..n], q[1] most significant.
std::string qsp_source(int n, const std::vector<std::complex<double>>& alpha);

struct Rotation {
  double theta;  // Ry angle
  double beta;   // relative phase
};
// Angles for the node at depth k with heap index x (root is k=0, x=1).
Rotation qsp_rotation(int n, const std::vector<std::complex<double>>& alpha, int k, long x);

std::vector<GateList> random_gate_lists(int count, int max_len, int data_qubits,
                                        std::mt19937_64& rng);
GateList uniform_gate_list(int len, int data_qubits);
std::vector<std::complex<double>> random_amplitudes(int n, std::mt19937_64& rng);

// Seed from QRM_SEED, else the given default.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace qrm::corpus
