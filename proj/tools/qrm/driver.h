#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qrm/machine.h"
#include "qrm/oracle.h"
#include "qrm/pipeline.h"

namespace qrm::driver {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// .rqc is compiled, .qasm/.s is assembled, anything else is read as a
// binary image.
Image load_any(const std::string& path, const ImageConfig& cfg = {});

// "n=3" pairs.
std::map<std::string, Word> parse_inputs(const std::vector<std::string>& kv);

// Basis state from "q=010" (bits in ascending subscript order over the
// variables named q) or "q[2]=1". Unlisted variables start at 0.
Eigen::VectorXcd basis_state(const std::vector<VarKey>& qvars, const std::vector<std::string>& init);

// .qst: one line per basis configuration, sorted.
//   <fingerprint> <bits over qvars> <re> <im>
// The fingerprint covers everything except the quantum-variable words, so
// a disentangled run shows a single fingerprint. The oracle prints "-".
void write_qst(std::ostream& os, const Machine& m, const std::vector<QVar>& qvars);
void write_qst(std::ostream& os, const std::vector<VarKey>& qvars, const Eigen::VectorXcd& psi);

struct BenchRow {
  int n = 0;
  int len = 0;                // gates per multiplexed block
  std::uint64_t t_exe = 0;    // cycles of the compiled multiplexor
  std::uint64_t t_block = 0;  // cycles of one block run on its own
  std::uint64_t baseline = 0;  // blocks run one after another
  std::uint64_t work = 0;
  std::uint64_t parallel_depth = 0;
  int table_nodes = 0;
};

// Multiplexor with the same block of len gates for every x.
BenchRow bench_qmux(int n, int len);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace qrm::driver
