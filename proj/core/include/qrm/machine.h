#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrm/gates.h"
#include "qrm/image.h"
#include "qrm/isa.h"
#include "qrm/partial_eval.h"

namespace qrm {

// One basis configuration: the register file plus the words that differ
// from the loaded image, sorted by address.
struct Config {
  Regs regs{};
  std::vector<std::pair<Word, Word>> delta;

  bool operator==(const Config&) const = default;
  std::size_t hash() const;
  std::string fingerprint() const;  // short hex digest
};

struct Branch {
  Config config;
  Complex amp;
};

// Elementary operations, counted per branch and cycle. A cycle costs the
// maximum over its branches, as they run in parallel.
struct CostCounters {
  std::uint64_t cycles = 0;
  std::uint64_t reg_ops = 0;   // summed per-cycle maxima
  std::uint64_t qram_ops = 0;
  std::uint64_t max_reg_per_cycle = 0;
  std::uint64_t max_qram_per_cycle = 0;
  std::uint64_t max_ops_per_cycle = 0;  // register + QRAM + gate operations
};

struct CycleRecord {
  std::uint64_t cycle = 0;
  std::size_t branches = 0;
  std::vector<Word> pcs;  // distinct, sorted
  std::uint64_t reg_ops = 0, qram_ops = 0;
};

struct RunFault : std::runtime_error {
  std::uint64_t cycle;
  std::string fingerprint;
  RunFault(const std::string& m, std::uint64_t c, std::string f)
      : std::runtime_error("cycle " + std::to_string(c) + ", branch " + f + ": " + m),
        cycle(c),
        fingerprint(std::move(f)) {}
};

struct MachineOptions {
  double prune = 1e-12;     // drop amplitudes below this magnitude
  double norm_tol = 1e-9;   // fault when the norm drifts further
  bool trace = false;
};

class Machine {
 public:
  // img must already carry the evaluation result (see apply()).
  explicit Machine(Image img, MachineOptions opt = {});

  // Superposition over the listed quantum words; psi index bit (n-1-i)
  // is qvars[i]. An empty psi means |0...0>.
  void load(const std::vector<QVar>& qvars, const Eigen::VectorXcd& psi = {});

  void cycle();
  void run(std::uint64_t cycles);

  const std::vector<Branch>& branches() const { return state_; }
  const CostCounters& costs() const { return costs_; }
  const std::vector<CycleRecord>& trace() const { return trace_; }
  double norm() const;
  double max_norm_error() const { return max_norm_err_; }
  const Image& image() const { return img_; }

  Word mem(const Config& c, Word addr) const;
  // Every branch has executed finish (pc is one past it).
  bool finished() const;

 private:
  Image img_;
  MachineOptions opt_;
  std::vector<Branch> state_;
  CostCounters costs_;
  std::vector<CycleRecord> trace_;
  double max_norm_err_ = 0;
  Word finish_ = 0;

  void step(const Branch& b, std::vector<Branch>& out, std::uint64_t& reg, std::uint64_t& qram,
            bool& split);
};

struct Extraction {
  bool disentangled = false;
  Eigen::VectorXcd psi;
  std::string reason;  // why extraction failed
};

// Groups branches by everything except the quantum-variable words.
Extraction extract_qvar_state(const Machine& m, const std::vector<QVar>& qvars);

}  // namespace qrm
