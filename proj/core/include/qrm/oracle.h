#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qrm/gates.h"
#include "qrm/semantics.h"

namespace qrm {

// Naive reference interpreter: classical state plus a dense vector over the
// program's quantum variables. Basis index bit (n-1-i) is qvars[i], so the
// first variable is the most significant.
struct OracleState {
  ClassicalState sigma;
  std::vector<VarKey> qvars;
  Eigen::VectorXcd psi;

  int position(const VarKey& k) const;  // -1 when not a quantum variable
};

struct OracleError : LangError {
  using LangError::LangError;
};

struct OracleOptions {
  WalkOptions walk;
};

// Quantum variables reached from the main call under sigma0, sorted.
std::vector<VarKey> discover_qvars(const Program& p, const ClassicalState& sigma0,
                                   const WalkOptions& w = {});

void interpret(const StmtPtr& s, OracleState& st, const Program& p, const OracleOptions& opt = {});

// Runs the main call from the given state vector (sigma0 binds the main
// formals). psi0 empty means |0...0>.
OracleState run_oracle(const Program& p, const ClassicalState& sigma0,
                       const std::vector<VarKey>& qvars, Eigen::VectorXcd psi0 = {},
                       const OracleOptions& opt = {});

// Column j is the output for basis input j. Throws when the result is not
// unitary within 1e-9.
Eigen::MatrixXcd build_unitary(const Program& p, const ClassicalState& sigma0,
                               const std::vector<VarKey>& qvars, const OracleOptions& opt = {});

// |<a|b>|^2 for normalised vectors; insensitive to global phase.
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace qrm
