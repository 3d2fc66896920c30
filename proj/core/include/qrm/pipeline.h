#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "qrm/assembler.h"
#include "qrm/ast.h"
#include "qrm/machine.h"
#include "qrm/mid.h"
#include "qrm/partial_eval.h"
#include "qrm/semantics.h"
#include "qrm/transforms.h"

namespace qrm {

struct Compiled {
  Program source;
  TransformedProgram hl;
  MidProgram mid;
  LowProgram low;
  Image image;
};

// parse, transform, translate, lower, assemble
Compiled compile(const std::string& src, const ImageConfig& cfg = {});
Compiled compile(const Program& p, const ImageConfig& cfg = {});

struct Execution {
  EvalResult eval;
  Extraction result;
  CostCounters costs;
  double max_norm_error = 0;
  bool finished = false;
};

// Partial evaluation then T_exe cycles on the machine. psi is over
// eval.qvars (empty: all zero). Throws EvalError on timeout.
Execution execute(const Image& img, const std::map<std::string, Word>& inputs,
                  const Eigen::VectorXcd& psi = {}, const EvalOptions& eopt = {},
                  const MachineOptions& mopt = {});

std::vector<VarKey> var_keys(const std::vector<QVar>& qvars);
ClassicalState classical_inputs(const std::map<std::string, Word>& inputs);

}  // namespace qrm
