#pragma once

#include <string>

#include "qrm/ast.h"

namespace qrm {

// Structural properties of the simplified syntax, checked by a scanner.
struct TransformFlags {
  bool no_blocks = false;
  bool qif_branches_are_calls = false;  // each branch is a call or skip
  bool conditions_are_variables = false;  // if/while conditions and call actuals
  bool assignments_unary = false;
  bool subscripts_are_variables = false;
  bool exprs_small = false;  // `a`, `op a` or `a op b` on atoms

  bool all() const {
    return no_blocks && qif_branches_are_calls && conditions_are_variables && assignments_unary &&
           subscripts_are_variables && exprs_small;
  }
};

TransformFlags scan_flags(const Program& p);

struct TransformedProgram {
  Program program;
  TransformFlags flags;
};

// Fresh names are __t<k>, numbered above any __t<k> already in the program,
// so the passes can run separately without collisions.
class FreshNames {
 public:
  explicit FreshNames(const Program& p);
  std::string next();

 private:
  int k_ = 0;
};

Program lift_qif_branches(const Program& p);
Program unroll_blocks(const Program& p);
Program simplify_conditions(const Program& p);
Program serialize_assignments(const Program& p);
Program flatten_subscripts(const Program& p);
Program reduce_exprs(const Program& p);

// All six passes in order.
TransformedProgram transform(const Program& p);

}  // namespace qrm
