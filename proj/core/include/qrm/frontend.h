#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qrm/ast.h"

namespace qrm {

struct SyntaxError : std::runtime_error {
  Span span;
  SyntaxError(const std::string& m, Span sp)
      : std::runtime_error(std::to_string(sp.line) + ":" + std::to_string(sp.col) + ": " + m),
        span(sp) {}
};

// Parses .rqc text. The main procedure is the one named Pmain (or main),
// otherwise the first non-family declaration.
Program parse(std::string_view text);
StmtPtr parse_stmt(std::string_view text);
ExprPtr parse_expr(std::string_view text);

std::string print(const Program& p);
std::string print(const StmtPtr& s, int indent = 0);
std::string print(const ExprPtr& e);
std::string print(const Ref& r);

}  // namespace qrm
