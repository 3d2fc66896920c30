#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/ast.h"

namespace qrm {

// A resolved variable: base name plus evaluated subscript.
struct VarKey {
  std::string name;
  std::optional<Word> index;

  auto operator<=>(const VarKey&) const = default;
  bool operator==(const VarKey&) const = default;
  std::string str() const;
};

enum class ValueKind { Uint, Int, Bit };

class ClassicalState {
 public:
  Word get(const VarKey& k) const;
  void set(const VarKey& k, Word v);
  // Width-checked view; throws std::domain_error for a Bit holding > 1.
  long long view(const VarKey& k, ValueKind kind) const;

  const std::map<VarKey, Word>& values() const { return vals_; }
  bool operator==(const ClassicalState& o) const;

 private:
  std::map<VarKey, Word> vals_;  // zero entries are not stored
};

struct LangError : std::runtime_error {
  Span span;
  LangError(const std::string& m, Span sp) : std::runtime_error(m), span(sp) {}
};
struct NonTermination : LangError {
  using LangError::LangError;
};
struct LookupError : LangError {
  using LangError::LangError;
};

Word eval(const ExprPtr& e, const ClassicalState& sigma);
VarKey resolve(const Ref& r, const ClassicalState& sigma);

inline constexpr long kDefaultStepBound = 1'000'000;

struct WalkOptions {
  long step_bound = kDefaultStepBound;
  // After a call returns, put the classical state back as it was before the
  // call. This models the end-of-body uncomputation of compiled code.
  bool restore_after_call = false;
};

// Classical execution of a statement (gates are no-ops, both qif branches run
// from the same state and the state after branch 0 is kept).
void exec_classical(const StmtPtr& s, ClassicalState& sigma, const Program& p,
                    const WalkOptions& opt = {});

// Quantum variables a statement may touch, unrolled under sigma.
std::set<VarKey> qv(const StmtPtr& s, const ClassicalState& sigma, const Program& p,
                    const WalkOptions& opt = {});
// Free changed classical variables, unrolled under sigma.
std::set<VarKey> fcv(const StmtPtr& s, const ClassicalState& sigma, const Program& p,
                     const WalkOptions& opt = {});

struct ConditionReport {
  bool ok = true;
  int condition = 0;  // 1, 2 or 3 when violated
  Span span;
  std::string message;
};

struct CheckOptions {
  WalkOptions walk;
  // For transformed programs: procedure bodies are uncomputed at their end,
  // so Condition 3 holds by construction and is skipped.
  bool bodies_uncomputed = false;
};

// Runs the main procedure under sigma0 (its formals already bound in
// sigma0) and checks Conditions 1-3 at every reachable qif and call.
ConditionReport check_conditions(const Program& p, const ClassicalState& sigma0,
                                 const CheckOptions& opt = {});

// The statement `Pmain(formals)` used as the program's entry point.
StmtPtr main_call(const Program& p);

}  // namespace qrm
