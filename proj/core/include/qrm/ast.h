#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrm/word.h"

namespace qrm {

struct Span {
  int line = 0;
  int col = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Index, Unary, Binary };
  Kind kind = Kind::Const;
  Word value = 0;    // Const
  std::string name;  // Var, Index
  Op op = Op::Add;   // Unary, Binary
  ExprPtr a, b;      // Index subscript in a; operands of Unary/Binary
  Span span;
};

ExprPtr mk_const(Word v, Span sp = {});
ExprPtr mk_var(std::string name, Span sp = {});
ExprPtr mk_index(std::string name, ExprPtr sub, Span sp = {});
ExprPtr mk_unary(Op op, ExprPtr a, Span sp = {});
ExprPtr mk_binary(Op op, ExprPtr a, ExprPtr b, Span sp = {});

// name or name[expr]; used for classical lvalues, quantum operands and
// procedure operands alike.
struct Ref {
  std::string name;
  ExprPtr index;  // null for a plain name
  Span span;

  bool scalar() const { return !index; }
};

ExprPtr ref_to_expr(const Ref& r);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

enum class StmtKind { Skip, Assign, Gate, Seq, Call, If, While, Block, Qif };

struct Stmt {
  StmtKind kind = StmtKind::Skip;
  Span span;
  // Assign: targets := exprs. Block: locals := exprs. Call: actuals in exprs.
  std::vector<Ref> targets;
  std::vector<ExprPtr> exprs;
  // Gate
  std::string gate;
  std::vector<double> gate_params;
  std::vector<Ref> qargs;
  // Call target, qif coin
  Ref ref;
  // If/While condition
  ExprPtr cond;
  // Seq items; If {then, else}; While {body}; Block {body}; Qif {b0, b1}
  std::vector<StmtPtr> body;
};

StmtPtr mk_skip(Span sp = {});
StmtPtr mk_assign(std::vector<Ref> targets, std::vector<ExprPtr> exprs, Span sp = {});
StmtPtr mk_gate(std::string gate, std::vector<double> params, std::vector<Ref> qargs, Span sp = {});
StmtPtr mk_seq(std::vector<StmtPtr> items, Span sp = {});  // flattens, drops skips
StmtPtr mk_call(Ref callee, std::vector<ExprPtr> actuals, Span sp = {});
StmtPtr mk_if(ExprPtr cond, StmtPtr then_s, StmtPtr else_s, Span sp = {});
StmtPtr mk_while(ExprPtr cond, StmtPtr body, Span sp = {});
StmtPtr mk_block(std::vector<Ref> locals, std::vector<ExprPtr> inits, StmtPtr body, Span sp = {});
StmtPtr mk_qif(Ref coin, StmtPtr b0, StmtPtr b1, Span sp = {});

struct Decl {
  std::string name;
  std::optional<Word> index;  // member of a procedure family Q[i]
  std::vector<std::string> formals;
  StmtPtr body;
  Span span;

  std::string label() const;  // "Q[3]" or "P"
};

struct Program {
  std::vector<Decl> decls;
  std::string main;  // name of the main procedure (not a family)

  const Decl* find(const std::string& name, std::optional<Word> index) const;
  const Decl* main_decl() const { return find(main, std::nullopt); }
  bool is_family(const std::string& name) const;
  // Largest member index + 1 for a family, 1 for a plain procedure.
  Word family_size(const std::string& name) const;
};

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const Ref& a, const Ref& b);
bool equal(const StmtPtr& a, const StmtPtr& b);
bool equal(const Program& a, const Program& b);

// Every name a statement or expression mentions, in first-use order.
void collect_expr_names(const ExprPtr& e, std::vector<std::string>& out);

}  // namespace qrm
