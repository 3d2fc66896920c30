#include "qrm/ast.h"

#include <algorithm>

namespace qrm {

ExprPtr mk_const(Word v, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->value = v;
  e->span = sp;
  return e;
}

ExprPtr mk_var(std::string name, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  e->span = sp;
  return e;
}

ExprPtr mk_index(std::string name, ExprPtr sub, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Index;
  e->name = std::move(name);
  e->a = std::move(sub);
  e->span = sp;
  return e;
}

ExprPtr mk_unary(Op op, ExprPtr a, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->op = op;
  e->a = std::move(a);
  e->span = sp;
  return e;
}

ExprPtr mk_binary(Op op, ExprPtr a, ExprPtr b, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  e->span = sp;
  return e;
}

ExprPtr ref_to_expr(const Ref& r) {
  return r.index ? mk_index(r.name, r.index, r.span) : mk_var(r.name, r.span);
}

StmtPtr mk_skip(Span sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  return s;
}

StmtPtr mk_assign(std::vector<Ref> targets, std::vector<ExprPtr> exprs, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->targets = std::move(targets);
  s->exprs = std::move(exprs);
  s->span = sp;
  return s;
}

StmtPtr mk_gate(std::string gate, std::vector<double> params, std::vector<Ref> qargs, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Gate;
  s->gate = std::move(gate);
  s->gate_params = std::move(params);
  s->qargs = std::move(qargs);
  s->span = sp;
  return s;
}

StmtPtr mk_seq(std::vector<StmtPtr> items, Span sp) {
  std::vector<StmtPtr> flat;
  for (auto& it : items) {
    if (!it || it->kind == StmtKind::Skip) continue;
    if (it->kind == StmtKind::Seq)
      flat.insert(flat.end(), it->body.begin(), it->body.end());
    else
      flat.push_back(it);
  }
  if (flat.empty()) return mk_skip(sp);
  if (flat.size() == 1) return flat[0];
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Seq;
  s->body = std::move(flat);
  s->span = sp.line ? sp : s->body[0]->span;
  return s;
}

StmtPtr mk_call(Ref callee, std::vector<ExprPtr> actuals, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Call;
  s->ref = std::move(callee);
  s->exprs = std::move(actuals);
  s->span = sp;
  return s;
}

StmtPtr mk_if(ExprPtr cond, StmtPtr then_s, StmtPtr else_s, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->cond = std::move(cond);
  s->body = {std::move(then_s), std::move(else_s)};
  s->span = sp;
  return s;
}

StmtPtr mk_while(ExprPtr cond, StmtPtr body, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::While;
  s->cond = std::move(cond);
  s->body = {std::move(body)};
  s->span = sp;
  return s;
}

StmtPtr mk_block(std::vector<Ref> locals, std::vector<ExprPtr> inits, StmtPtr body, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Block;
  s->targets = std::move(locals);
  s->exprs = std::move(inits);
  s->body = {std::move(body)};
  s->span = sp;
  return s;
}

StmtPtr mk_qif(Ref coin, StmtPtr b0, StmtPtr b1, Span sp) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Qif;
  s->ref = std::move(coin);
  s->body = {std::move(b0), std::move(b1)};
  s->span = sp;
  return s;
}

std::string Decl::label() const {
  return index ? name + "[" + std::to_string(*index) + "]" : name;
}

const Decl* Program::find(const std::string& name, std::optional<Word> index) const {
  for (const auto& d : decls)
    if (d.name == name && d.index == index) return &d;
  return nullptr;
}

bool Program::is_family(const std::string& name) const {
  for (const auto& d : decls)
    if (d.name == name && d.index) return true;
  return false;
}

Word Program::family_size(const std::string& name) const {
  Word n = 0;
  bool fam = false;
  for (const auto& d : decls)
    if (d.name == name && d.index) {
      fam = true;
      n = std::max<Word>(n, *d.index + 1);
    }
  return fam ? n : 1;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Const: return a->value == b->value;
    case Expr::Kind::Var: return a->name == b->name;
    case Expr::Kind::Index: return a->name == b->name && equal(a->a, b->a);
    case Expr::Kind::Unary: return a->op == b->op && equal(a->a, b->a);
    case Expr::Kind::Binary: return a->op == b->op && equal(a->a, b->a) && equal(a->b, b->b);
  }
  return false;
}

bool equal(const Ref& a, const Ref& b) { return a.name == b.name && equal(a.index, b.index); }

namespace {

template <class T, class F>
bool all_equal(const std::vector<T>& x, const std::vector<T>& y, F eq) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (!eq(x[i], y[i])) return false;
  return true;
}

}  // namespace

bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  auto eref = [](const Ref& x, const Ref& y) { return equal(x, y); };
  auto eexp = [](const ExprPtr& x, const ExprPtr& y) { return equal(x, y); };
  auto estm = [](const StmtPtr& x, const StmtPtr& y) { return equal(x, y); };
  return all_equal(a->targets, b->targets, eref) && all_equal(a->exprs, b->exprs, eexp) &&
         a->gate == b->gate && a->gate_params == b->gate_params &&
         all_equal(a->qargs, b->qargs, eref) && equal(a->ref, b->ref) && equal(a->cond, b->cond) &&
         all_equal(a->body, b->body, estm);
}

bool equal(const Program& a, const Program& b) {
  if (a.main != b.main || a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i) {
    const Decl &x = a.decls[i], &y = b.decls[i];
    if (x.name != y.name || x.index != y.index || x.formals != y.formals || !equal(x.body, y.body))
      return false;
  }
  return true;
}

void collect_expr_names(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Index)
    if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
  collect_expr_names(e->a, out);
  collect_expr_names(e->b, out);
}

}  // namespace qrm
