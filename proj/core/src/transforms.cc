#include "qrm/transforms.h"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace qrm {
namespace {

StmtPtr clone_with(const StmtPtr& s, std::vector<StmtPtr> body) {
  auto c = std::make_shared<Stmt>(*s);
  c->body = std::move(body);
  return c;
}

bool bare_var(const ExprPtr& e) { return e && e->kind == Expr::Kind::Var; }
bool atom(const ExprPtr& e) {
  return e->kind == Expr::Kind::Const || e->kind == Expr::Kind::Var ||
         (e->kind == Expr::Kind::Index && bare_var(e->a));
}
bool small(const ExprPtr& e) {
  if (atom(e)) return true;
  if (e->kind == Expr::Kind::Unary) return atom(e->a);
  return e->kind == Expr::Kind::Binary && atom(e->a) && atom(e->b);
}

// ---- generic walks -------------------------------------------------------

void each_stmt(const StmtPtr& s, const std::function<void(const Stmt&)>& f) {
  f(*s);
  for (const auto& b : s->body) each_stmt(b, f);
}

void each_expr(const ExprPtr& e, const std::function<void(const Expr&)>& f) {
  if (!e) return;
  f(*e);
  each_expr(e->a, f);
  each_expr(e->b, f);
}

void each_expr(const Stmt& s, const std::function<void(const Expr&)>& f) {
  for (const auto& r : s.targets) each_expr(r.index, f);
  for (const auto& e : s.exprs) each_expr(e, f);
  for (const auto& r : s.qargs) each_expr(r.index, f);
  each_expr(s.ref.index, f);
  each_expr(s.cond, f);
}

Program map_bodies(const Program& p, const std::function<StmtPtr(const StmtPtr&)>& f) {
  Program out = p;
  for (auto& d : out.decls) d.body = f(d.body);
  return out;
}

bool assigns(const StmtPtr& s, const std::string& name) {
  bool hit = false;
  each_stmt(s, [&](const Stmt& x) {
    if (x.kind == StmtKind::Assign || x.kind == StmtKind::Block)
      for (const auto& t : x.targets)
        if (t.scalar() && t.name == name) hit = true;
  });
  return hit;
}

// ---- pass 1 ---------------------------------------------------------------

struct Lifter {
  FreshNames& fresh;
  std::vector<Decl> added;

  StmtPtr run(const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Seq:
      case StmtKind::If:
      case StmtKind::While:
      case StmtKind::Block: {
        std::vector<StmtPtr> b;
        for (const auto& c : s->body) b.push_back(run(c));
        return clone_with(s, b);
      }
      case StmtKind::Qif: {
        std::vector<StmtPtr> b;
        for (const auto& c : s->body) {
          StmtPtr x = run(c);
          if (x->kind != StmtKind::Skip && x->kind != StmtKind::Call) {
            Decl d;
            d.name = fresh.next();
            d.body = x;
            d.span = x->span;
            added.push_back(d);
            x = mk_call(Ref{d.name, nullptr, x->span}, {}, x->span);
          }
          b.push_back(x);
        }
        return clone_with(s, b);
      }
      default: return s;
    }
  }
};

// ---- pass 2 ---------------------------------------------------------------

using Renaming = std::map<std::string, std::string>;

ExprPtr rename(const ExprPtr& e, const Renaming& m) {
  if (!e) return e;
  auto n = std::make_shared<Expr>(*e);
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Index)
    if (auto it = m.find(e->name); it != m.end()) n->name = it->second;
  n->a = rename(e->a, m);
  n->b = rename(e->b, m);
  return n;
}

Ref rename(const Ref& r, const Renaming& m) {
  Ref n = r;
  if (auto it = m.find(r.name); it != m.end()) n.name = it->second;
  n.index = rename(r.index, m);
  return n;
}

struct Unroller {
  FreshNames& fresh;
  Program& prog;
  std::set<std::string> done;
  std::vector<std::string> introduced;

  StmtPtr run(const StmtPtr& s, const Renaming& m) {
    auto c = std::make_shared<Stmt>(*s);
    for (auto& t : c->targets) t = rename(t, m);
    for (auto& e : c->exprs) e = rename(e, m);
    for (auto& q : c->qargs) q = rename(q, m);
    if (s->kind != StmtKind::Call) c->ref = rename(s->ref, m);
    else c->ref.index = rename(s->ref.index, m);
    c->cond = rename(s->cond, m);
    if (s->kind == StmtKind::Call && lifted(s->ref.name)) decl(s->ref.name, m);
    if (s->kind != StmtKind::Block) {
      for (auto& b : c->body) b = run(b, m);
      return c;
    }
    Renaming inner = m;
    std::vector<Ref> locals;
    for (const auto& t : s->targets) {
      if (!t.scalar()) throw std::invalid_argument("array locals are not supported: " + t.name);
      std::string f = fresh.next();
      introduced.push_back(f);
      inner[t.name] = f;
      locals.push_back(Ref{f, nullptr, t.span});
    }
    // inits are evaluated in the outer scope
    return mk_seq({mk_assign(locals, c->exprs, s->span), run(s->body[0], inner)}, s->span);
  }

  // A branch lifted out of a block still sees the block's locals, so it is
  // renamed with the scope of its (single) call site.
  bool lifted(const std::string& n) const {
    const Decl* d = prog.find(n, std::nullopt);
    return d && d->formals.empty() && n.rfind("__t", 0) == 0;
  }

  void decl(const std::string& name, const Renaming& m) {
    if (!done.insert(name).second) return;
    Decl* d = nullptr;
    for (auto& x : prog.decls)
      if (x.name == name && !x.index) d = &x;
    std::vector<std::string> saved;
    std::swap(saved, introduced);
    StmtPtr b = run(d->body, m);
    if (!introduced.empty()) {
      std::vector<Ref> zs;
      std::vector<ExprPtr> zero;
      for (const auto& n : introduced) {
        zs.push_back(Ref{n, nullptr, d->span});
        zero.push_back(mk_const(0, d->span));
      }
      b = mk_seq({mk_assign(zs, zero, d->span), b}, d->span);
    }
    d->body = b;
    std::swap(saved, introduced);
  }
};

// ---- pass 3 ---------------------------------------------------------------

struct CondSimplifier {
  FreshNames& fresh;

  // Hoists non-variable actuals of a call into `pre`.
  StmtPtr call(const StmtPtr& s, std::vector<StmtPtr>& pre) {
    auto c = std::make_shared<Stmt>(*s);
    for (auto& a : c->exprs) {
      if (bare_var(a)) continue;
      std::string t = fresh.next();
      pre.push_back(mk_assign({Ref{t, nullptr, a->span}}, {a}, s->span));
      a = mk_var(t, a->span);
    }
    return c;
  }

  StmtPtr run(const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Seq: {
        std::vector<StmtPtr> b;
        for (const auto& c : s->body) b.push_back(run(c));
        return mk_seq(b, s->span);
      }
      case StmtKind::Block: return clone_with(s, {run(s->body[0])});
      case StmtKind::If: {
        StmtPtr a = run(s->body[0]), b = run(s->body[1]);
        if (bare_var(s->cond) && !assigns(a, s->cond->name) && !assigns(b, s->cond->name))
          return clone_with(s, {a, b});
        std::string t = fresh.next();
        return mk_seq({mk_assign({Ref{t, nullptr, s->span}}, {s->cond}, s->span),
                       mk_if(mk_var(t, s->span), a, b, s->span)},
                      s->span);
      }
      case StmtKind::While: {
        StmtPtr b = run(s->body[0]);
        if (bare_var(s->cond) && s->cond->name.rfind("__", 0) == 0) return clone_with(s, {b});
        std::string t = fresh.next();
        auto hoist = [&] { return mk_assign({Ref{t, nullptr, s->span}}, {s->cond}, s->span); };
        return mk_seq({hoist(), mk_while(mk_var(t, s->span), mk_seq({b, hoist()}, s->span), s->span)},
                      s->span);
      }
      case StmtKind::Call: {
        std::vector<StmtPtr> pre;
        StmtPtr c = call(s, pre);
        pre.push_back(c);
        return mk_seq(pre, s->span);
      }
      case StmtKind::Qif: {
        std::vector<StmtPtr> pre, b;
        for (const auto& c : s->body)
          b.push_back(c->kind == StmtKind::Call ? call(c, pre) : run(c));
        pre.push_back(clone_with(s, b));
        return mk_seq(pre, s->span);
      }
      default: return s;
    }
  }
};

// ---- pass 4 ---------------------------------------------------------------

StmtPtr serialize(const StmtPtr& s, FreshNames& fresh) {
  if (s->kind == StmtKind::Assign && s->targets.size() > 1) {
    std::vector<StmtPtr> out;
    std::vector<Ref> targets = s->targets;
    for (auto& t : targets) {
      if (t.scalar()) continue;
      std::string y = fresh.next();
      out.push_back(mk_assign({Ref{y, nullptr, t.span}}, {t.index}, s->span));
      t.index = mk_var(y, t.span);
    }
    std::vector<std::string> tmp;
    for (const auto& e : s->exprs) {
      tmp.push_back(fresh.next());
      out.push_back(mk_assign({Ref{tmp.back(), nullptr, e->span}}, {e}, s->span));
    }
    for (size_t i = 0; i < targets.size(); ++i)
      out.push_back(mk_assign({targets[i]}, {mk_var(tmp[i], s->span)}, s->span));
    return mk_seq(out, s->span);
  }
  if (s->body.empty()) return s;
  std::vector<StmtPtr> b;
  for (const auto& c : s->body) b.push_back(serialize(c, fresh));
  return s->kind == StmtKind::Seq ? mk_seq(b, s->span) : clone_with(s, b);
}

// ---- pass 5 ---------------------------------------------------------------

struct Flattener {
  FreshNames& fresh;

  ExprPtr expr(const ExprPtr& e, std::vector<StmtPtr>& pre) {
    if (!e) return e;
    switch (e->kind) {
      case Expr::Kind::Index: {
        ExprPtr sub = expr(e->a, pre);
        if (!bare_var(sub)) sub = hoist(sub, pre);
        return mk_index(e->name, sub, e->span);
      }
      case Expr::Kind::Unary: return mk_unary(e->op, expr(e->a, pre), e->span);
      case Expr::Kind::Binary:
        return mk_binary(e->op, expr(e->a, pre), expr(e->b, pre), e->span);
      default: return e;
    }
  }

  ExprPtr hoist(const ExprPtr& e, std::vector<StmtPtr>& pre) {
    std::string y = fresh.next();
    pre.push_back(mk_assign({Ref{y, nullptr, e->span}}, {e}, e->span));
    return mk_var(y, e->span);
  }

  Ref ref(const Ref& r, std::vector<StmtPtr>& pre) {
    if (!r.index) return r;
    Ref n = r;
    n.index = expr(r.index, pre);
    if (!bare_var(n.index)) n.index = hoist(n.index, pre);
    return n;
  }

  // Operands only; children are handled by run().
  StmtPtr operands(const StmtPtr& s, std::vector<StmtPtr>& pre) {
    auto c = std::make_shared<Stmt>(*s);
    for (auto& t : c->targets) t = ref(t, pre);
    for (auto& e : c->exprs) e = expr(e, pre);
    for (auto& q : c->qargs) q = ref(q, pre);
    c->ref = ref(s->ref, pre);
    c->cond = expr(s->cond, pre);
    return c;
  }

  StmtPtr run(const StmtPtr& s) {
    std::vector<StmtPtr> pre;
    auto c = std::const_pointer_cast<Stmt>(operands(s, pre));
    switch (s->kind) {
      case StmtKind::Seq: {
        std::vector<StmtPtr> b;
        for (const auto& x : s->body) b.push_back(run(x));
        return mk_seq(b, s->span);
      }
      case StmtKind::Qif:
        for (auto& b : c->body) b = b->kind == StmtKind::Call ? operands(b, pre) : run(b);
        break;
      default:
        for (auto& b : c->body) b = run(b);
    }
    pre.push_back(c);
    return mk_seq(pre, s->span);
  }
};

// ---- pass 6 ---------------------------------------------------------------

struct Reducer {
  FreshNames& fresh;

  ExprPtr atomize(const ExprPtr& e, std::vector<StmtPtr>& pre) {
    if (atom(e)) return e;
    ExprPtr r = shrink(e, pre);
    std::string t = fresh.next();
    pre.push_back(mk_assign({Ref{t, nullptr, e->span}}, {r}, e->span));
    return mk_var(t, e->span);
  }

  ExprPtr shrink(const ExprPtr& e, std::vector<StmtPtr>& pre) {
    if (e->kind == Expr::Kind::Unary) return mk_unary(e->op, atomize(e->a, pre), e->span);
    if (e->kind == Expr::Kind::Binary)
      return mk_binary(e->op, atomize(e->a, pre), atomize(e->b, pre), e->span);
    return e;
  }

  StmtPtr run(const StmtPtr& s) {
    if (s->kind == StmtKind::Assign && s->targets.size() == 1 && !small(s->exprs[0])) {
      std::vector<StmtPtr> pre;
      ExprPtr r = shrink(s->exprs[0], pre);
      pre.push_back(mk_assign(s->targets, {r}, s->span));
      return mk_seq(pre, s->span);
    }
    if (s->body.empty()) return s;
    std::vector<StmtPtr> b;
    for (const auto& c : s->body) b.push_back(run(c));
    return s->kind == StmtKind::Seq ? mk_seq(b, s->span) : clone_with(s, b);
  }
};

}  // namespace

FreshNames::FreshNames(const Program& p) {
  auto see = [&](const std::string& n) {
    if (n.size() > 3 && n.rfind("__t", 0) == 0 &&
        n.find_first_not_of("0123456789", 3) == std::string::npos)
      k_ = std::max(k_, std::stoi(n.substr(3)) + 1);
  };
  for (const auto& d : p.decls) {
    see(d.name);
    for (const auto& f : d.formals) see(f);
    each_stmt(d.body, [&](const Stmt& s) {
      for (const auto& t : s.targets) see(t.name);
      for (const auto& q : s.qargs) see(q.name);
      see(s.ref.name);
      each_expr(s, [&](const Expr& e) { see(e.name); });
    });
  }
}

std::string FreshNames::next() { return "__t" + std::to_string(k_++); }

TransformFlags scan_flags(const Program& p) {
  TransformFlags f;
  f.no_blocks = f.qif_branches_are_calls = f.conditions_are_variables = f.assignments_unary =
      f.subscripts_are_variables = f.exprs_small = true;
  auto sub_ok = [&](const Expr& e) {
    if (e.kind == Expr::Kind::Index && !bare_var(e.a)) f.subscripts_are_variables = false;
  };
  auto ref_ok = [&](const Ref& r) {
    if (r.index && !bare_var(r.index)) f.subscripts_are_variables = false;
  };
  for (const auto& d : p.decls)
    each_stmt(d.body, [&](const Stmt& s) {
      each_expr(s, sub_ok);
      for (const auto& t : s.targets) ref_ok(t);
      for (const auto& q : s.qargs) ref_ok(q);
      ref_ok(s.ref);
      switch (s.kind) {
        case StmtKind::Block: f.no_blocks = false; break;
        case StmtKind::Qif:
          for (const auto& b : s.body)
            if (b->kind != StmtKind::Call && b->kind != StmtKind::Skip)
              f.qif_branches_are_calls = false;
          break;
        case StmtKind::If:
        case StmtKind::While:
          if (!bare_var(s.cond)) f.conditions_are_variables = false;
          break;
        case StmtKind::Call:
          for (const auto& a : s.exprs)
            if (!bare_var(a)) f.conditions_are_variables = false;
          break;
        case StmtKind::Assign:
          if (s.targets.size() != 1) f.assignments_unary = false;
          for (const auto& e : s.exprs)
            if (!small(e)) f.exprs_small = false;
          break;
        default: break;
      }
    });
  return f;
}

Program lift_qif_branches(const Program& p) {
  FreshNames fresh(p);
  Lifter l{fresh, {}};
  Program out = map_bodies(p, [&](const StmtPtr& s) { return l.run(s); });
  for (auto& d : l.added) out.decls.push_back(std::move(d));
  return out;
}

Program unroll_blocks(const Program& p) {
  FreshNames fresh(p);
  Program out = p;
  Unroller u{fresh, out, {}, {}};
  std::vector<std::string> order;
  for (const auto& d : p.decls)
    if (!u.lifted(d.name)) order.push_back(d.label());
  // ordinary declarations first, so lifted branches inherit their scope
  for (size_t i = 0; i < out.decls.size(); ++i) {
    Decl& d = out.decls[i];
    if (u.lifted(d.name)) continue;
    u.introduced.clear();
    StmtPtr b = u.run(d.body, {});
    Decl& e = out.decls[i];
    if (!u.introduced.empty()) {
      std::vector<Ref> zs;
      std::vector<ExprPtr> zero;
      for (const auto& n : u.introduced) {
        zs.push_back(Ref{n, nullptr, e.span});
        zero.push_back(mk_const(0, e.span));
      }
      b = mk_seq({mk_assign(zs, zero, e.span), b}, e.span);
    }
    e.body = b;
  }
  for (const auto& d : p.decls)
    if (u.lifted(d.name)) u.decl(d.name, {});
  return out;
}

Program simplify_conditions(const Program& p) {
  FreshNames fresh(p);
  CondSimplifier c{fresh};
  return map_bodies(p, [&](const StmtPtr& s) { return c.run(s); });
}

Program serialize_assignments(const Program& p) {
  FreshNames fresh(p);
  return map_bodies(p, [&](const StmtPtr& s) { return serialize(s, fresh); });
}

Program flatten_subscripts(const Program& p) {
  FreshNames fresh(p);
  Flattener f{fresh};
  return map_bodies(p, [&](const StmtPtr& s) { return f.run(s); });
}

Program reduce_exprs(const Program& p) {
  FreshNames fresh(p);
  Reducer r{fresh};
  return map_bodies(p, [&](const StmtPtr& s) { return r.run(s); });
}

TransformedProgram transform(const Program& p) {
  Program q = lift_qif_branches(p);
  q = unroll_blocks(q);
  q = simplify_conditions(q);
  q = serialize_assignments(q);
  q = flatten_subscripts(q);
  q = reduce_exprs(q);
  return {q, scan_flags(q)};
}

}  // namespace qrm
