#include "qrm/semantics.h"

#include <algorithm>

namespace qrm {

std::string VarKey::str() const {
  return index ? name + "[" + std::to_string(*index) + "]" : name;
}

Word ClassicalState::get(const VarKey& k) const {
  auto it = vals_.find(k);
  return it == vals_.end() ? 0 : it->second;
}

void ClassicalState::set(const VarKey& k, Word v) {
  if (v == 0)
    vals_.erase(k);
  else
    vals_[k] = v;
}

long long ClassicalState::view(const VarKey& k, ValueKind kind) const {
  Word w = get(k);
  switch (kind) {
    case ValueKind::Uint: return w;
    case ValueKind::Int: return as_signed(w);
    case ValueKind::Bit:
      if (w > 1) throw std::domain_error(k.str() + " is not a bit");
      return w;
  }
  return w;
}

bool ClassicalState::operator==(const ClassicalState& o) const { return vals_ == o.vals_; }

Word eval(const ExprPtr& e, const ClassicalState& sigma) {
  switch (e->kind) {
    case Expr::Kind::Const: return e->value;
    case Expr::Kind::Var: return sigma.get({e->name, std::nullopt});
    case Expr::Kind::Index: return sigma.get({e->name, eval(e->a, sigma)});
    case Expr::Kind::Unary: return apply_op(e->op, eval(e->a, sigma));
    case Expr::Kind::Binary: return apply_op(e->op, eval(e->a, sigma), eval(e->b, sigma));
  }
  return 0;
}

VarKey resolve(const Ref& r, const ClassicalState& sigma) {
  if (!r.index) return {r.name, std::nullopt};
  return {r.name, eval(r.index, sigma)};
}

StmtPtr main_call(const Program& p) {
  const Decl* d = p.main_decl();
  if (!d) throw LookupError("no main procedure", {});
  std::vector<ExprPtr> actuals;
  for (const auto& f : d->formals) actuals.push_back(mk_var(f));
  return mk_call(Ref{d->name, nullptr, d->span}, actuals, d->span);
}

namespace {

enum class Mode { None, QV, FCV, Check };

struct Stop {};

class Walker {
 public:
  Walker(const Program& p, const CheckOptions& opt) : p_(p), opt_(opt) {}

  ConditionReport report;

  void run(const StmtPtr& s, ClassicalState& sg, Mode m, std::set<VarKey>* out) {
    if (++steps_ > opt_.walk.step_bound)
      throw NonTermination("step bound exceeded", s->span);
    switch (s->kind) {
      case StmtKind::Skip: return;
      case StmtKind::Assign: {
        std::vector<VarKey> keys;
        std::vector<Word> vals;
        for (const auto& t : s->targets) keys.push_back(resolve(t, sg));
        for (const auto& e : s->exprs) vals.push_back(eval(e, sg));
        for (size_t i = 0; i < keys.size(); ++i) sg.set(keys[i], vals[i]);
        if (m == Mode::FCV) out->insert(keys.begin(), keys.end());
        return;
      }
      case StmtKind::Gate:
        if (m == Mode::QV)
          for (const auto& q : s->qargs) out->insert(resolve(q, sg));
        return;
      case StmtKind::Seq:
        for (const auto& c : s->body) run(c, sg, m, out);
        return;
      case StmtKind::If:
        run(eval(s->cond, sg) ? s->body[0] : s->body[1], sg, m, out);
        return;
      case StmtKind::While:
        while (eval(s->cond, sg)) {
          if (++steps_ > opt_.walk.step_bound)
            throw NonTermination("step bound exceeded", s->span);
          run(s->body[0], sg, m, out);
        }
        return;
      case StmtKind::Block: block(*s, sg, m, out); return;
      case StmtKind::Call: call(*s, sg, m, out); return;
      case StmtKind::Qif: qif(*s, sg, m, out); return;
    }
  }

  std::set<VarKey> collect(const StmtPtr& s, ClassicalState sg, Mode m) {
    std::set<VarKey> out;
    run(s, sg, m, &out);
    return out;
  }

 private:
  void block(const Stmt& s, ClassicalState& sg, Mode m, std::set<VarKey>* out) {
    std::vector<VarKey> keys;
    std::vector<Word> init, saved;
    for (const auto& t : s.targets) keys.push_back(resolve(t, sg));
    for (const auto& e : s.exprs) init.push_back(eval(e, sg));
    for (const auto& k : keys) saved.push_back(sg.get(k));
    for (size_t i = 0; i < keys.size(); ++i) sg.set(keys[i], init[i]);
    if (m == Mode::FCV) {
      std::set<VarKey> inner;
      run(s.body[0], sg, m, &inner);
      for (const auto& k : keys) inner.erase(k);
      out->insert(inner.begin(), inner.end());
    } else {
      run(s.body[0], sg, m, out);
    }
    for (size_t i = 0; i < keys.size(); ++i) sg.set(keys[i], saved[i]);
  }

  void call(const Stmt& s, ClassicalState& sg, Mode m, std::set<VarKey>* out) {
    std::optional<Word> idx;
    if (s.ref.index) idx = eval(s.ref.index, sg);
    const Decl* d = p_.find(s.ref.name, idx);
    if (!d) {
      std::string n = idx ? s.ref.name + "[" + std::to_string(*idx) + "]" : s.ref.name;
      throw LookupError("call to undeclared procedure " + n, s.span);
    }
    if (d->formals.size() != s.exprs.size())
      throw LookupError("wrong number of arguments to " + d->label(), s.span);
    ClassicalState before;
    if (opt_.walk.restore_after_call) before = sg;
    std::vector<Word> actual, saved;
    for (const auto& e : s.exprs) actual.push_back(eval(e, sg));
    for (const auto& f : d->formals) saved.push_back(sg.get({f, std::nullopt}));
    for (size_t i = 0; i < actual.size(); ++i) sg.set({d->formals[i], std::nullopt}, actual[i]);

    // the entry call is the whole program, its body may change globals
    if (m == Mode::Check && !opt_.bodies_uncomputed && depth_ > 0) {
      auto changed = collect(d->body, sg, Mode::FCV);
      for (const auto& f : d->formals) changed.erase({f, std::nullopt});
      if (!changed.empty())
        fail(3, d->body->span,
             "Condition 3: body of " + d->label() + " changes free variable " +
                 changed.begin()->str());
    }
    Mode inner = (m == Mode::QV || m == Mode::Check) ? m : Mode::None;
    ++depth_;
    run(d->body, sg, inner, out);
    --depth_;
    for (size_t i = 0; i < saved.size(); ++i) sg.set({d->formals[i], std::nullopt}, saved[i]);
    if (opt_.walk.restore_after_call) sg = before;
  }

  void qif(const Stmt& s, ClassicalState& sg, Mode m, std::set<VarKey>* out) {
    VarKey coin = resolve(s.ref, sg);
    if (m == Mode::Check) {
      auto q0 = collect(s.body[0], sg, Mode::QV);
      auto q1 = collect(s.body[1], sg, Mode::QV);
      if (q0.count(coin) || q1.count(coin))
        fail(1, s.span, "Condition 1: coin " + coin.str() + " is used inside a branch");
      auto f0 = collect(s.body[0], sg, Mode::FCV);
      auto f1 = collect(s.body[1], sg, Mode::FCV);
      if (!f0.empty() || !f1.empty())
        fail(2, s.span,
             "Condition 2: qif branch changes free variable " +
                 (f0.empty() ? *f1.begin() : *f0.begin()).str());
    }
    if (m == Mode::QV) out->insert(coin);
    ClassicalState s1 = sg;
    run(s.body[0], sg, m, out);
    run(s.body[1], s1, m, out);
  }

  void fail(int cond, Span sp, std::string msg) {
    report.ok = false;
    report.condition = cond;
    report.span = sp;
    report.message = std::move(msg);
    throw Stop{};
  }

  const Program& p_;
  CheckOptions opt_;
  long steps_ = 0;
  int depth_ = 0;
};

}  // namespace

void exec_classical(const StmtPtr& s, ClassicalState& sigma, const Program& p,
                    const WalkOptions& opt) {
  Walker w(p, CheckOptions{opt, false});
  w.run(s, sigma, Mode::None, nullptr);
}

std::set<VarKey> qv(const StmtPtr& s, const ClassicalState& sigma, const Program& p,
                    const WalkOptions& opt) {
  Walker w(p, CheckOptions{opt, false});
  return w.collect(s, sigma, Mode::QV);
}

std::set<VarKey> fcv(const StmtPtr& s, const ClassicalState& sigma, const Program& p,
                     const WalkOptions& opt) {
  Walker w(p, CheckOptions{opt, false});
  return w.collect(s, sigma, Mode::FCV);
}

ConditionReport check_conditions(const Program& p, const ClassicalState& sigma0,
                                 const CheckOptions& opt) {
  Walker w(p, opt);
  ClassicalState sg = sigma0;
  try {
    w.run(main_call(p), sg, Mode::Check, nullptr);
  } catch (const Stop&) {
  }
  return w.report;
}

}  // namespace qrm
