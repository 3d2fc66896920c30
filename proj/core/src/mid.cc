#include "qrm/mid.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "qrm/isa.h"

namespace qrm {

std::string MidOperand::str() const {
  switch (kind) {
    case Kind::Var: return name;
    case Kind::Elem: return name + "[" + index + "]";
    case Kind::Reg: return std::string(reg_name(reg));
    case Kind::Imm: return std::to_string(as_signed(imm));
    case Kind::Label: return name;
    case Kind::Entry: return index.empty() ? name : name + "[" + index + "]";
  }
  return "?";
}

std::string_view mid_mnemonic(MidOp op) {
  static const char* names[] = {"xori", "xor", "addi", "subi", "neg", "swap", "ari",
                                "arib", "uni", "unib", "bra", "bez", "bnz", "brc",
                                "swbr", "qif", "fiq", "push", "pop", "start", "finish"};
  return names[static_cast<int>(op)];
}

std::string MidInstr::str(const GateTable& g) const {
  std::string s(mid_mnemonic(op));
  std::vector<std::string> parts;
  if (op == MidOp::Uni || op == MidOp::Unib) parts.push_back(g[para].key());
  if (op == MidOp::Ari || op == MidOp::Arib)
    parts.emplace_back(op_mnemonic(static_cast<Op>(para)));
  for (const auto& a : args) parts.push_back(a.str());
  for (size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : " ") + parts[i];
  if (op == MidOp::Brc) s += brc_nz ? " (nz)" : " (z)";
  return s;
}

std::string entry_symbol(const std::string& proc) { return proc + ".ent"; }

std::string entry_label(const Decl& d) {
  return "ent." + d.name + (d.index ? "." + std::to_string(*d.index) : "");
}

namespace {

using K = MidOperand::Kind;

class Translator {
 public:
  explicit Translator(const Program& p) : p_(p) {}

  MidProgram run() {
    const Decl* m = p_.main_decl();
    if (!m) throw TranslateError("program has no main procedure");
    out_.inputs = m->formals;

    out_.blocks.push_back({"main", {}});
    code_ = &out_.blocks.back().code;
    emit(MidOp::Start, {});
    std::vector<MidOperand> actuals;
    for (const auto& f : m->formals) actuals.push_back(MidOperand::var(f));
    call(MidOperand::entry(entry_symbol(m->name), ""), actuals);
    emit(MidOp::Finish, {});

    std::map<std::string, EntryArray> arrays;
    for (const auto& d : p_.decls) {
      auto& a = arrays[d.name];
      a.symbol = entry_symbol(d.name);
      Word slot = d.index.value_or(0);
      if (a.labels.size() <= slot) a.labels.resize(slot + 1);
      a.labels[slot] = entry_label(d);
      decl(d);
    }
    for (const auto& d : p_.decls)
      if (arrays.count(d.name)) {
        out_.entries.push_back(std::move(arrays[d.name]));
        arrays.erase(d.name);
      }
    return std::move(out_);
  }

 private:
  const Program& p_;
  MidProgram out_;
  std::vector<MidInstr>* code_ = nullptr;
  bool in_uncp_ = false;
  int labels_ = 0, counters_ = 0;
  std::map<const Stmt*, std::string> counter_of_;

  std::string fresh_label() { return "L" + std::to_string(labels_++); }

  void emit(MidOp op, std::vector<MidOperand> args, int para = 0, std::string label = "",
            bool nz = false) {
    MidInstr i;
    i.op = op;
    i.args = std::move(args);
    i.para = para;
    i.label = std::move(label);
    i.brc_nz = nz;
    i.uncp = in_uncp_;
    code_->push_back(std::move(i));
  }

  static MidOperand ref(const Ref& r) {
    if (r.scalar()) return MidOperand::var(r.name);
    if (r.index->kind != Expr::Kind::Var)
      throw TranslateError("subscript of " + r.name + " is not a plain variable");
    return MidOperand::elem(r.name, r.index->name);
  }

  static MidOperand atom(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::Const: return MidOperand::imm_(e->value);
      case Expr::Kind::Var: return MidOperand::var(e->name);
      case Expr::Kind::Index: return ref(Ref{e->name, e->a, e->span});
      default: throw TranslateError("expression is not atomic");
    }
  }

  static MidOperand cond_var(const ExprPtr& e) {
    if (!e || e->kind != Expr::Kind::Var) throw TranslateError("condition is not a plain variable");
    return MidOperand::var(e->name);
  }

  void note_quantum(const Ref& r) { out_.quantum.insert(r.name); }

  // __w := e on a zero __w
  void compute(const ExprPtr& e) {
    const auto w = MidOperand::var("__w");
    switch (e->kind) {
      case Expr::Kind::Const: emit(MidOp::Xori, {w, MidOperand::imm_(e->value)}); break;
      case Expr::Kind::Var:
      case Expr::Kind::Index: emit(MidOp::Xor, {w, atom(e)}); break;
      case Expr::Kind::Unary: emit(MidOp::Ari, {w, atom(e->a)}, static_cast<int>(e->op)); break;
      case Expr::Kind::Binary:
        emit(MidOp::Arib, {w, atom(e->a), atom(e->b)}, static_cast<int>(e->op));
        break;
    }
  }

  void push_actual(const MidOperand& a) {
    const auto t = MidOperand::var("__a");
    if (a.kind == K::Imm)
      emit(MidOp::Xori, {t, a});
    else
      emit(MidOp::Xor, {t, a});
  }

  void call(const MidOperand& target, const std::vector<MidOperand>& actuals) {
    const auto t = MidOperand::var("__a");
    for (const auto& a : actuals) {
      push_actual(a);
      emit(MidOp::Push, {t});
    }
    emit(MidOp::Bra, {target});
    for (auto it = actuals.rbegin(); it != actuals.rend(); ++it) {
      emit(MidOp::Pop, {t});
      push_actual(*it);
    }
  }

  void call_stmt(const Stmt& s) {
    MidOperand target;
    if (s.ref.scalar()) {
      target = MidOperand::entry(entry_symbol(s.ref.name), "");
    } else {
      if (s.ref.index->kind != Expr::Kind::Var)
        throw TranslateError("family index of " + s.ref.name + " is not a plain variable");
      target = MidOperand::entry(entry_symbol(s.ref.name), s.ref.index->name);
    }
    std::vector<MidOperand> actuals;
    for (const auto& e : s.exprs) actuals.push_back(atom(e));
    call(target, actuals);
  }

  void branch_body(const StmtPtr& b) {
    if (b->kind == StmtKind::Skip) return;
    if (b->kind != StmtKind::Call) throw TranslateError("qif branch is not a call or skip");
    call_stmt(*b);
  }

  // The if layout, shared by mid and uncp:
  //   A: bez x, F; C1; T: bnz x, E; F: brc x, A (z); C2; E: brc x, T (nz)
  template <class F>
  void if_layout(const Stmt& s, F body) {
    auto x = cond_var(s.cond);
    auto A = fresh_label(), T = fresh_label(), Fl = fresh_label(), E = fresh_label();
    emit(MidOp::Bez, {x, MidOperand::label(Fl)}, 0, A);
    body(s.body[0]);
    emit(MidOp::Bnz, {x, MidOperand::label(E)}, 0, T);
    emit(MidOp::Brc, {x, MidOperand::label(A)}, 0, Fl, false);
    body(s.body[1]);
    emit(MidOp::Brc, {x, MidOperand::label(T)}, 0, E, true);
  }

  std::string counter(const Stmt* s) {
    auto it = counter_of_.find(s);
    if (it != counter_of_.end()) return it->second;
    return counter_of_[s] = "__y" + std::to_string(counters_++);
  }

  void mid(const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Skip: return;
      case StmtKind::Seq:
        for (const auto& c : s->body) mid(c);
        return;
      case StmtKind::Assign: {
        if (s->targets.size() != 1) throw TranslateError("assignment is not serialised");
        const auto w = MidOperand::var("__w");
        compute(s->exprs[0]);
        emit(MidOp::Swap, {ref(s->targets[0]), w});
        emit(MidOp::Push, {w});
        return;
      }
      case StmtKind::Gate: {
        int g = out_.gates.intern(s->gate, s->gate_params);
        std::vector<MidOperand> qs;
        for (const auto& q : s->qargs) {
          note_quantum(q);
          qs.push_back(ref(q));
        }
        emit(qs.size() == 1 ? MidOp::Uni : MidOp::Unib, qs, g);
        return;
      }
      case StmtKind::Call: call_stmt(*s); return;
      case StmtKind::If: if_layout(*s, [&](const StmtPtr& b) { mid(b); }); return;
      case StmtKind::While: {
        // push y; L1: brc y, L4 (nz); L2: bez x, L5; C; addi y, 1;
        // L4: bnz y, L1; L5: brc x, L2 (z)
        auto x = cond_var(s->cond);
        auto y = MidOperand::var(counter(s.get()));
        auto L1 = fresh_label(), L2 = fresh_label(), L4 = fresh_label(), L5 = fresh_label();
        emit(MidOp::Push, {y});
        emit(MidOp::Brc, {y, MidOperand::label(L4)}, 0, L1, true);
        emit(MidOp::Bez, {x, MidOperand::label(L5)}, 0, L2);
        mid(s->body[0]);
        emit(MidOp::Addi, {y, MidOperand::imm_(1)});
        emit(MidOp::Bnz, {y, MidOperand::label(L1)}, 0, L4);
        emit(MidOp::Brc, {x, MidOperand::label(L2)}, 0, L5, false);
        return;
      }
      case StmtKind::Qif: {
        note_quantum(s->ref);
        auto q = ref(s->ref);
        auto A = fresh_label(), T = fresh_label(), F = fresh_label(), E = fresh_label();
        emit(MidOp::Qif, {q});
        emit(MidOp::Bnz, {q, MidOperand::label(F)}, 0, A);
        branch_body(s->body[0]);
        emit(MidOp::Bez, {q, MidOperand::label(E)}, 0, T);
        emit(MidOp::Brc, {q, MidOperand::label(A)}, 0, F, true);
        branch_body(s->body[1]);
        emit(MidOp::Brc, {q, MidOperand::label(T)}, 0, E, false);
        emit(MidOp::Fiq, {q});
        return;
      }
      case StmtKind::Block: throw TranslateError("blocks must be removed before translation");
    }
  }

  void uncp(const StmtPtr& s) {
    bool saved = in_uncp_;
    in_uncp_ = true;
    switch (s->kind) {
      case StmtKind::Seq:
        for (auto it = s->body.rbegin(); it != s->body.rend(); ++it) uncp(*it);
        break;
      case StmtKind::Assign: {
        const auto w = MidOperand::var("__w");
        emit(MidOp::Pop, {w});
        emit(MidOp::Swap, {ref(s->targets[0]), w});
        compute(s->exprs[0]);
        break;
      }
      case StmtKind::If: if_layout(*s, [&](const StmtPtr& b) { uncp(b); }); break;
      case StmtKind::While: {
        // U1: brc x, U4 (nz); U2: bez y, U5; subi y, 1; uncp(C);
        // U4: bnz x, U1; U5: brc y, U2 (z); pop y
        auto x = cond_var(s->cond);
        auto y = MidOperand::var(counter(s.get()));
        auto U1 = fresh_label(), U2 = fresh_label(), U4 = fresh_label(), U5 = fresh_label();
        emit(MidOp::Brc, {x, MidOperand::label(U4)}, 0, U1, true);
        emit(MidOp::Bez, {y, MidOperand::label(U5)}, 0, U2);
        emit(MidOp::Subi, {y, MidOperand::imm_(1)});
        uncp(s->body[0]);
        emit(MidOp::Bnz, {x, MidOperand::label(U1)}, 0, U4);
        emit(MidOp::Brc, {y, MidOperand::label(U2)}, 0, U5, false);
        emit(MidOp::Pop, {y});
        break;
      }
      default: break;  // skip, gates, calls and qif leave no classical change
    }
    in_uncp_ = saved;
  }

  void init(const std::vector<std::string>& formals) {
    for (auto& i : init_code(formals)) {
      i.uncp = in_uncp_;
      code_->push_back(std::move(i));
    }
  }

  // TOP: bra BOT; ENT: swbr ro; neg ro; init; push ro; mid(C); uncp(C);
  // pop ro; init; BOT: bra TOP
  void decl(const Decl& d) {
    out_.blocks.push_back({d.label(), {}});
    code_ = &out_.blocks.back().code;
    const auto ro = MidOperand::reg_(Ro);
    auto top = fresh_label(), bot = fresh_label();
    emit(MidOp::Bra, {MidOperand::label(bot)}, 0, top);
    emit(MidOp::Swbr, {ro}, 0, entry_label(d));
    emit(MidOp::Neg, {ro});
    init(d.formals);
    emit(MidOp::Push, {ro});
    mid(d.body);
    uncp(d.body);
    emit(MidOp::Pop, {ro});
    init(d.formals);
    emit(MidOp::Bra, {MidOperand::label(top)}, 0, bot);
  }
};

}  // namespace

MidProgram translate(const Program& p) { return Translator(p).run(); }

std::vector<MidInstr> init_code(const std::vector<std::string>& formals) {
  std::vector<MidInstr> out;
  auto tmp = [](size_t i) { return MidOperand::var("__p" + std::to_string(i + 1)); };
  auto add = [&](MidOp op, std::vector<MidOperand> a) {
    MidInstr i;
    i.op = op;
    i.args = std::move(a);
    out.push_back(std::move(i));
  };
  const size_t k = formals.size();
  for (size_t i = k; i-- > 0;) add(MidOp::Pop, {tmp(i)});
  for (size_t i = 0; i < k; ++i) add(MidOp::Swap, {tmp(i), MidOperand::var(formals[i])});
  for (size_t i = 0; i < k; ++i) add(MidOp::Push, {tmp(i)});
  return out;
}

std::string listing(const MidProgram& m) {
  std::ostringstream o;
  for (const auto& b : m.blocks) {
    o << "; " << b.name << "\n";
    for (const auto& i : b.code) {
      std::string lab = i.label.empty() ? "" : i.label + ":";
      o << lab << std::string(std::max<size_t>(1, 12 - lab.size()), ' ') << i.str(m.gates) << "\n";
    }
  }
  return o.str();
}

void check_pairing(const MidProgram& m) {
  std::map<std::string, const MidInstr*> defs;
  for (const auto& b : m.blocks)
    for (const auto& i : b.code)
      if (!i.label.empty() && !defs.emplace(i.label, &i).second)
        throw TranslateError("label " + i.label + " defined twice");
  auto target = [&](const MidInstr& i) -> const MidInstr& {
    const auto& l = i.args.back();
    auto it = defs.find(l.name);
    if (l.kind != K::Label || it == defs.end())
      throw TranslateError("undefined label in `" + i.str(m.gates) + "`");
    return *it->second;
  };
  for (const auto& b : m.blocks) {
    std::vector<MidOperand> coins;
    for (const auto& i : b.code) {
      switch (i.op) {
        case MidOp::Bez:
        case MidOp::Bnz: {
          const auto& t = target(i);
          bool nz = i.op == MidOp::Bnz;
          if (t.op != MidOp::Brc || t.brc_nz != nz || !(t.args[0] == i.args[0]) ||
              t.args[1].name != i.label)
            throw TranslateError("`" + i.str(m.gates) + "` has no brc partner");
          break;
        }
        case MidOp::Brc: {
          const auto& t = target(i);
          if ((t.op != MidOp::Bez && t.op != MidOp::Bnz) || !(t.args[0] == i.args[0]))
            throw TranslateError("`" + i.str(m.gates) + "` has no branch partner");
          break;
        }
        case MidOp::Bra:
          if (i.args[0].kind == K::Label) target(i);
          break;
        case MidOp::Qif: coins.push_back(i.args[0]); break;
        case MidOp::Fiq:
          if (coins.empty() || !(coins.back() == i.args[0]))
            throw TranslateError("fiq does not match the open qif");
          coins.pop_back();
          break;
        default: break;
      }
    }
    if (!coins.empty()) throw TranslateError("qif without fiq in " + b.name);
  }
}

}  // namespace qrm
