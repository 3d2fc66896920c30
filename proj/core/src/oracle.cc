#include "qrm/oracle.h"

#include <algorithm>

#include "qrm/gates.h"

namespace qrm {

int OracleState::position(const VarKey& k) const {
  auto it = std::find(qvars.begin(), qvars.end(), k);
  return it == qvars.end() ? -1 : static_cast<int>(it - qvars.begin());
}

std::vector<VarKey> discover_qvars(const Program& p, const ClassicalState& sigma0,
                                   const WalkOptions& w) {
  auto s = qv(main_call(p), sigma0, p, w);
  return {s.begin(), s.end()};
}

namespace {

class Interp {
 public:
  Interp(const Program& p, const OracleOptions& o) : p_(p), opt_(o) {}

  void run(const StmtPtr& s, OracleState& st) {
    tick(s->span);
    ClassicalState& sg = st.sigma;
    switch (s->kind) {
      case StmtKind::Skip: return;
      case StmtKind::Assign: {
        std::vector<VarKey> keys;
        std::vector<Word> vals;
        for (const auto& t : s->targets) keys.push_back(resolve(t, sg));
        for (const auto& e : s->exprs) vals.push_back(eval(e, sg));
        for (size_t i = 0; i < keys.size(); ++i) sg.set(keys[i], vals[i]);
        return;
      }
      case StmtKind::Seq:
        for (const auto& c : s->body) run(c, st);
        return;
      case StmtKind::If: run(eval(s->cond, sg) ? s->body[0] : s->body[1], st); return;
      case StmtKind::While:
        while (eval(s->cond, sg)) {
          tick(s->span);
          run(s->body[0], st);
        }
        return;
      case StmtKind::Block: {
        // (BS): x := t; C; x := old
        std::vector<VarKey> keys;
        std::vector<Word> init, old;
        for (const auto& t : s->targets) keys.push_back(resolve(t, sg));
        for (const auto& e : s->exprs) init.push_back(eval(e, sg));
        for (const auto& k : keys) old.push_back(sg.get(k));
        for (size_t i = 0; i < keys.size(); ++i) sg.set(keys[i], init[i]);
        run(s->body[0], st);
        for (size_t i = 0; i < keys.size(); ++i) st.sigma.set(keys[i], old[i]);
        return;
      }
      case StmtKind::Call: call(*s, st); return;
      case StmtKind::Gate: gate(*s, st); return;
      case StmtKind::Qif: qif(*s, st); return;
    }
  }

 private:
  void tick(Span sp) {
    if (++steps_ > opt_.walk.step_bound) throw NonTermination("step bound exceeded", sp);
  }

  void call(const Stmt& s, OracleState& st) {
    std::optional<Word> idx;
    if (s.ref.index) idx = eval(s.ref.index, st.sigma);
    const Decl* d = p_.find(s.ref.name, idx);
    if (!d) throw LookupError("call to undeclared procedure " + s.ref.name, s.span);
    if (d->formals.size() != s.exprs.size())
      throw LookupError("wrong number of arguments to " + d->label(), s.span);
    ClassicalState before = st.sigma;
    std::vector<Word> args, old;
    for (const auto& e : s.exprs) args.push_back(eval(e, st.sigma));
    for (const auto& f : d->formals) old.push_back(st.sigma.get({f, std::nullopt}));
    for (size_t i = 0; i < args.size(); ++i) st.sigma.set({d->formals[i], std::nullopt}, args[i]);
    run(d->body, st);
    for (size_t i = 0; i < old.size(); ++i) st.sigma.set({d->formals[i], std::nullopt}, old[i]);
    if (opt_.walk.restore_after_call) st.sigma = before;
  }

  void gate(const Stmt& s, OracleState& st) {
    auto g = make_gate(s.gate, s.gate_params);
    if (!g) throw OracleError("unknown gate " + s.gate, s.span);
    std::vector<int> pos;
    for (const auto& q : s.qargs) {
      VarKey k = resolve(q, st.sigma);
      int i = st.position(k);
      if (i < 0) throw OracleError(k.str() + " is not a quantum variable", s.span);
      if (std::find(pos.begin(), pos.end(), i) != pos.end())
        throw OracleError("gate operands are not distinct", s.span);
      pos.push_back(i);
    }
    const int n = static_cast<int>(st.qvars.size());
    std::vector<int> bit;
    for (int i : pos) bit.push_back(n - 1 - i);
    const int dim = 1 << g->arity;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(st.psi.size());
    for (Eigen::Index b = 0; b < st.psi.size(); ++b) {
      if (st.psi[b] == Complex(0)) continue;
      int col = 0;
      for (int j = 0; j < g->arity; ++j) col = col * 2 + ((b >> bit[j]) & 1);
      for (int row = 0; row < dim; ++row) {
        Complex m = g->at(row, col);
        if (m == Complex(0)) continue;
        Eigen::Index t = b;
        for (int j = 0; j < g->arity; ++j) {
          int v = (row >> (g->arity - 1 - j)) & 1;
          t = (t & ~(Eigen::Index{1} << bit[j])) | (Eigen::Index{v} << bit[j]);
        }
        out[t] += m * st.psi[b];
      }
    }
    st.psi = std::move(out);
  }

  void qif(const Stmt& s, OracleState& st) {
    VarKey c = resolve(s.ref, st.sigma);
    int i = st.position(c);
    if (i < 0) throw OracleError(c.str() + " is not a quantum variable", s.span);
    const int bit = static_cast<int>(st.qvars.size()) - 1 - i;
    OracleState b0 = st, b1 = st;
    for (Eigen::Index k = 0; k < st.psi.size(); ++k)
      (((k >> bit) & 1) ? b0 : b1).psi[k] = 0;
    run(s.body[0], b0);
    run(s.body[1], b1);
    if (!(b0.sigma == b1.sigma))
      throw OracleError("qif branches end in different classical states", s.span);
    st.sigma = b0.sigma;
    st.psi = b0.psi + b1.psi;
  }

  const Program& p_;
  OracleOptions opt_;
  long steps_ = 0;
};

}  // namespace

void interpret(const StmtPtr& s, OracleState& st, const Program& p, const OracleOptions& opt) {
  Interp(p, opt).run(s, st);
}

OracleState run_oracle(const Program& p, const ClassicalState& sigma0,
                       const std::vector<VarKey>& qvars, Eigen::VectorXcd psi0,
                       const OracleOptions& opt) {
  if (qvars.size() > 20) throw OracleError("too many quantum variables for the oracle", {});
  OracleState st;
  st.sigma = sigma0;
  st.qvars = qvars;
  if (psi0.size() == 0) {
    psi0 = Eigen::VectorXcd::Zero(Eigen::Index{1} << qvars.size());
    psi0[0] = 1;
  }
  st.psi = std::move(psi0);
  interpret(main_call(p), st, p, opt);
  return st;
}

Eigen::MatrixXcd build_unitary(const Program& p, const ClassicalState& sigma0,
                               const std::vector<VarKey>& qvars, const OracleOptions& opt) {
  if (qvars.size() > 10) throw OracleError("too many quantum variables for a matrix", {});
  const Eigen::Index dim = Eigen::Index{1} << qvars.size();
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[j] = 1;
    u.col(j) = run_oracle(p, sigma0, qvars, e, opt).psi;
  }
  double res = (u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (res > 1e-9) throw OracleError("result is not unitary", {});
  return u;
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) return 0;
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace qrm
