#include <random>
#include <set>

#include "doctest.h"
#include "qrm/corpus.h"
#include "qrm/frontend.h"
#include "qrm/oracle.h"
#include "qrm/transforms.h"

using namespace qrm;

namespace {

ClassicalState n_is(Word n) {
  ClassicalState s;
  s.set({"n", std::nullopt}, n);
  return s;
}

// print both and compare text; fresh names are deterministic
void same(const Program& got, const char* want) { CHECK(print(got) == print(parse(want))); }

double equivalence(const Program& a, const ClassicalState& s, Eigen::VectorXcd psi = {}) {
  auto qs = discover_qvars(a, s);
  if (psi.size() == 0) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    psi = Eigen::VectorXcd(Eigen::Index{1} << qs.size());
    for (auto& x : psi) x = {g(rng), g(rng)};
    psi.normalize();
  }
  OracleOptions plain, uncomputed;
  uncomputed.walk.restore_after_call = true;
  auto t = transform(a).program;
  auto x = run_oracle(a, s, qs, psi, plain);
  auto y = run_oracle(t, s, qs, psi, uncomputed);
  return (x.psi - y.psi).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("lift qif branches") {
  Program p = parse("proc Pmain() <= qif[q](|0> -> skip) [] (|1> -> X[p]) fiq");
  same(lift_qif_branches(p),
       "proc Pmain() <= qif[q](|0> -> skip) [] (|1> -> __t0) fiq\n"
       "proc __t0() <= X[p]");
  Program calls = parse("proc Pmain() <= qif[q](|0> -> A) [] (|1> -> B(1)) fiq\n"
                        "proc A() <= skip\nproc B(x) <= skip");
  CHECK(equal(lift_qif_branches(calls), calls));
  Program nest = parse(
      "proc Pmain() <= qif[a](|0> -> qif[b](|0> -> X[p]) [] (|1> -> skip) fiq) [] (|1> -> skip) fiq");
  Program l = lift_qif_branches(nest);
  CHECK(l.decls.size() == 3);
  CHECK(scan_flags(l).qif_branches_are_calls);
  CHECK(equivalence(nest, {}) < 1e-12);
}

TEST_CASE("unroll blocks") {
  Program p = parse("proc Pmain() <= x := 5; begin local x := x + 1; y := x end; z := x");
  same(unroll_blocks(p), "proc Pmain() <= __t0 := 0; x := 5; __t0 := x + 1; y := __t0; z := x");
  Program flat = parse("proc Pmain() <= x := 1");
  CHECK(equal(unroll_blocks(flat), flat));
  Program q = parse(
      "proc Pmain() <= begin local i := 2; H[q[i]]; begin local i := i - 1; CNOT[q[2], q[i]] end end");
  CHECK(!scan_flags(q).no_blocks);
  CHECK(scan_flags(unroll_blocks(q)).no_blocks);
  CHECK(equivalence(q, {}) < 1e-12);
}

TEST_CASE("simplify conditions") {
  Program p = parse("proc Pmain(n) <= if n = 1 then H[q] fi");
  same(simplify_conditions(p), "proc Pmain(n) <= __t0 := n = 1; if __t0 then H[q] fi");
  Program w = parse("proc Pmain() <= while b do b := b - 1 od");
  same(simplify_conditions(w),
       "proc Pmain() <= __t0 := b; while __t0 do b := b - 1; __t0 := b od");
  Program c = parse("proc Pmain(k, x) <= P(k - 1, 2 * x)\nproc P(a, b) <= skip");
  same(simplify_conditions(c),
       "proc Pmain(k, x) <= __t0 := k - 1; __t1 := 2 * x; P(__t0, __t1)\nproc P(a, b) <= skip");
  Program keep = parse("proc Pmain(x) <= if x then H[q] fi");
  CHECK(equal(simplify_conditions(keep), keep));
}

TEST_CASE("serialize assignments") {
  Program p = parse("proc Pmain() <= x, y := y, x");
  same(serialize_assignments(p),
       "proc Pmain() <= __t0 := y; __t1 := x; x := __t0; y := __t1");
  Program u = parse("proc Pmain() <= x := y");
  CHECK(equal(serialize_assignments(u), u));

  std::mt19937_64 rng(3);
  const char* vars[] = {"a", "b", "c"};
  const char* ops[] = {"+", "-", "*", "/", "mod", "=", "<", "!="};
  auto expr = [&](auto& self, int depth) -> std::string {
    if (depth == 0 || rng() % 3 == 0) return rng() % 2 ? vars[rng() % 3] : std::to_string(rng() % 7);
    if (rng() % 5 == 0) return "-" + self(self, depth - 1);
    return "(" + self(self, depth - 1) + " " + ops[rng() % 8] + " " + self(self, depth - 1) + ")";
  };
  for (int trial = 0; trial < 40; ++trial) {
    std::string src = "proc Pmain() <= a, b, c := 3, 5, 6; a, b, c := " + expr(expr, 4) + ", " +
                      expr(expr, 4) + ", " + expr(expr, 4) +
                      "; if a mod 2 then X[q[1]] fi; if b mod 2 then X[q[2]] fi;"
                      " if c mod 2 then X[q[3]] fi; H[q[min(max(a, 0), 2) + 1]]";
    Program r = parse(src);
    CHECK(equivalence(r, {}) < 1e-12);
  }
}

TEST_CASE("flatten subscripts") {
  Program p = parse("proc Pmain(n) <= CNOT[q[n - 1], q[n]]");
  same(flatten_subscripts(p), "proc Pmain(n) <= __t0 := n - 1; CNOT[q[__t0], q[n]]");
  Program c = parse("proc Pmain(e) <= qif[r[e + 1]](|0> -> skip) [] (|1> -> A) fiq\nproc A() <= skip");
  same(flatten_subscripts(c),
       "proc Pmain(e) <= __t0 := e + 1; qif[r[__t0]](|0> -> skip) [] (|1> -> A) fiq\n"
       "proc A() <= skip");
  Program f = parse("proc Pmain(t, x) <= Q[t + 1](x)\nproc Q[1](y) <= skip");
  same(flatten_subscripts(f), "proc Pmain(t, x) <= __t0 := t + 1; Q[__t0](x)\nproc Q[1](y) <= skip");
  Program k = parse("proc Pmain() <= H[q[1]]");
  same(flatten_subscripts(k), "proc Pmain() <= __t0 := 1; H[q[__t0]]");
}

TEST_CASE("reduce expressions") {
  Program p = parse("proc Pmain() <= x := 2 * y + z");
  same(reduce_exprs(p), "proc Pmain() <= __t0 := 2 * y; x := __t0 + z");
  Program u = parse("proc Pmain() <= x := not y");
  CHECK(equal(reduce_exprs(u), u));
  std::mt19937_64 rng(9);
  const char* ops[] = {"+", "-", "*", "/", "mod", "<=", "max"};
  auto expr = [&](auto& self, int depth) -> std::string {
    if (depth == 0) return rng() % 2 ? "a" : std::to_string(rng() % 9);
    int o = rng() % 7;
    if (o == 6) return "max(" + self(self, depth - 1) + ", " + self(self, depth - 1) + ")";
    return "(" + self(self, depth - 1) + " " + ops[o] + " " + self(self, depth - 1) + ")";
  };
  for (int trial = 0; trial < 40; ++trial) {
    Program r = parse("proc Pmain() <= a := 4; b := " + expr(expr, 4) +
                      "; if b mod 2 then X[q[1]] fi; if b mod 4 < 2 then X[q[2]] fi");
    CHECK(equivalence(r, {}) < 1e-12);
  }
}

TEST_CASE("full pipeline on the corpus") {
  std::mt19937_64 rng(13);
  for (Word n = 1; n <= 5; ++n) {
    Program ghz = parse(corpus::ghz_source());
    CHECK(transform(ghz).flags.all());
    CHECK(equivalence(ghz, n_is(n)) < 1e-12);
  }
  for (Word n = 2; n <= 5; ++n) CHECK(equivalence(parse(corpus::mcg_source("H")), n_is(n)) < 1e-12);
  for (Word n = 1; n <= 3; ++n) {
    Program q = parse(corpus::qmux_source(corpus::random_gate_lists(1 << n, 8, 2, rng)));
    auto t = transform(q);
    CHECK(t.flags.all());
    CHECK(equivalence(q, n_is(n)) < 1e-12);
    CHECK(check_conditions(t.program, n_is(n), {{}, true}).ok);
  }
  for (int n = 2; n <= 4; ++n) {
    Program q = parse(corpus::qsp_source(n, corpus::random_amplitudes(n, rng)));
    CHECK(equivalence(q, n_is(n)) < 1e-12);
  }
}

TEST_CASE("pipeline is idempotent and names do not collide") {
  Program q = parse(corpus::qmux_source({{}, {}, {}, {}}));
  Program once = transform(q).program;
  Program twice = transform(once).program;
  CHECK(equal(once, twice));

  Program b = parse(
      "proc Pmain(n) <= begin local i := n * 2; qif[c](|0> -> X[q[i - 1]]) [] (|1> -> skip) fiq end");
  Program t = transform(b).program;
  std::set<std::string> decls;
  for (const auto& d : t.decls) CHECK(decls.insert(d.label()).second);
  // every assigned fresh name in Pmain is assigned by one pass only
  CHECK(equivalence(b, n_is(2)) < 1e-12);
  CHECK(transform(t).flags.all());
}
