#include <string>

#include "doctest.h"
#include "qrm/frontend.h"
#include "qrm/semantics.h"

using namespace qrm;

namespace {

const char* kGhz = R"(
proc Pmain(n) <=
  if n = 1 then H[q[n]]
  else Pmain(n - 1); CNOT[q[n - 1], q[n]]
  fi
)";

const char* kQmux = R"(
// three declaration families: Pmain, P, Q[..]
proc Pmain(n) <= P(n, 0)
proc P(k, x) <=
  if k = 0 then Q[x]
  else qif[q[k]] (|0> -> P(k - 1, 2 * x)) [] (|1> -> P(k - 1, 2 * x + 1)) fiq
  fi
proc Q[0]() <= X[p[1]]
proc Q[1]() <= H[p[1]]
)";

ClassicalState with(std::initializer_list<std::pair<const char*, Word>> kv) {
  ClassicalState s;
  for (auto& [k, v] : kv) s.set({k, std::nullopt}, v);
  return s;
}

}  // namespace

TEST_CASE("parse single gate body") {
  Program p = parse("proc Pmain(n) <= H[q[n]]");
  REQUIRE(p.decls.size() == 1);
  CHECK(p.main == "Pmain");
  CHECK(p.decls[0].body->kind == StmtKind::Gate);
  CHECK(p.decls[0].body->gate == "H");
}

TEST_CASE("parse qmux structure") {
  Program p = parse(kQmux);
  CHECK(p.decls.size() == 4);
  CHECK(p.is_family("Q"));
  CHECK(p.family_size("Q") == 2);
  const Decl* d = p.find("P", std::nullopt);
  REQUIRE(d);
  CHECK(d->formals == std::vector<std::string>{"k", "x"});
  auto qif = d->body->body[1];
  CHECK(qif->kind == StmtKind::Qif);
  CHECK(qif->body[0]->kind == StmtKind::Call);
}

TEST_CASE("qif with call branches") {
  auto s = parse_stmt("qif[q](|0> -> P0) [] (|1> -> P1) fiq");
  REQUIRE(s->kind == StmtKind::Qif);
  CHECK(s->body[0]->kind == StmtKind::Call);
  CHECK(s->body[1]->ref.name == "P1");
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse("proc P() <=\n  x := ");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.span.line == 2);
  }
  CHECK_THROWS_AS(parse("proc P() <= skip\nproc P() <= skip"), SyntaxError);
  CHECK_THROWS_AS(parse("proc P() <= CNOT[q]"), SyntaxError);
}

TEST_CASE("print round trip") {
  for (const char* src : {kGhz, kQmux}) {
    Program a = parse(src);
    Program b = parse(print(a));
    CHECK(equal(a, b));
  }
  auto blk = parse_stmt("begin local x, y := 1, -(2 - z); if not x then skip fi; x := min(y, 3) mod 2 end");
  std::string text = print(blk);
  CHECK(text.find("begin local") != std::string::npos);
  CHECK(equal(parse_stmt(text), blk));
  auto q = parse_stmt("qif[c](|0> -> skip) [] (|1> -> X[p]) fiq");
  std::string qt = print(q);
  CHECK(qt.find("qif[c]") != std::string::npos);
  CHECK(qt.find("fiq") != std::string::npos);
  CHECK(equal(parse_stmt(qt), q));
}

TEST_CASE("expression printing keeps grouping") {
  for (const char* e : {"a - (b - c)", "(a - b) - c", "-(a + b) * c", "a * (b mod c)",
                        "(a = b) = c", "not (a < b)", "2 * y + z", "a - -b"}) {
    auto x = parse_expr(e);
    CHECK(equal(parse_expr(print(x)), x));
  }
  ClassicalState s = with({{"a", 7}, {"b", 3}});
  CHECK(eval(parse_expr("a > b"), s) == 1);
  CHECK(eval(parse_expr("a >= 8"), s) == 0);
  CHECK(eval(parse_expr("-a / 2"), s) == static_cast<Word>(-3));
  CHECK(eval(parse_expr("a / 0"), s) == 0);
}

TEST_CASE("qv") {
  Program p = parse(kQmux);
  CHECK(qv(parse_stmt("skip"), {}, p).empty());
  auto s = qv(parse_stmt("H[q[x]]"), with({{"x", 2}}), p);
  CHECK(s == std::set<VarKey>{{"q", 2}});
  s = qv(parse_stmt("qif[c](|0> -> skip) [] (|1> -> X[p]) fiq"), {}, p);
  CHECK(s == std::set<VarKey>{{"c", std::nullopt}, {"p", std::nullopt}});
}

TEST_CASE("fcv") {
  Program p = parse(kQmux);
  CHECK(fcv(parse_stmt("skip"), {}, p).empty());
  CHECK(fcv(parse_stmt("x := y + 1"), {}, p) == std::set<VarKey>{{"x", std::nullopt}});
  CHECK(fcv(parse_stmt("begin local x := 0; x := 1 end"), {}, p).empty());
  // calls do not leak their formals
  CHECK(fcv(parse_stmt("P(0, 1)"), {}, p).empty());
}

TEST_CASE("qv/fcv errors") {
  Program p = parse("proc Pmain() <= while 1 do skip od");
  WalkOptions w;
  w.step_bound = 1000;
  CHECK_THROWS_AS(qv(parse_stmt("Pmain"), {}, p, w), NonTermination);
  CHECK_THROWS_AS(qv(parse_stmt("Nope"), {}, p), LookupError);
}

TEST_CASE("conditions") {
  Program ghz = parse(kGhz);
  for (Word n = 1; n <= 8; ++n) CHECK(check_conditions(ghz, with({{"n", n}})).ok);
  Program qmux = parse(kQmux);
  CHECK(check_conditions(qmux, with({{"n", 1}})).ok);

  auto r = check_conditions(parse("proc Pmain() <= qif[q](|0> -> H[q]) [] (|1> -> skip) fiq"), {});
  CHECK(!r.ok);
  CHECK(r.condition == 1);
  r = check_conditions(parse("proc Pmain() <= qif[q](|0> -> x := 1) [] (|1> -> skip) fiq"), {});
  CHECK(!r.ok);
  CHECK(r.condition == 2);
  r = check_conditions(parse("proc Pmain() <= R\nproc R() <= y := 2"), {});
  CHECK(!r.ok);
  CHECK(r.condition == 3);
}

TEST_CASE("bit view is width checked") {
  ClassicalState s = with({{"b", 2}});
  CHECK_THROWS(s.view({"b", std::nullopt}, ValueKind::Bit));
  s.set({"i", std::nullopt}, static_cast<Word>(-5));
  CHECK(s.view({"i", std::nullopt}, ValueKind::Int) == -5);
}
