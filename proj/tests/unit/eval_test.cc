#include <random>

#include "doctest.h"
#include "driver.h"
#include "qrm/assembler.h"
#include "qrm/corpus.h"
#include "qrm/pipeline.h"

using namespace qrm;

namespace {

Image sync_image() {
  return assemble(parse_asm(driver::read_file(std::string(QRM_CORPUS_DIR) + "/sync.qasm")));
}

Image qmux_image(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return compile(corpus::qmux_source(corpus::random_gate_lists(1 << n, 8, 2, rng))).image;
}

}  // namespace

TEST_CASE("no qif gives a single root node") {
  auto c = compile(corpus::ghz_source());
  auto r = evaluate(c.image, {{"n", 4}});
  CHECK_FALSE(r.timeout);
  CHECK(r.table.size() == 1);
  CHECK(r.table.check() == "");
  CHECK(r.qvars.size() == 4);
  CHECK(r.diagnostics.empty());
  CHECK(r.t_exe == r.parallel_depth);
}

TEST_CASE("unequal branches get the difference as wait") {
  auto r = evaluate(sync_image(), {});
  REQUIRE(r.table.size() == 4);
  const QifNode& root = r.table.at(1);
  REQUIRE(root.link[Fc0]);
  REQUIRE(root.link[Fc1]);
  CHECK(r.table.at(root.link[Fc0]).w == 5);
  CHECK(r.table.at(root.link[Fc1]).w == 0);
  CHECK(r.table.check() == "");
}

TEST_CASE("schedules agree") {
  for (int n = 1; n <= 3; ++n) {
    Image img = qmux_image(n, 40 + n);
    auto d = evaluate(img, {{"n", static_cast<Word>(n)}});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      EvalOptions o;
      o.schedule = Schedule::Random;
      o.seed = seed;
      auto r = evaluate(img, {{"n", static_cast<Word>(n)}}, o);
      CHECK(r.t_exe == d.t_exe);
      CHECK(r.table == d.table);
      CHECK(r.table.encode(img.qif.base) == d.table.encode(img.qif.base));
      CHECK(r.qvars == d.qvars);
    }
  }
}

TEST_CASE("timeout fires exactly below T_exe") {
  Image img = qmux_image(2, 7);
  auto r = evaluate(img, {{"n", 2}});
  EvalOptions o;
  o.t_prac = r.t_exe;
  CHECK_FALSE(evaluate(img, {{"n", 2}}, o).timeout);
  o.t_prac = r.t_exe - 1;
  CHECK(evaluate(img, {{"n", 2}}, o).timeout);
}

TEST_CASE("qif table encodes, decodes and survives json") {
  Image img = qmux_image(3, 9);
  auto r = evaluate(img, {{"n", 3}});
  auto words = r.table.encode(img.qif.base);
  CHECK(words.size() == static_cast<size_t>(r.table.size()) * kNodeWords);
  CHECK(QifTable::decode(words, img.qif.base) == r.table);
  auto back = qtab_from_json(qtab_to_json(img, r));
  CHECK(back.table == r.table);
  CHECK(back.t_exe == r.t_exe);
  CHECK(back.qvars == r.qvars);
  CHECK(back.inputs == r.inputs);
  REQUIRE(back.allocation.size() == r.allocation.size());
  CHECK_THROWS_AS(qtab_from_json("{}"), EvalError);
}

TEST_CASE("broken link is reported") {
  Image img = qmux_image(1, 2);
  auto r = evaluate(img, {{"n", 1}});
  REQUIRE(r.table.check() == "");
  QifTable t = r.table;
  int c0 = t.at(1).link[Fc0];
  REQUIRE(c0);
  t.at(c0).link[Cf] = 0;
  CHECK(t.check() != "");
}

TEST_CASE("arrays are sized by the largest subscript") {
  auto c = compile(corpus::ghz_source());
  EvalOptions o;
  o.margin = 3;
  auto r = evaluate(c.image, {{"n", 5}}, o);
  bool found = false;
  for (const auto& a : r.allocation)
    if (a.name == "q") {
      found = true;
      CHECK(a.extent == 5 + 1 + 3);
    }
  CHECK(found);
}

TEST_CASE("machine costs per cycle stay bounded") {
  std::mt19937_64 rng(21);
  auto c = compile(corpus::qmux_source(corpus::random_gate_lists(8, 6, 2, rng)));
  auto q0 = evaluate(c.image, {{"n", 3}});
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(Eigen::Index{1} << q0.qvars.size());
  psi.normalize();
  auto ex = execute(c.image, {{"n", 3}}, psi);
  CHECK(ex.result.disentangled);
  CHECK(ex.costs.cycles == q0.t_exe);
  CHECK(ex.costs.max_ops_per_cycle <= 64);
  CHECK(ex.max_norm_error < 1e-9);
}

TEST_CASE("inputs must bind every main formal") {
  auto c = compile(corpus::ghz_source());
  CHECK_THROWS(evaluate(c.image, {}));
}

TEST_CASE("qif node layout") {
  QifTable t;
  t.nodes.push_back({7, {}});
  auto w = t.encode(100);
  CHECK(w == std::vector<Word>{7, 0, 0, 0, 0, 0, 0, 0, 0});
  t.at(1).w = 0;  // the root never waits
  t.nodes.push_back({});
  t.at(1).link[Nx] = 2;
  t.at(2).link[Pr] = 1;
  w = t.encode(100);
  CHECK(w[1] == 109);
  CHECK(w[9 + 1 + Pr] == 100);
  CHECK(t.check() == "");
  CHECK(QifTable::decode(w, 100) == t);
}

TEST_CASE("multiplexor parallel depth grows additively") {
  std::vector<std::uint64_t> d;
  for (int n = 1; n <= 5; ++n) d.push_back(driver::bench_qmux(n, 3).parallel_depth);
  for (size_t i = 2; i < d.size(); ++i) CHECK(d[i] - d[i - 1] == d[1] - d[0]);
}
