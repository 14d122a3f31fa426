#include <doctest.h>

#include "bfoml/json_io.hpp"
#include "bfoml/kripke.hpp"
#include "bfoml/sampler.hpp"
#include "bfoml/syntax.hpp"

using namespace bfoml;

namespace {
KripkeModel fixture(const std::string& name) {
  return read_model_file(std::string(BFOML_FIXTURES) + "/" + name);
}
bool holds(const KripkeModel& m, const char* w, const char* f) {
  return check(m, *m.find_world(w), {}, parse(f));
}
}  // namespace

TEST_CASE("validate") {
  KripkeModel ok;
  ok.add_world("w");
  ok.add_element("d");
  ok.add_local(0, 0);
  CHECK(validate(ok).ok());

  KripkeModel mono;
  mono.add_world("w");
  mono.add_world("v");
  mono.add_element("a");
  mono.add_element("b");
  mono.add_local(0, 0);
  mono.add_local(0, 1);
  mono.add_local(1, 0);
  mono.add_edge(0, 1);
  auto r = validate(mono);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::Monotonicity);

  KripkeModel empty;
  empty.add_world("w");
  r = validate(empty);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::EmptyLocalDomain);

  KripkeModel outside = ok;
  outside.add_element("e");
  outside.add_fact(0, Pred::named("P"), {1});
  CHECK(validate(outside).violations.at(0).kind == Violation::Kind::TupleOutsideDomain);
}

TEST_CASE("constant domains") {
  CHECK(is_constant_domain(fixture("m1.json")));
  KripkeModel m;
  m.add_world("w");
  m.add_world("v");
  m.add_element("a");
  m.add_element("b");
  m.add_local(0, 0);
  m.add_local(1, 0);
  m.add_local(1, 1);
  m.add_edge(0, 1);
  CHECK_FALSE(is_constant_domain(m));
}

TEST_CASE("example models") {
  auto m1 = fixture("m1.json"), m2 = fixture("m2.json"), m3 = fixture("m3.json");
  CHECK_FALSE(holds(m2, "w2", "box exists x. P(x)"));
  CHECK(holds(m3, "w3", "exists x. box P(x)"));
  CHECK(holds(m1, "w1", "~box forall x. ~P(x)"));
  CHECK(holds(m1, "v1", "box false"));
}

TEST_CASE("assignment preconditions") {
  auto m = fixture("m1.json");
  CHECK_THROWS_AS(check(m, 0, {}, parse("P(x)")), PreconditionError);
  try {
    check(m, 0, {}, parse("P(x) & Q(y)"));
  } catch (const PreconditionError& e) {
    CHECK((e.var.name() == "x" || e.var.name() == "y"));
  }
  KripkeModel g;
  g.add_world("w");
  g.add_world("v");
  g.add_element("a");
  g.add_element("b");
  g.add_local(0, 0);
  g.add_local(1, 0);
  g.add_local(1, 1);
  g.add_edge(0, 1);
  CHECK_THROWS_AS(check(g, 0, {{Var::named("x"), 1}}, parse("P(x)")), PreconditionError);
  CHECK_NOTHROW(check(g, 1, {{Var::named("x"), 1}}, parse("P(x)")));
}

TEST_CASE("quantifiers range over the local domain") {
  KripkeModel g;
  g.add_world("w");
  g.add_world("v");
  g.add_element("a");
  g.add_element("b");
  g.add_local(0, 0);
  g.add_local(1, 0);
  g.add_local(1, 1);
  g.add_edge(0, 1);
  g.add_fact(0, Pred::named("P"), {0});
  CHECK(check(g, 0, {}, parse("forall x. P(x)")));
  CHECK_FALSE(check(g, 0, {}, parse("box forall x. P(x)")));
  CHECK(check(g, 0, {}, parse("dia exists x. ~P(x)")));
}

TEST_CASE("explain reports the refuting path") {
  auto m2 = fixture("m2.json");
  CheckTrace t = explain(m2, *m2.find_world("w2"), {}, parse("box exists x. P(x)"));
  CHECK_FALSE(t.value);
  REQUIRE(t.path.size() >= 2);
  CHECK(t.path[0].find("w2") != std::string::npos);
  CHECK(t.path[1].find("u2") != std::string::npos);
  CHECK(explain(m2, 0, {}, parse("dia true")).value);
}

TEST_CASE("duality and locality on random models") {
  Sampler smp(sampler_seed(17));
  for (int i = 0; i < 200; ++i) {
    Formula f = to_nnf(smp.foml(10));
    KripkeModel m = smp.model(4, 3);
    REQUIRE(validate(m).ok());
    for (WorldId w = 0; w < m.world_count(); ++w) {
      Assignment s;
      const auto& dom = m.local_domain(w);
      std::size_t k = 0;
      for (Var v : free_vars(f)) s[v] = dom[k++ % dom.size()];
      bool dia = check(m, w, s, Formula::dia(f));
      CHECK(dia == !check(m, w, s, Formula::box(negate_nnf(f))));
      KripkeModel sub = reachable_submodel(m, w);
      WorldId sw = *sub.find_world(m.world_name(w));
      CHECK(check(sub, sw, s, f) == check(m, w, s, f));
    }
  }
}
