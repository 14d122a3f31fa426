#include <doctest.h>

#include <limits>
#include <sstream>

#include "bfoml/encodings.hpp"
#include "bfoml/oracle.hpp"
#include "bfoml/sampler.hpp"
#include "bfoml/syntax.hpp"
#include "bfoml/tableau.hpp"

using namespace bfoml;

namespace {
Formula F(const char* s) { return parse(s); }
Var V(const char* s) { return Var::named(s); }

TableauNode node(std::initializer_list<const char*> gamma, std::vector<Var> dom) {
  TableauNode n{WorldName::root(), {}, std::move(dom)};
  for (auto g : gamma) n.gamma.insert(F(g));
  return n;
}

RuleApplication step(const TableauNode& n, SolverMode mode = SolverMode::Lbf) {
  VariableEnumeration e;
  auto r = apply_rule(n, mode, e);
  REQUIRE(std::holds_alternative<RuleApplication>(r));
  return std::get<RuleApplication>(r);
}

void expect_sat_verified(const Formula& theta, const SolveResult& r) {
  REQUIRE(r.is_sat());
  const auto& ex = std::get<Sat>(r.outcome).extraction;
  CHECK(validate(ex.model).ok());
  CHECK(check(ex.model, ex.root, ex.sigma, to_nnf(theta)));
}
}  // namespace

TEST_CASE("individual rules") {
  auto a = step(node({"P(x) & Q(x)"}, {V("x")}));
  CHECK(a.rule == Rule::And);
  REQUIRE(a.successors.size() == 1);
  CHECK(a.successors[0].gamma.same_elements({F("P(x)"), F("Q(x)")}));

  auto f = step(node({"forall y. P(y)"}, {V("x"), V("z")}));
  CHECK(f.rule == Rule::Forall);
  CHECK(f.successors[0].gamma.same_elements({F("P(x)"), F("P(z)")}));

  auto d = step(node({"dia P(x)", "box Q(x)", "~R(x)"}, {V("x")}));
  CHECK(d.rule == Rule::Dia);
  REQUIRE(d.successors.size() == 1);
  CHECK(d.successors[0].world.to_string() == "rv1");
  CHECK(d.successors[0].gamma.same_elements({F("P(x)"), F("Q(x)")}));
  CHECK(d.successors[0].sigma == std::vector<Var>{V("x")});

  auto end = step(node({"box Q(x)", "P(x)"}, {V("x")}));
  CHECK(end.rule == Rule::End);
  CHECK(end.successors[0].gamma.same_elements({F("P(x)")}));

  auto o = step(node({"P(x) | Q(x)"}, {V("x")}));
  CHECK(o.rule == Rule::Or);
  CHECK(o.successors.size() == 2);

  auto e = step(node({"exists y. P(y)"}, {V("x")}));
  CHECK(e.rule == Rule::Exists);
  CHECK(e.successors[0].sigma.size() == 2);

  VariableEnumeration en;
  CHECK(std::holds_alternative<Saturated>(apply_rule(node({"P(x)", "~Q(x)"}, {V("x")}), SolverMode::Lbf, en)));
}

TEST_CASE("rule gating") {
  // forall waits for the existential to fire first
  CHECK(step(node({"forall y. P(y)", "exists z. dia Q(z)"}, {V("x")})).rule == Rule::Exists);
  // dia waits until every formula is a module
  CHECK(step(node({"dia P(x)", "forall y. Q(y)"}, {V("x")})).rule == Rule::Forall);
}

TEST_CASE("non-clean nodes are rejected") {
  VariableEnumeration e;
  CHECK_THROWS_AS(apply_rule(node({"P(x)", "exists x. Q(x)"}, {V("x")}), SolverMode::Lbf, e),
                  InvariantFault);
}

TEST_CASE("open tableaux") {
  CHECK(has_clash(FormulaSet{F("P(x)"), F("~P(x)")}));
  CHECK_FALSE(has_clash(FormulaSet{F("P(x)"), F("~P(y)")}));
  CHECK(has_clash(FormulaSet{F("false")}));
}

TEST_CASE("solve_lbf examples") {
  CHECK(solve_lbf(F("exists x. (P(x) & ~P(x))")).is_unsat());
  CHECK(solve_lbf(F("dia P(x) & box ~P(x)")).is_unsat());

  Formula t = F("exists x. box P(x)");
  auto r = solve_lbf(t);
  expect_sat_verified(t, r);
  const auto& ex = std::get<Sat>(r.outcome).extraction;
  CHECK(ex.model.world_count() == 1);
  CHECK(ex.model.local_domain(ex.root).size() == 2);
  CHECK(ex.model.edges().empty());

  Formula d2 = delta_n(2);
  auto r2 = solve_lbf(d2);
  expect_sat_verified(d2, r2);
  CHECK(std::get<Sat>(r2.outcome).extraction.model.world_count() == 3);

  Formula dp = F("dia P(x)");
  auto r3 = solve_lbf(dp);
  expect_sat_verified(dp, r3);
  const auto& m3 = std::get<Sat>(r3.outcome).extraction.model;
  REQUIRE(m3.world_count() == 2);
  CHECK(m3.world_name(1) == "rv1");

  CHECK_THROWS_AS(solve_lbf(F("forall x. exists y. P(x,y)")), NotInFragment);
}

TEST_CASE("solve_abbabe examples") {
  Formula ex = F("dia forall x. (box ~P(x,x) & exists y. dia P(x,y))");
  expect_sat_verified(ex, solve_abbabe(ex));
  // the box is vacuous at a world without successors
  Formula vac = F("dia forall x. forall y. box (P(x,y) & ~P(x,y))");
  expect_sat_verified(vac, solve_abbabe(vac));
  CHECK(sat_bounded(vac, {1, 1, 1, 0}).found());
  CHECK(solve_abbabe(F("dia (dia true & forall x. box (P(x,x) & ~P(x,x)))")).is_unsat());
  CHECK(solve_abbabe(F("box false & dia true")).is_unsat());
  CHECK_THROWS_AS(solve_abbabe(F("exists x. box P(x)")), NotInFragment);
}

TEST_CASE("node limit yields resource exceeded") {
  SolverOptions o;
  o.max_nodes = 3;
  auto r = solve_lbf(delta_n(5), o);
  CHECK(r.exceeded());
}

TEST_CASE("trace lists rule applications") {
  std::ostringstream out;
  SolverOptions o;
  o.trace = &out;
  solve_lbf(F("exists x. box P(x)"), o);
  std::string t = out.str();
  CHECK(t.find("exists r") != std::string::npos);
  CHECK(t.find("end r") != std::string::npos);
}

TEST_CASE("extracted tableau structure") {
  auto r = solve_lbf(F("dia (P(x) & dia Q(x))"));
  REQUIRE(r.is_sat());
  const auto& tab = std::get<Sat>(r.outcome).tableau;
  CHECK(is_open(tab));
  REQUIRE(tab.worlds.size() == 3);
  CHECK(tab.worlds[1].name.to_string() == "rv1");
  CHECK(tab.worlds[2].name.to_string() == "rv1v1");
  for (std::size_t w = 0; w < tab.worlds.size(); ++w)
    for (const auto& n : tab.nodes(w)) CHECK(is_clean(n.gamma));
}

TEST_CASE("oracle agreement on small formulas") {
  const char* cases[] = {
      "exists x. box P(x)",
      "dia P(x) & box ~P(x)",
      "(dia P(x)) & (dia ~P(x)) & box (P(x) | Q(x))",
      "exists x. forall y. (R(x,y) & dia ~R(x,y))",
      "(forall y. (P(y) | Q(y))) & exists z. (~P(z) & ~Q(z))",
      "box exists x. P(x) & dia forall y. ~P(y)",
  };
  for (const char* c : cases) {
    Formula f = F(c);
    auto r = solve_lbf(f);
    SearchBounds b{modal_depth(f), 2, free_vars(f).size() + 2, 0};
    CAPTURE(c);
    CHECK(r.is_sat() == sat_bounded(f, b).found());
  }
}

namespace {
std::size_t count_kind(const Formula& f, Kind k) {
  std::size_t c = f.kind() == k;
  if (f.is_binary()) return c + count_kind(f.lhs(), k) + count_kind(f.rhs(), k);
  if (f.is_unary() || f.is_quantifier()) return c + count_kind(f.body(), k);
  return c;
}
}  // namespace

TEST_CASE("solvers agree with the oracle when domains may grow") {
  Sampler smp(sampler_seed(101));
  smp.set_min_size(8);
  OracleOptions oo;
  oo.state_ceiling = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 300; ++i) {
    bool lbf = i % 3 != 0;
    Formula f = lbf ? smp.lbf(14) : smp.abbabe(11);
    SolverOptions so;
    so.max_nodes = 200'000;
    auto r = lbf ? solve_lbf(f, so) : solve_abbabe(f, so);
    if (r.exceeded()) continue;
    std::size_t ex = count_kind(r.theta, Kind::Exists);
    SearchBounds b{modal_depth(r.theta), std::max<std::size_t>(1, count_kind(r.theta, Kind::Dia)),
                   free_vars(r.theta).size() + 1 + ex, ex};
    OracleResult o;
    try {
      o = sat_bounded(r.theta, b, oo);
    } catch (const OracleLimit&) {
      continue;
    }
    CAPTURE(print(f));
    if (r.is_unsat()) CHECK_FALSE(o.found());
    if (lbf && r.is_sat()) CHECK(o.found());
  }
}
