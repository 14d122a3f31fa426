#include <doctest.h>

#include <cmath>

#include "bfoml/encodings.hpp"
#include "bfoml/fragment.hpp"
#include "bfoml/json_io.hpp"
#include "bfoml/kripke.hpp"
#include "bfoml/syntax.hpp"
#include "bfoml/tableau.hpp"

using namespace bfoml;

namespace {
TilingInstance tiling(const std::string& name) {
  return read_tiling_file(std::string(BFOML_FIXTURES) + "/" + name);
}

TilingInstance two_tiles() {
  return TilingInstance{{"t0", "t1"}, {{"t0", "t1"}}, {}, "t0"};
}

Formula part(const NamedParts& parts, const std::string& name) {
  for (const auto& [n, f] : parts)
    if (n == name) return f;
  FAIL("no part " << name);
  return {};
}

bool mentions(const Formula& f, const Formula& sub) {
  if (f == sub) return true;
  if (f.is_binary()) return mentions(f.lhs(), sub) || mentions(f.rhs(), sub);
  if (f.is_unary() || f.is_quantifier()) return mentions(f.body(), sub);
  return false;
}

KripkeModel chain(std::size_t len) {
  KripkeModel m;
  m.add_element("d");
  for (std::size_t i = 0; i < len; ++i) {
    m.add_world("w" + std::to_string(i));
    m.add_local(i, 0);
    if (i) m.add_edge(i - 1, i);
  }
  return m;
}
}  // namespace

TEST_CASE("delta recurrence") {
  CHECK(delta_n(0) == Formula::top());
  CHECK(print(delta_n(1)) == "(dia true) & (box true)");
  CHECK(print(delta_n(2)) == "(dia true) & (box ((dia true) & (box true)))");
  for (std::size_t n = 0; n <= 4; ++n) {
    CHECK(check(chain(n + 1), 0, {}, delta_n(n)));
    if (n) CHECK_FALSE(check(chain(n), 0, {}, delta_n(n)));
  }
}

TEST_CASE("shorthands") {
  auto inst = two_tiles();
  Var x = Var::named("x"), y = Var::named("y");
  CHECK(only_t(inst, "t0", x) == parse("tile_t0(x) & ~tile_t1(x)"));
  CHECK(hsuc(inst, x, y) == parse("P(x,y) -> (tile_t0(x) & tile_t1(y))"));
  CHECK(vsuc(inst, x, y) == parse("Q(x,y) -> false"));
  CHECK_THROWS(only_t(inst, "t9", x));
}

TEST_CASE("grid encodings land in their fragments") {
  for (const char* f : {"one_tile.json", "tilings/no_horizontal.json", "tilings/striped.json"}) {
    auto inst = tiling(f);
    Formula a = to_nnf(encode_ebba(inst));
    auto ua = bundles_used(a);
    REQUIRE(ua.has_value());
    CHECK(ua->subset_of({Bundle::EB, Bundle::BA}));
    CHECK_FALSE(in_abbabe(a));
    CHECK(classify(*ua, DomainRegime::Increasing).verdict == FragmentStatus::Verdict::Undecidable);
    CHECK(is_clean(FormulaSet{normalize(a)}));

    Formula b = to_nnf(encode_abebbe(inst));
    auto ub = bundles_used(b);
    REQUIRE(ub.has_value());
    CHECK(ub->subset_of({Bundle::AB, Bundle::EB, Bundle::BE}));
    CHECK(classify(*ub, DomainRegime::Increasing).verdict == FragmentStatus::Verdict::Undecidable);
  }
  auto inst = tiling("one_tile.json");
  CHECK(mentions(part(ebba_parts(inst), "alpha0"), delta_n(3)));
  Formula a0 = part(abebbe_parts(inst), "alpha0");
  CHECK(mentions(a0, delta_n(3)));
}

TEST_CASE("encoding size grows with the instance") {
  TilingInstance one{{"a"}, {{"a", "a"}}, {{"a", "a"}}, "a"};
  TilingInstance three{{"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}}, {{"a", "a"}}, "a"};
  CHECK(size(encode_ebba(one)) < size(encode_ebba(three)));
}

TEST_CASE("no-FMP formulas") {
  auto f = no_fmp_formulas();
  CHECK_FALSE(in_lbf(to_nnf(f.phi2)));
  auto u1 = bundles_used(to_nnf(f.phi1));
  REQUIRE(u1.has_value());
  CHECK(u1->subset_of({Bundle::EB, Bundle::BE}));
  auto u3 = bundles_used(to_nnf(f.phi3));
  REQUIRE(u3.has_value());
  CHECK(u3->subset_of({Bundle::BE}));
}

TEST_CASE("box up to n") {
  Formula p = parse("P(x)");
  CHECK(box_upto(0, p) == p);
  CHECK(box_upto(1, p) == Formula::conj(p, Formula::box(p)));
  CHECK(box_n(2, p) == Formula::box(Formula::box(p)));
  CHECK(dia_n(1, p) == Formula::dia(p));
}

TEST_CASE("successor formula") {
  Formula s2 = succ_formula(2);
  CHECK(s2.kind() == Kind::Or);
  // two position cases, checked semantically on every pair of 2-bit numbers
  KripkeModel m;
  m.add_world("w");
  for (int v = 0; v < 4; ++v) {
    m.add_element("n" + std::to_string(v));
    m.add_local(0, v);
    for (int k = 0; k < 2; ++k)
      if (v >> k & 1) m.add_fact(0, bit_pred(k), {static_cast<ElemId>(v)});
  }
  for (ElemId a = 0; a < 4; ++a)
    for (ElemId b = 0; b < 4; ++b) {
      Assignment s{{Var::named("x"), a}, {Var::named("y"), b}};
      CAPTURE(a);
      CAPTURE(b);
      CHECK(check(m, 0, s, s2) == (b == a + 1));
    }
}

TEST_CASE("exponential encodings") {
  auto inst = tiling("one_tile.json");
  std::vector<double> sizes;
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK(in_lbf(to_nnf(alpha_n(n))));
    Formula b = beta_nt(inst, n);
    CHECK(in_lbf(to_nnf(b)));
    sizes.push_back(static_cast<double>(size(b)));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i] / sizes[i - 1] < 4.0);
  // log-log slope between n=2 and n=4 stays at most cubic
  CHECK(std::log(sizes[3] / sizes[1]) / std::log(2.0) <= 3.0);
}

TEST_CASE("tiling oracle") {
  CHECK(tiling_oracle(TilingInstance{{"a"}, {{"a", "a"}}, {{"a", "a"}}, "a"}, 2));
  CHECK_FALSE(tiling_oracle(TilingInstance{{"a"}, {}, {{"a", "a"}}, "a"}, 2));
  CHECK(tiling_oracle(
      TilingInstance{{"a", "b"}, {{"a", "b"}, {"b", "a"}}, {{"a", "a"}, {"b", "b"}}, "a"}, 2));
  CHECK_FALSE(tiling_oracle(
      TilingInstance{{"a", "b"}, {{"a", "b"}, {"b", "a"}}, {{"a", "b"}}, "a"}, 2));
  CHECK(tiling_oracle(TilingInstance{{"a"}, {}, {}, "a"}, 1));
}

TEST_CASE("tiling instance validation") {
  CHECK_THROWS(TilingInstance{{}, {}, {}, "a"}.validate());
  CHECK_THROWS(TilingInstance{{"a"}, {{"a", "b"}}, {}, "a"}.validate());
  CHECK_THROWS(TilingInstance{{"a"}, {}, {}, "b"}.validate());
}
