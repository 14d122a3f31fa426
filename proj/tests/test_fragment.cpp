#include <doctest.h>

#include "bfoml/encodings.hpp"
#include "bfoml/fragment.hpp"
#include "bfoml/sampler.hpp"
#include "bfoml/syntax.hpp"

using namespace bfoml;

namespace {
Formula N(const char* s) { return to_nnf(parse(s)); }
}  // namespace

TEST_CASE("bundles used") {
  CHECK(bundles_used(N("exists x. box P(x)")) == BundleSet{Bundle::EB});
  CHECK(bundles_used(N("box forall x. exists y. box P(x,y)")) == BundleSet{Bundle::BA, Bundle::EB});
  CHECK_FALSE(bundles_used(N("forall x. exists y. box P(x,y)")).has_value());
  CHECK(bundled_violation(N("forall x. exists y. box P(x,y)")).has_value());
  CHECK(bundles_used(N("box P(x) & dia Q(x)")) == BundleSet{});
  CHECK(bundles_used(N("dia forall x. P(x)")) == BundleSet{Bundle::BE});
  CHECK(bundles_used(N("exists x. dia P(x)")) == BundleSet{Bundle::AB});
}

TEST_CASE("loosely bundled fragment") {
  CHECK(in_lbf(N("exists x. forall y. (P(x,y) | box Q(x))")));
  CHECK_FALSE(in_lbf(N("forall x. exists y. P(x,y)")));
  CHECK(lbf_violation(N("forall x. exists y. P(x,y)"))->find("forall-exists") != std::string::npos);
  CHECK(in_lbf(N("box exists x. P(x)")));
  CHECK_FALSE(in_lbf(no_fmp_formulas().phi2));
}

TEST_CASE("ABBABE membership") {
  CHECK(in_abbabe(N("dia forall x. ((exists y. dia A(x,y)) | forall z. box B(x,z))")));
  CHECK_FALSE(in_abbabe(N("forall x. ((exists y. dia A(x,y)) | forall z. box B(x,z))")));
  CHECK_FALSE(in_abbabe(N("exists x. box P(x)")));
}

TEST_CASE("ABEB and BABE are inside LBF") {
  Sampler smp(sampler_seed(31));
  for (int i = 0; i < 1000; ++i) {
    Formula a = smp.abeb(14);
    Formula b = smp.babe(14);
    REQUIRE(in_bundled_with(a, {Bundle::AB, Bundle::EB}));
    REQUIRE(in_bundled_with(b, {Bundle::BA, Bundle::BE}));
    CHECK(in_lbf(a));
    CHECK(in_lbf(b));
  }
}

TEST_CASE("ABBABE grammar agrees with bundle sets") {
  Sampler smp(sampler_seed(37));
  for (int i = 0; i < 500; ++i) {
    Formula f = to_nnf(smp.foml(10));
    bool via_bundles = false;
    for (auto s : bundle_parses(f)) via_bundles |= s.subset_of(kAbbabe);
    CHECK(in_abbabe(f) == via_bundles);
    Formula g = smp.abbabe(12);
    CHECK(in_abbabe(g));
  }
}

TEST_CASE("classification examples") {
  using V = FragmentStatus::Verdict;
  auto ab_c = classify({Bundle::AB}, DomainRegime::Constant);
  CHECK(ab_c.verdict == V::Undecidable);
  auto eb_c = classify({Bundle::EB}, DomainRegime::Constant);
  CHECK(eb_c.verdict == V::Decidable);
  CHECK(eb_c.label() == "PSpace-complete");
  CHECK(classify({Bundle::EB, Bundle::BE}, DomainRegime::Increasing).verdict == V::NoFMP);
  auto abeb = classify({Bundle::AB, Bundle::EB}, DomainRegime::Increasing);
  CHECK(abeb.verdict == V::Decidable);
  CHECK(abeb.upper == "ExpSpace");
  CHECK(abeb.lower == "NexpTime");
  CHECK(classify_lbf().label() == "ExpSpace/NexpTime");
}

TEST_CASE("classification is total and monotone in undecidability") {
  for (auto regime : {DomainRegime::Constant, DomainRegime::Increasing}) {
    for (unsigned m = 0; m < 16; ++m) {
      BundleSet s(static_cast<std::uint8_t>(m));
      FragmentStatus st;
      REQUIRE_NOTHROW(st = classify(s, regime));
      CHECK_FALSE(st.note.empty());
      if (st.verdict != FragmentStatus::Verdict::Undecidable) continue;
      for (unsigned m2 = 0; m2 < 16; ++m2) {
        BundleSet t(static_cast<std::uint8_t>(m2));
        if (s.subset_of(t))
          CHECK(classify(t, regime).verdict == FragmentStatus::Verdict::Undecidable);
      }
    }
  }
}

TEST_CASE("bundle set text") {
  CHECK(BundleSet::parse("ab,be") == BundleSet{Bundle::AB, Bundle::BE});
  CHECK(BundleSet{Bundle::EB, Bundle::AB}.to_string() == "AB,EB");
  CHECK_THROWS(BundleSet::parse("xy"));
}
