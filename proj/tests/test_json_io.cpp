#include <doctest.h>

#include <filesystem>

#include "bfoml/json_io.hpp"
#include "bfoml/sampler.hpp"

using namespace bfoml;

namespace {
std::string fx(const std::string& name) { return std::string(BFOML_FIXTURES) + "/" + name; }
}  // namespace

TEST_CASE("example model loads") {
  KripkeModel m2 = read_model_file(fx("m2.json"));
  CHECK(m2.world_count() == 3);
  CHECK(m2.successors(*m2.find_world("w2")).size() == 2);
  CHECK(is_constant_domain(m2));
}

TEST_CASE("fixtures are canonical") {
  for (const auto& e : std::filesystem::recursive_directory_iterator(BFOML_FIXTURES)) {
    if (e.path().extension() != ".json") continue;
    std::string text = read_text_file(e.path().string());
    CAPTURE(e.path().string());
    if (text.find("\"worlds\"") != std::string::npos)
      CHECK(write_model(read_model(text)) == text);
    else if (text.find("\"tiles\"") != std::string::npos)
      CHECK(write_tiling(read_tiling(text)) == text);
  }
}

TEST_CASE("monotonicity violations are reported on load") {
  const char* bad = R"({"worlds": ["w", "v"], "domain": ["a", "b"],
    "delta": {"w": ["a", "b"], "v": ["a"]}, "relation": [["w", "v"]]})";
  CHECK_THROWS_AS(read_model(bad), ModelInvalid);
}

TEST_CASE("schema errors are distinct") {
  CHECK_THROWS_AS(read_model("{"), SchemaError);
  CHECK_THROWS_AS(read_model(R"({"worlds": ["w"]})"), SchemaError);
  CHECK_THROWS_AS(read_model(R"({"worlds": ["w"], "domain": ["a"], "delta": {"w": ["z"]}})"),
                  SchemaError);
  CHECK_THROWS_AS(read_model(R"({"worlds": ["w"], "domain": ["a"], "delta": {"w": ["a"]},
                                 "extra": 1})"),
                  SchemaError);
  CHECK_THROWS_AS(read_tiling(R"({"tiles": ["a"], "h": [], "v": [], "t0": "b"})"), SchemaError);
}

TEST_CASE("write and read round trip") {
  Sampler smp(sampler_seed(41));
  for (int i = 0; i < 100; ++i) {
    KripkeModel m = smp.model(4, 3);
    std::string j = write_model(m);
    CHECK(write_model(read_model(j)) == j);
  }
  TilingInstance t{{"a", "b"}, {{"a", "b"}}, {}, "a"};
  CHECK(write_tiling(read_tiling(write_tiling(t))) == write_tiling(t));
}
