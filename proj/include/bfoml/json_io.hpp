#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "bfoml/encodings.hpp"
#include "bfoml/kripke.hpp"

namespace bfoml {

// Malformed JSON or a document that does not follow the schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document describing a structure that violates the model
// conditions (non-empty, increasing domains; tuples inside local domains).
class ModelInvalid : public std::runtime_error {
 public:
  explicit ModelInvalid(ValidationReport r)
      : std::runtime_error("invalid model: " + r.to_string()), report(std::move(r)) {}
  ValidationReport report;
};

// {"worlds": [...], "domain": [...], "delta": {w: [d, ...]},
//  "relation": [[w, v], ...], "valuation": {w: {P: [[d, ...], ...]}}}
KripkeModel read_model(std::string_view text);
KripkeModel read_model_file(const std::string& path);
// Canonical form: worlds, elements and edges in model order; keys, predicates
// and tuples sorted; empty interpretations omitted.
std::string write_model(const KripkeModel& m);

// {"tiles": [...], "h": [[t, t'], ...], "v": [...], "t0": t}
TilingInstance read_tiling(std::string_view text);
TilingInstance read_tiling_file(const std::string& path);
std::string write_tiling(const TilingInstance& inst);

std::string read_text_file(const std::string& path);

}  // namespace bfoml
