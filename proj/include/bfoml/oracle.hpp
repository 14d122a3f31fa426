#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>

#include "bfoml/formula.hpp"
#include "bfoml/kripke.hpp"

namespace bfoml {

// Tree-shaped increasing-domain models: depth in R-steps, children per world,
// root domain size, and new elements per child.
struct SearchBounds {
  std::size_t max_depth = 2;
  std::size_t max_branching = 2;
  std::size_t max_root_domain = 2;
  std::size_t max_growth = 0;
  std::string to_string() const;
};

struct OracleOptions {
  double state_ceiling = 1e12;        // refuse bounds whose shape count exceeds this
  std::size_t step_ceiling = 500'000'000;  // abort a run that expands more formulas
};

struct Found {
  KripkeModel model;
  WorldId world = 0;
  Assignment assignment;
};

struct NoneWithinBounds {
  SearchBounds bounds;
};

struct OracleResult {
  std::variant<Found, NoneWithinBounds> outcome;
  std::size_t steps = 0;
  bool found() const { return std::holds_alternative<Found>(outcome); }
};

// Bounds too large to search; `count` is the computed number of model shapes.
class OracleRefused : public std::invalid_argument {
 public:
  OracleRefused(const std::string& msg, double c) : std::invalid_argument(msg), count(c) {}
  double count;
};

// The run hit the step ceiling before finishing.
class OracleLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of (root domain, free-variable placement, tree shape, growth) choices.
double oracle_state_count(const Formula& phi, const SearchBounds& b);

// Exhaustive: NoneWithinBounds means no tree model within the bounds
// satisfies phi at its root. phi is converted to NNF first.
OracleResult sat_bounded(const Formula& phi, const SearchBounds& bounds,
                         const OracleOptions& opts = {});

}  // namespace bfoml
