#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message,
             std::vector<std::string> expected);
  std::size_t line;
  std::size_t column;
  std::string message;
  std::vector<std::string> expected;
};

// Surface syntax:
//   atoms P(x,y), p, true, false; ~ & | -> <->; box F, dia F;
//   forall x. F, exists x. F (scope extends as far right as possible);
//   '#' starts a comment running to end of line.
// Returns the raw formula (derived connectives are kept).
Formula parse(std::string_view text);

// Canonical fully-parenthesized text; parse(print(f)) == f.
std::string print(const Formula& f);

}  // namespace bfoml
