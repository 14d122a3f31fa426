#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bfoml/formula.hpp"
#include "bfoml/kripke.hpp"

namespace bfoml {

enum class SolverMode { Lbf, Abbabe };

enum class Rule { And, Or, Exists, ForallExistsDia, Forall, Dia, End };
std::string rule_name(Rule r);

struct WorldName {
  std::vector<std::string> symbols;
  static WorldName root() { return WorldName{{"r"}}; }
  WorldName child(std::size_t i) const;  // appends "v<i>", i starting at 1
  std::string to_string() const;
  bool operator==(const WorldName&) const = default;
};

struct TableauNode {
  WorldName world;
  FormulaSet gamma;
  std::vector<Var> sigma;  // Dom(sigma); sigma is the identity on it
  bool in_domain(Var v) const;
};

struct RuleApplication {
  Rule rule = Rule::End;
  Formula principal;  // empty for END
  // Or: the two alternatives (left first). Dia: one child per diamond.
  // Otherwise: the single successor.
  std::vector<TableauNode> successors;
  bool truncated = false;  // ForallExistsDia with fewer witnesses than the bound
};

// No rule applies: gamma holds only literals.
struct Saturated {};

class InvariantFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One deterministic rule step. `fresh` supplies new variables (it must not
// produce names occurring in the node). `witness_pairs` is the l used by the
// forall-exists-diamond rule before capping at its bound.
std::variant<RuleApplication, Saturated> apply_rule(const TableauNode& node, SolverMode mode,
                                                    VariableEnumeration& fresh,
                                                    std::size_t witness_pairs = 1);

// Complementary literal pair or false present.
bool has_clash(const FormulaSet& gamma);

struct TableauStep {
  Rule rule;
  Formula principal;
  std::vector<Formula> added;
  std::vector<Var> new_domain;
  std::string note;  // for Or: "left", "right" or "direct"
};

// A world's node path: the initial node, one node per step, ending at t_w.
struct WorldTrace {
  WorldName name;
  std::optional<std::size_t> parent;
  std::vector<Formula> initial_gamma;
  std::vector<Var> initial_domain;
  std::vector<TableauStep> steps;
  TableauNode last;
  std::vector<std::size_t> children;
};

struct Tableau {
  std::vector<WorldTrace> worlds;  // worlds[0] is the root world
  // Replays the steps of a world into its node sequence.
  std::vector<TableauNode> nodes(std::size_t world) const;
  std::size_t node_count() const;
};

bool is_open(const Tableau& t);

struct Extraction {
  KripkeModel model;
  WorldId root = 0;
  Assignment sigma;
};
// Throws std::invalid_argument if the tableau is not open.
Extraction extract_model(const Tableau& t);

struct SolverOptions {
  std::size_t max_nodes = 5'000'000;
  std::size_t max_witness_pairs = 8;
  bool check_invariants = false;
  std::ostream* trace = nullptr;
};

struct SolveStats {
  std::size_t nodes_created = 0;
  std::size_t worlds_created = 0;
  std::size_t max_domain = 0;
  std::size_t backtracks = 0;
  std::size_t backjumps = 0;  // right branches skipped because the left closure ignored the choice
  std::size_t cache_hits = 0;
  std::size_t stuck_nodes = 0;
  std::size_t clean_violations = 0;
  std::size_t witness_pairs = 0;  // l of the final abbabe round
  std::size_t rounds = 0;
  double seconds = 0;
};

struct Sat {
  Tableau tableau;
  Extraction extraction;
};
struct Unsat {};
struct ResourceExceeded {
  std::string limit;
};

struct SolveResult {
  std::variant<Sat, Unsat, ResourceExceeded> outcome;
  SolveStats stats;
  Formula theta;  // the normalized (NNF, clean) input
  bool is_sat() const { return std::holds_alternative<Sat>(outcome); }
  bool is_unsat() const { return std::holds_alternative<Unsat>(outcome); }
  bool exceeded() const { return std::holds_alternative<ResourceExceeded>(outcome); }
};

class NotInFragment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NNF, then clean renaming of bound variables.
Formula normalize(const Formula& theta);

SolveResult solve_lbf(const Formula& theta, const SolverOptions& opts = {});
SolveResult solve_abbabe(const Formula& theta, const SolverOptions& opts = {});

}  // namespace bfoml
