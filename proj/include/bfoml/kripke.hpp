#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

using WorldId = std::size_t;
using ElemId = std::size_t;
using Tuple = std::vector<ElemId>;

// Finite Kripke structure (W, D, delta, R, rho). Worlds and elements carry
// names; ids are insertion indices.
class KripkeModel {
 public:
  WorldId add_world(const std::string& name);
  ElemId add_element(const std::string& name);
  void add_local(WorldId w, ElemId d);
  void add_edge(WorldId from, WorldId to);
  void add_fact(WorldId w, Pred p, Tuple t);

  std::size_t world_count() const { return worlds_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  const std::string& world_name(WorldId w) const { return worlds_.at(w).name; }
  const std::string& element_name(ElemId d) const { return elements_.at(d); }
  std::optional<WorldId> find_world(const std::string& name) const;
  std::optional<ElemId> find_element(const std::string& name) const;

  // Sorted by element id.
  const std::vector<ElemId>& local_domain(WorldId w) const { return worlds_.at(w).local; }
  bool in_local(WorldId w, ElemId d) const;
  const std::vector<WorldId>& successors(WorldId w) const { return worlds_.at(w).succ; }
  std::vector<std::pair<WorldId, WorldId>> edges() const;

  bool holds(WorldId w, Pred p, const Tuple& t) const;
  const std::map<Pred, std::set<Tuple>>& facts(WorldId w) const { return worlds_.at(w).facts; }

 private:
  struct WorldData {
    std::string name;
    std::vector<ElemId> local;
    std::vector<WorldId> succ;
    std::map<Pred, std::set<Tuple>> facts;
  };
  std::vector<WorldData> worlds_;
  std::vector<std::string> elements_;
  std::unordered_map<std::string, WorldId> world_index_;
  std::unordered_map<std::string, ElemId> element_index_;
};

using Assignment = std::map<Var, ElemId>;

struct Violation {
  enum class Kind { EmptyLocalDomain, Monotonicity, TupleOutsideDomain, ArityMismatch };
  Kind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const KripkeModel& m);
bool is_constant_domain(const KripkeModel& m);

// Raised when the assignment does not cover or is not relevant for the
// free variables of the checked formula.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& msg, Var v) : std::invalid_argument(msg), var(v) {}
  Var var;
};

bool check(const KripkeModel& m, WorldId w, const Assignment& sigma, const Formula& phi);

// Same verdict as check; on false, `path` lists the refuting clauses from the
// outermost formula inward.
struct CheckTrace {
  bool value = false;
  std::vector<std::string> path;
};
CheckTrace explain(const KripkeModel& m, WorldId w, const Assignment& sigma, const Formula& phi);

// Worlds reachable from w (w included), with relation and valuation restricted.
KripkeModel reachable_submodel(const KripkeModel& m, WorldId w);

}  // namespace bfoml
