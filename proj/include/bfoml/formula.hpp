#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace bfoml {

// Variables and predicate symbols are interned; ids are stable for the
// lifetime of the process and give the total order on variables.
class Var {
 public:
  Var() = default;
  static Var named(std::string_view name);
  std::uint32_t id() const { return id_; }
  const std::string& name() const;
  auto operator<=>(const Var&) const = default;

 private:
  explicit Var(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

class Pred {
 public:
  Pred() = default;
  static Pred named(std::string_view name);
  std::uint32_t id() const { return id_; }
  const std::string& name() const;
  auto operator<=>(const Pred&) const = default;

 private:
  explicit Pred(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

struct VarHash {
  std::size_t operator()(Var v) const noexcept { return std::hash<std::uint32_t>{}(v.id()); }
};

using VarSet = std::set<Var>;

enum class Kind : std::uint8_t {
  True,
  False,
  Atom,
  NegAtom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Box,
  Dia,
  Forall,
  Exists,
};

namespace detail {
struct Node;
}

// Immutable formula handle. Copies share structure; equality is structural.
class Formula {
 public:
  Formula() = default;  // empty handle; assign before use

  static Formula top();
  static Formula bottom();
  static Formula atom(Pred p, std::vector<Var> args);
  static Formula neg_atom(Pred p, std::vector<Var> args);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula box(Formula f);
  static Formula dia(Formula f);
  static Formula forall(Var x, Formula f);
  static Formula exists(Var x, Formula f);

  Kind kind() const;
  Pred pred() const;                  // Atom, NegAtom
  std::span<const Var> args() const;  // Atom, NegAtom
  Var bound() const;                  // Forall, Exists
  const Formula& lhs() const;         // binary connectives
  const Formula& rhs() const;
  const Formula& body() const;        // Not, Box, Dia, Forall, Exists

  std::size_t hash() const;
  std::size_t size() const;
  bool is_binary() const;
  bool is_unary() const;
  bool is_quantifier() const { return kind() == Kind::Forall || kind() == Kind::Exists; }
  bool is_modal() const { return kind() == Kind::Box || kind() == Kind::Dia; }

  bool operator==(const Formula& other) const;
  bool same_node(const Formula& other) const { return node_ == other.node_; }
  bool empty() const { return !node_; }

 private:
  explicit Formula(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// Left-nested folds; empty conjunction is true, empty disjunction is false.
Formula conj_all(const std::vector<Formula>& fs);
Formula disj_all(const std::vector<Formula>& fs);

// Insertion-ordered, duplicate-free collection (the Γ of a tableau node).
class FormulaSet {
 public:
  FormulaSet() = default;
  FormulaSet(std::initializer_list<Formula> fs);

  bool insert(const Formula& f);
  bool contains(const Formula& f) const { return index_.count(f) != 0; }
  bool erase(const Formula& f);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Formula& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Formula>& items() const { return items_; }

  // Order-insensitive comparison.
  bool same_elements(const FormulaSet& other) const;

 private:
  std::vector<Formula> items_;
  std::unordered_set<Formula, FormulaHash> index_;
};

// x0, x1, x2, ... ; next_fresh skips names the caller reports as taken.
class VariableEnumeration {
 public:
  explicit VariableEnumeration(std::string prefix = "x", std::size_t start = 0)
      : prefix_(std::move(prefix)), cursor_(start) {}
  Var next();
  Var next_fresh(const std::function<bool(Var)>& taken);
  std::size_t cursor() const { return cursor_; }
  void set_cursor(std::size_t c) { cursor_ = c; }

 private:
  std::string prefix_;
  std::size_t cursor_;
};

class CaptureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

VarSet free_vars(const Formula& f);
VarSet bound_vars(const Formula& f);
VarSet all_vars(const Formula& f);
void collect_all_vars(const Formula& f, std::unordered_set<Var, VarHash>& out);

// Replaces free occurrences of `old` by `fresh`; throws CaptureError if a
// replaced occurrence would fall under a binder of `fresh`.
Formula substitute(const Formula& f, Var fresh, Var old);

Formula to_nnf(const Formula& f);
bool is_nnf(const Formula& f);
// NNF of the negation of an NNF formula.
Formula negate_nnf(const Formula& f);

std::size_t size(const Formula& f);
std::size_t size(const FormulaSet& s);
std::size_t modal_depth(const Formula& f);

bool is_literal(const Formula& f);
bool is_module(const Formula& f);
FormulaSet components(const Formula& f);
bool is_existential_safe(const Formula& f);
bool is_existential_safe(const FormulaSet& s);

bool is_clean(const Formula& f);
bool is_clean(const FormulaSet& s);
bool is_clean(std::span<const Formula> fs);

// Renames every bound variable of `f` using `fresh()`; free variables stay.
Formula rename_bound(const Formula& f, const std::function<Var()>& fresh);

std::vector<Formula> clean_rewrite(const FormulaSet& gamma, const std::vector<Formula>& additions,
                                   VariableEnumeration& enumeration);

bool alpha_equivalent(const Formula& a, const Formula& b);

// Predicate arities; throws std::invalid_argument on inconsistent use.
std::vector<std::pair<Pred, std::size_t>> signature(const Formula& f);

// Complementary literal (Atom <-> NegAtom, true <-> false).
Formula complement_literal(const Formula& lit);

namespace detail {
struct Node {
  Kind kind;
  Pred pred;
  std::vector<Var> vars;  // atom arguments, or the bound variable
  Formula a;
  Formula b;
  std::size_t hash = 0;
  std::size_t size = 0;
};
}  // namespace detail

inline Kind Formula::kind() const { return node_->kind; }
inline Pred Formula::pred() const { return node_->pred; }
inline std::span<const Var> Formula::args() const { return node_->vars; }
inline Var Formula::bound() const { return node_->vars.front(); }
inline const Formula& Formula::lhs() const { return node_->a; }
inline const Formula& Formula::rhs() const { return node_->b; }
inline const Formula& Formula::body() const { return node_->a; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline std::size_t Formula::size() const { return node_->size; }

}  // namespace bfoml

template <>
struct std::hash<bfoml::Formula> {
  std::size_t operator()(const bfoml::Formula& f) const noexcept { return f.hash(); }
};
template <>
struct std::hash<bfoml::Var> {
  std::size_t operator()(bfoml::Var v) const noexcept { return v.id(); }
};
