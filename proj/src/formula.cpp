#include "bfoml/formula.hpp"

#include <algorithm>
#include <deque>
#include <mutex>

namespace bfoml {

namespace {

class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
  }
  const std::string& name(std::uint32_t id) {
    std::lock_guard<std::mutex> lock(mu_);
    return names_.at(id);
  }

 private:
  std::mutex mu_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

SymbolTable& var_table() {
  static SymbolTable t;
  return t;
}
SymbolTable& pred_table() {
  static SymbolTable t;
  return t;
}

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Var Var::named(std::string_view name) { return Var(var_table().intern(name)); }
const std::string& Var::name() const { return var_table().name(id_); }
Pred Pred::named(std::string_view name) { return Pred(pred_table().intern(name)); }
const std::string& Pred::name() const { return pred_table().name(id_); }

Formula Formula::top() {
  static const Formula t = [] {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::True;
    n->hash = mix(0, static_cast<std::size_t>(Kind::True));
    n->size = 1;
    return Formula(n);
  }();
  return t;
}

Formula Formula::bottom() {
  static const Formula t = [] {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::False;
    n->hash = mix(0, static_cast<std::size_t>(Kind::False));
    n->size = 1;
    return Formula(n);
  }();
  return t;
}

namespace {
std::shared_ptr<detail::Node> raw_node(Kind k, Pred p, std::vector<Var> vars, const Formula* a,
                                       const Formula* b) {
  auto n = std::make_shared<detail::Node>();
  n->kind = k;
  n->pred = p;
  n->vars = std::move(vars);
  std::size_t h = mix(0x51ed27, static_cast<std::size_t>(k));
  std::size_t sz = 1;
  if (k == Kind::Atom || k == Kind::NegAtom) {
    h = mix(h, p.id());
    sz += n->vars.size();
  }
  for (Var v : n->vars) h = mix(h, v.id() + 1);
  if (a) {
    n->a = *a;
    h = mix(h, a->hash());
    sz += a->size();
  }
  if (b) {
    n->b = *b;
    h = mix(h, b->hash());
    sz += b->size();
  }
  n->hash = h;
  n->size = sz;
  return n;
}
}  // namespace

Formula Formula::atom(Pred p, std::vector<Var> args) {
  return Formula(raw_node(Kind::Atom, p, std::move(args), nullptr, nullptr));
}
Formula Formula::neg_atom(Pred p, std::vector<Var> args) {
  return Formula(raw_node(Kind::NegAtom, p, std::move(args), nullptr, nullptr));
}
Formula Formula::negation(Formula f) { return Formula(raw_node(Kind::Not, {}, {}, &f, nullptr)); }
Formula Formula::conj(Formula a, Formula b) { return Formula(raw_node(Kind::And, {}, {}, &a, &b)); }
Formula Formula::disj(Formula a, Formula b) { return Formula(raw_node(Kind::Or, {}, {}, &a, &b)); }
Formula Formula::implies(Formula a, Formula b) {
  return Formula(raw_node(Kind::Implies, {}, {}, &a, &b));
}
Formula Formula::iff(Formula a, Formula b) { return Formula(raw_node(Kind::Iff, {}, {}, &a, &b)); }
Formula Formula::box(Formula f) { return Formula(raw_node(Kind::Box, {}, {}, &f, nullptr)); }
Formula Formula::dia(Formula f) { return Formula(raw_node(Kind::Dia, {}, {}, &f, nullptr)); }
Formula Formula::forall(Var x, Formula f) {
  return Formula(raw_node(Kind::Forall, {}, {x}, &f, nullptr));
}
Formula Formula::exists(Var x, Formula f) {
  return Formula(raw_node(Kind::Exists, {}, {x}, &f, nullptr));
}

bool Formula::is_binary() const {
  switch (kind()) {
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff:
      return true;
    default:
      return false;
  }
}

bool Formula::is_unary() const {
  switch (kind()) {
    case Kind::Not:
    case Kind::Box:
    case Kind::Dia:
    case Kind::Forall:
    case Kind::Exists:
      return true;
    default:
      return false;
  }
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const auto& x = *node_;
  const auto& y = *other.node_;
  if (x.hash != y.hash || x.size != y.size || x.kind != y.kind || x.pred != y.pred ||
      x.vars != y.vars)
    return false;
  if (!x.a.empty() && !(x.a == y.a)) return false;
  if (!x.b.empty() && !(x.b == y.b)) return false;
  return true;
}

Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::conj(acc, fs[i]);
  return acc;
}

Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::bottom();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::disj(acc, fs[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// FormulaSet

FormulaSet::FormulaSet(std::initializer_list<Formula> fs) {
  for (const auto& f : fs) insert(f);
}

bool FormulaSet::insert(const Formula& f) {
  if (!index_.insert(f).second) return false;
  items_.push_back(f);
  return true;
}

bool FormulaSet::erase(const Formula& f) {
  if (index_.erase(f) == 0) return false;
  items_.erase(std::find(items_.begin(), items_.end(), f));
  return true;
}

bool FormulaSet::same_elements(const FormulaSet& other) const {
  if (size() != other.size()) return false;
  return std::all_of(items_.begin(), items_.end(),
                     [&](const Formula& f) { return other.contains(f); });
}

// ---------------------------------------------------------------------------
// VariableEnumeration

Var VariableEnumeration::next() { return Var::named(prefix_ + std::to_string(cursor_++)); }

Var VariableEnumeration::next_fresh(const std::function<bool(Var)>& taken) {
  for (;;) {
    Var v = next();
    if (!taken(v)) return v;
  }
}

// ---------------------------------------------------------------------------
// Variables

namespace {

void free_vars_rec(const Formula& f, std::vector<Var>& scope, VarSet& out) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return;
    case Kind::Atom:
    case Kind::NegAtom:
      for (Var v : f.args())
        if (std::find(scope.begin(), scope.end(), v) == scope.end()) out.insert(v);
      return;
    case Kind::Forall:
    case Kind::Exists:
      scope.push_back(f.bound());
      free_vars_rec(f.body(), scope, out);
      scope.pop_back();
      return;
    default:
      free_vars_rec(f.lhs(), scope, out);
      if (f.is_binary()) free_vars_rec(f.rhs(), scope, out);
      return;
  }
}

template <typename Fn>
void visit(const Formula& f, Fn&& fn) {
  fn(f);
  if (f.is_binary()) {
    visit(f.lhs(), fn);
    visit(f.rhs(), fn);
  } else if (f.is_unary()) {
    visit(f.body(), fn);
  }
}

}  // namespace

VarSet free_vars(const Formula& f) {
  VarSet out;
  std::vector<Var> scope;
  free_vars_rec(f, scope, out);
  return out;
}

VarSet bound_vars(const Formula& f) {
  VarSet out;
  visit(f, [&](const Formula& g) {
    if (g.is_quantifier()) out.insert(g.bound());
  });
  return out;
}

VarSet all_vars(const Formula& f) {
  VarSet out;
  visit(f, [&](const Formula& g) {
    if (g.is_quantifier()) out.insert(g.bound());
    if (g.kind() == Kind::Atom || g.kind() == Kind::NegAtom)
      for (Var v : g.args()) out.insert(v);
  });
  return out;
}

void collect_all_vars(const Formula& f, std::unordered_set<Var, VarHash>& out) {
  visit(f, [&](const Formula& g) {
    if (g.is_quantifier()) out.insert(g.bound());
    if (g.kind() == Kind::Atom || g.kind() == Kind::NegAtom)
      for (Var v : g.args()) out.insert(v);
  });
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Formula rebuild_unary(const Formula& f, const Formula& body) {
  if (body.same_node(f.body())) return f;
  switch (f.kind()) {
    case Kind::Not:
      return Formula::negation(body);
    case Kind::Box:
      return Formula::box(body);
    case Kind::Dia:
      return Formula::dia(body);
    case Kind::Forall:
      return Formula::forall(f.bound(), body);
    case Kind::Exists:
      return Formula::exists(f.bound(), body);
    default:
      throw std::logic_error("rebuild_unary: not a unary node");
  }
}

Formula rebuild_binary(const Formula& f, const Formula& a, const Formula& b) {
  if (a.same_node(f.lhs()) && b.same_node(f.rhs())) return f;
  switch (f.kind()) {
    case Kind::And:
      return Formula::conj(a, b);
    case Kind::Or:
      return Formula::disj(a, b);
    case Kind::Implies:
      return Formula::implies(a, b);
    case Kind::Iff:
      return Formula::iff(a, b);
    default:
      throw std::logic_error("rebuild_binary: not a binary node");
  }
}

Formula subst_rec(const Formula& f, Var fresh, Var old, bool under_fresh) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
    case Kind::NegAtom: {
      auto args = f.args();
      if (std::find(args.begin(), args.end(), old) == args.end()) return f;
      if (under_fresh)
        throw CaptureError("substituting " + fresh.name() + " for " + old.name() +
                           " is captured by a binder of " + fresh.name());
      std::vector<Var> out(args.begin(), args.end());
      std::replace(out.begin(), out.end(), old, fresh);
      return f.kind() == Kind::Atom ? Formula::atom(f.pred(), std::move(out))
                                    : Formula::neg_atom(f.pred(), std::move(out));
    }
    case Kind::Forall:
    case Kind::Exists:
      if (f.bound() == old) return f;
      return rebuild_unary(f, subst_rec(f.body(), fresh, old, under_fresh || f.bound() == fresh));
    default:
      if (f.is_binary())
        return rebuild_binary(f, subst_rec(f.lhs(), fresh, old, under_fresh),
                              subst_rec(f.rhs(), fresh, old, under_fresh));
      return rebuild_unary(f, subst_rec(f.body(), fresh, old, under_fresh));
  }
}

}  // namespace

Formula substitute(const Formula& f, Var fresh, Var old) {
  if (fresh == old) return f;
  return subst_rec(f, fresh, old, false);
}

// ---------------------------------------------------------------------------
// NNF

namespace {

Formula nnf(const Formula& f, bool pos) {
  switch (f.kind()) {
    case Kind::True:
      return pos ? f : Formula::bottom();
    case Kind::False:
      return pos ? f : Formula::top();
    case Kind::Atom:
      return pos ? f : Formula::neg_atom(f.pred(), {f.args().begin(), f.args().end()});
    case Kind::NegAtom:
      return pos ? f : Formula::atom(f.pred(), {f.args().begin(), f.args().end()});
    case Kind::Not:
      return nnf(f.body(), !pos);
    case Kind::And:
      return pos ? Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                 : Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Kind::Or:
      return pos ? Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                 : Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Kind::Implies:
      return pos ? Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), true))
                 : Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case Kind::Iff:
      if (pos)
        return Formula::conj(Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), true)),
                             Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), false)));
      return Formula::disj(Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), false)),
                           Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true)));
    case Kind::Box:
      return pos ? Formula::box(nnf(f.body(), true)) : Formula::dia(nnf(f.body(), false));
    case Kind::Dia:
      return pos ? Formula::dia(nnf(f.body(), true)) : Formula::box(nnf(f.body(), false));
    case Kind::Forall:
      return pos ? Formula::forall(f.bound(), nnf(f.body(), true))
                 : Formula::exists(f.bound(), nnf(f.body(), false));
    case Kind::Exists:
      return pos ? Formula::exists(f.bound(), nnf(f.body(), true))
                 : Formula::forall(f.bound(), nnf(f.body(), false));
  }
  throw std::logic_error("nnf: unknown kind");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, true); }

Formula negate_nnf(const Formula& f) { return nnf(f, false); }

bool is_nnf(const Formula& f) {
  switch (f.kind()) {
    case Kind::Not:
    case Kind::Implies:
    case Kind::Iff:
      return false;
    case Kind::And:
    case Kind::Or:
      return is_nnf(f.lhs()) && is_nnf(f.rhs());
    case Kind::Box:
    case Kind::Dia:
    case Kind::Forall:
    case Kind::Exists:
      return is_nnf(f.body());
    default:
      return true;
  }
}

// ---------------------------------------------------------------------------
// Size, depth

std::size_t size(const Formula& f) { return f.size(); }

std::size_t size(const FormulaSet& s) {
  std::size_t n = 0;
  for (const auto& f : s) n += f.size();
  return n;
}

std::size_t modal_depth(const Formula& f) {
  if (f.is_binary()) return std::max(modal_depth(f.lhs()), modal_depth(f.rhs()));
  if (f.is_modal()) return 1 + modal_depth(f.body());
  if (f.is_unary()) return modal_depth(f.body());
  return 0;
}

// ---------------------------------------------------------------------------
// Literal / module / components

bool is_literal(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::NegAtom:
      return true;
    default:
      return false;
  }
}

bool is_module(const Formula& f) { return is_literal(f) || f.is_modal(); }

namespace {

void require_nnf_node(const Formula& f) {
  switch (f.kind()) {
    case Kind::Not:
    case Kind::Implies:
    case Kind::Iff:
      throw std::invalid_argument("components: formula is not in negation normal form");
    default:
      break;
  }
}

void components_rec(const Formula& f, FormulaSet& out) {
  require_nnf_node(f);
  if (is_module(f)) {
    out.insert(f);
  } else if (f.kind() == Kind::And || f.kind() == Kind::Or) {
    components_rec(f.lhs(), out);
    components_rec(f.rhs(), out);
  } else {
    out.insert(f);
    components_rec(f.body(), out);
  }
}

}  // namespace

FormulaSet components(const Formula& f) {
  FormulaSet out;
  components_rec(f, out);
  return out;
}

bool is_existential_safe(const Formula& f) {
  require_nnf_node(f);
  if (is_module(f)) return true;
  switch (f.kind()) {
    case Kind::And:
    case Kind::Or:
      return is_existential_safe(f.lhs()) && is_existential_safe(f.rhs());
    case Kind::Forall:
      return is_existential_safe(f.body());
    default:
      return false;
  }
}

bool is_existential_safe(const FormulaSet& s) {
  return std::all_of(s.begin(), s.end(), [](const Formula& f) { return is_existential_safe(f); });
}

// ---------------------------------------------------------------------------
// Cleanliness

bool is_clean(std::span<const Formula> fs) {
  std::unordered_set<Var, VarHash> bound;
  bool distinct = true;
  for (const auto& f : fs) {
    visit(f, [&](const Formula& g) {
      if (g.is_quantifier() && !bound.insert(g.bound()).second) distinct = false;
    });
    if (!distinct) return false;
  }
  for (const auto& f : fs)
    for (Var v : free_vars(f))
      if (bound.count(v)) return false;
  return true;
}

bool is_clean(const Formula& f) { return is_clean(std::span<const Formula>(&f, 1)); }

bool is_clean(const FormulaSet& s) { return is_clean(std::span<const Formula>(s.items())); }

namespace {

Formula rename_rec(const Formula& f, std::vector<std::pair<Var, Var>>& scope,
                   const std::function<Var()>& fresh) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
    case Kind::NegAtom: {
      std::vector<Var> args(f.args().begin(), f.args().end());
      bool changed = false;
      for (auto& a : args) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
          if (it->first == a) {
            if (it->second != a) changed = true;
            a = it->second;
            break;
          }
        }
      }
      if (!changed) return f;
      return f.kind() == Kind::Atom ? Formula::atom(f.pred(), std::move(args))
                                    : Formula::neg_atom(f.pred(), std::move(args));
    }
    case Kind::Forall:
    case Kind::Exists: {
      Var v = fresh();
      scope.emplace_back(f.bound(), v);
      Formula body = rename_rec(f.body(), scope, fresh);
      scope.pop_back();
      return f.kind() == Kind::Forall ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    default:
      if (f.is_binary())
        return rebuild_binary(f, rename_rec(f.lhs(), scope, fresh),
                              rename_rec(f.rhs(), scope, fresh));
      return rebuild_unary(f, rename_rec(f.body(), scope, fresh));
  }
}

}  // namespace

Formula rename_bound(const Formula& f, const std::function<Var()>& fresh) {
  std::vector<std::pair<Var, Var>> scope;
  return rename_rec(f, scope, fresh);
}

std::vector<Formula> clean_rewrite(const FormulaSet& gamma, const std::vector<Formula>& additions,
                                   VariableEnumeration& enumeration) {
  std::unordered_set<Var, VarHash> taken;
  for (const auto& g : gamma) collect_all_vars(g, taken);
  for (const auto& a : additions) collect_all_vars(a, taken);
  auto fresh = [&] {
    Var v = enumeration.next_fresh([&](Var c) { return taken.count(c) != 0; });
    taken.insert(v);
    return v;
  };
  std::vector<Formula> out;
  out.reserve(additions.size());
  for (const auto& a : additions) out.push_back(rename_bound(a, fresh));
  return out;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence (binder-depth comparison)

namespace {

using Scope = std::vector<Var>;

// Index of the innermost binder of v counting from the top, or -1 if free.
long binder_index(const Scope& s, Var v) {
  for (std::size_t i = s.size(); i-- > 0;)
    if (s[i] == v) return static_cast<long>(i);
  return -1;
}

bool alpha_rec(const Formula& a, const Formula& b, Scope& sa, Scope& sb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Atom:
    case Kind::NegAtom: {
      if (a.pred() != b.pred() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        long ia = binder_index(sa, a.args()[i]);
        long ib = binder_index(sb, b.args()[i]);
        if (ia != ib) return false;
        if (ia < 0 && a.args()[i] != b.args()[i]) return false;
      }
      return true;
    }
    case Kind::Forall:
    case Kind::Exists: {
      sa.push_back(a.bound());
      sb.push_back(b.bound());
      bool r = alpha_rec(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return r;
    }
    default:
      if (a.is_binary()) return alpha_rec(a.lhs(), b.lhs(), sa, sb) && alpha_rec(a.rhs(), b.rhs(), sa, sb);
      return alpha_rec(a.body(), b.body(), sa, sb);
  }
}

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b) {
  Scope sa, sb;
  return alpha_rec(a, b, sa, sb);
}

std::vector<std::pair<Pred, std::size_t>> signature(const Formula& f) {
  std::vector<std::pair<Pred, std::size_t>> sig;
  visit(f, [&](const Formula& g) {
    if (g.kind() != Kind::Atom && g.kind() != Kind::NegAtom) return;
    for (const auto& [p, n] : sig) {
      if (p == g.pred()) {
        if (n != g.args().size())
          throw std::invalid_argument("predicate " + p.name() + " used with arities " +
                                      std::to_string(n) + " and " +
                                      std::to_string(g.args().size()));
        return;
      }
    }
    sig.emplace_back(g.pred(), g.args().size());
  });
  std::sort(sig.begin(), sig.end(),
            [](const auto& x, const auto& y) { return x.first.name() < y.first.name(); });
  return sig;
}

Formula complement_literal(const Formula& lit) {
  switch (lit.kind()) {
    case Kind::True:
      return Formula::bottom();
    case Kind::False:
      return Formula::top();
    case Kind::Atom:
      return Formula::neg_atom(lit.pred(), {lit.args().begin(), lit.args().end()});
    case Kind::NegAtom:
      return Formula::atom(lit.pred(), {lit.args().begin(), lit.args().end()});
    default:
      throw std::invalid_argument("complement_literal: not a literal");
  }
}

}  // namespace bfoml
