#include "bfoml/tableau.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <unordered_set>

#include "bfoml/fragment.hpp"
#include "bfoml/syntax.hpp"

namespace bfoml {

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::And:
      return "and";
    case Rule::Or:
      return "or";
    case Rule::Exists:
      return "exists";
    case Rule::ForallExistsDia:
      return "forall-exists-dia";
    case Rule::Forall:
      return "forall";
    case Rule::Dia:
      return "dia";
    case Rule::End:
      return "end";
  }
  return "?";
}

WorldName WorldName::child(std::size_t i) const {
  WorldName w = *this;
  w.symbols.push_back("v" + std::to_string(i));
  return w;
}

std::string WorldName::to_string() const {
  std::string s;
  for (const auto& x : symbols) s += x;
  return s;
}

bool TableauNode::in_domain(Var v) const {
  return std::find(sigma.begin(), sigma.end(), v) != sigma.end();
}

// ---------------------------------------------------------------------------
// Rule helpers shared by apply_rule and the search

namespace {

using FreshFn = std::function<Var()>;

// Instances phi*[z/y] for every z in dom, each with its own fresh bound
// variables.
std::vector<Formula> instantiate_forall(const Formula& f, const std::vector<Var>& dom,
                                        const FreshFn& fresh) {
  std::vector<Formula> out;
  out.reserve(dom.size());
  for (Var z : dom) out.push_back(substitute(rename_bound(f.body(), fresh), z, f.bound()));
  return out;
}

// First exists-y-dia-psi occurring as a component of f.
const Formula* find_exists_dia(const Formula& f) {
  switch (f.kind()) {
    case Kind::And:
    case Kind::Or:
      if (auto p = find_exists_dia(f.lhs())) return p;
      return find_exists_dia(f.rhs());
    case Kind::Forall:
      return find_exists_dia(f.body());
    case Kind::Exists:
      if (f.body().kind() == Kind::Dia) return &f;
      return find_exists_dia(f.body());
    default:
      return nullptr;
  }
}

Formula replace_at(const Formula& f, const Formula* target, const Formula& repl) {
  if (&f == target) return repl;
  switch (f.kind()) {
    case Kind::And:
      return Formula::conj(replace_at(f.lhs(), target, repl), replace_at(f.rhs(), target, repl));
    case Kind::Or:
      return Formula::disj(replace_at(f.lhs(), target, repl), replace_at(f.rhs(), target, repl));
    case Kind::Forall:
      return Formula::forall(f.bound(), replace_at(f.body(), target, repl));
    case Kind::Exists:
      return Formula::exists(f.bound(), replace_at(f.body(), target, repl));
    default:
      return f;
  }
}

struct WitnessRewrite {
  Formula result;
  std::vector<Var> witnesses;
  std::size_t l = 0;
  bool truncated = false;
};

std::size_t witness_bound(std::size_t exponent) {
  if (exponent >= 62) return std::numeric_limits<std::size_t>::max();
  return std::size_t{1} << exponent;
}

// forall x phi[exists y dia psi]  ~>  forall x phi[ OR_i (dia psi[y_i/y] | dia psi[y_i'/y]) ]
std::optional<WitnessRewrite> rewrite_exists_dia(const Formula& f, std::size_t rest_size,
                                                 std::size_t pairs, const FreshFn& fresh) {
  const Formula* occ = find_exists_dia(f.body());
  if (!occ) return std::nullopt;
  std::size_t bound = witness_bound(rest_size + size(f.body()));
  WitnessRewrite w;
  w.l = std::min(pairs, bound);
  w.truncated = w.l < bound;
  Var y = occ->bound();
  const Formula& psi = occ->body().body();
  Formula disj;
  for (std::size_t i = 0; i < w.l; ++i) {
    Var a = fresh();
    Var b = fresh();
    w.witnesses.push_back(a);
    w.witnesses.push_back(b);
    Formula da = Formula::dia(substitute(rename_bound(psi, fresh), a, y));
    Formula db = Formula::dia(substitute(rename_bound(psi, fresh), b, y));
    Formula pair = Formula::disj(da, db);
    disj = disj.empty() ? pair : Formula::disj(disj, pair);
  }
  w.result = Formula::forall(f.bound(), replace_at(f.body(), occ, disj));
  return w;
}

bool literal_clashes(const Formula& lit, const std::function<bool(const Formula&)>& present) {
  if (lit.kind() == Kind::False) return true;
  if (lit.kind() != Kind::Atom && lit.kind() != Kind::NegAtom) return false;
  return present(complement_literal(lit));
}

}  // namespace

bool has_clash(const FormulaSet& gamma) {
  for (const auto& f : gamma)
    if (literal_clashes(f, [&](const Formula& g) { return gamma.contains(g); })) return true;
  return false;
}

// ---------------------------------------------------------------------------
// apply_rule

std::variant<RuleApplication, Saturated> apply_rule(const TableauNode& node, SolverMode mode,
                                                    VariableEnumeration& enumeration,
                                                    std::size_t witness_pairs) {
  if (!is_clean(node.gamma)) throw InvariantFault("apply_rule: node is not clean");
  std::unordered_set<Var, VarHash> taken(node.sigma.begin(), node.sigma.end());
  for (const auto& f : node.gamma) collect_all_vars(f, taken);
  FreshFn fresh = [&] {
    Var v = enumeration.next_fresh([&](Var c) { return taken.count(c) != 0; });
    taken.insert(v);
    return v;
  };

  auto first = [&](auto pred) -> const Formula* {
    for (const auto& f : node.gamma)
      if (pred(f)) return &f;
    return nullptr;
  };
  auto successor = [&](const Formula& removed, const std::vector<Formula>& added) {
    TableauNode n{node.world, {}, node.sigma};
    for (const auto& g : node.gamma)
      if (!(g == removed)) n.gamma.insert(g);
    for (const auto& g : added)
      if (g.kind() != Kind::True) n.gamma.insert(g);
    return n;
  };

  RuleApplication app;
  if (auto f = first([](const Formula& g) { return g.kind() == Kind::And; })) {
    app.rule = Rule::And;
    app.principal = *f;
    app.successors.push_back(successor(*f, {f->lhs(), f->rhs()}));
    return app;
  }
  if (auto f = first([](const Formula& g) { return g.kind() == Kind::Or; })) {
    app.rule = Rule::Or;
    app.principal = *f;
    app.successors.push_back(successor(*f, {f->lhs()}));
    app.successors.push_back(successor(*f, {f->rhs()}));
    return app;
  }
  if (auto f = first([](const Formula& g) { return g.kind() == Kind::Exists; })) {
    app.rule = Rule::Exists;
    app.principal = *f;
    auto n = successor(*f, {f->body()});
    n.sigma.push_back(f->bound());
    app.successors.push_back(std::move(n));
    return app;
  }
  auto unsafe = [](const Formula& g) {
    return g.kind() == Kind::Forall && !is_existential_safe(g);
  };
  if (auto f = first(unsafe)) {
    if (mode == SolverMode::Lbf) throw InvariantFault("stuck: gamma is not existential-safe");
    auto w = rewrite_exists_dia(*f, size(node.gamma) - size(*f), witness_pairs, fresh);
    if (!w) throw InvariantFault("stuck: unsafe universal without an exists-dia component");
    app.rule = Rule::ForallExistsDia;
    app.principal = *f;
    app.truncated = w->truncated;
    auto n = successor(*f, {w->result});
    n.sigma.insert(n.sigma.end(), w->witnesses.begin(), w->witnesses.end());
    app.successors.push_back(std::move(n));
    return app;
  }
  if (auto f = first([](const Formula& g) { return g.kind() == Kind::Forall; })) {
    app.rule = Rule::Forall;
    app.principal = *f;
    app.successors.push_back(successor(*f, instantiate_forall(*f, node.sigma, fresh)));
    return app;
  }
  std::vector<Formula> boxes, dias;
  for (const auto& g : node.gamma) {
    if (g.kind() == Kind::Box) boxes.push_back(g.body());
    if (g.kind() == Kind::Dia) dias.push_back(g);
  }
  if (!dias.empty()) {
    app.rule = Rule::Dia;
    for (std::size_t i = 0; i < dias.size(); ++i) {
      TableauNode c{node.world.child(i + 1), {}, node.sigma};
      if (dias[i].body().kind() != Kind::True) c.gamma.insert(dias[i].body());
      for (const auto& b : boxes)
        if (b.kind() != Kind::True) c.gamma.insert(b);
      app.successors.push_back(std::move(c));
    }
    return app;
  }
  if (!boxes.empty()) {
    app.rule = Rule::End;
    TableauNode n{node.world, {}, node.sigma};
    for (const auto& g : node.gamma)
      if (is_literal(g)) n.gamma.insert(g);
    app.successors.push_back(std::move(n));
    return app;
  }
  return Saturated{};
}

// ---------------------------------------------------------------------------
// Tableau replay, openness, extraction

std::vector<TableauNode> Tableau::nodes(std::size_t w) const {
  const auto& wt = worlds.at(w);
  std::vector<TableauNode> out;
  TableauNode cur{wt.name, {}, wt.initial_domain};
  for (const auto& f : wt.initial_gamma)
    if (f.kind() != Kind::True) cur.gamma.insert(f);
  out.push_back(cur);
  for (const auto& s : wt.steps) {
    if (s.rule == Rule::Dia) continue;
    if (s.rule == Rule::End) {
      FormulaSet lits;
      for (const auto& f : cur.gamma)
        if (is_literal(f)) lits.insert(f);
      cur.gamma = std::move(lits);
    } else {
      cur.gamma.erase(s.principal);
      for (const auto& f : s.added)
        if (f.kind() != Kind::True) cur.gamma.insert(f);
      cur.sigma.insert(cur.sigma.end(), s.new_domain.begin(), s.new_domain.end());
    }
    out.push_back(cur);
  }
  return out;
}

std::size_t Tableau::node_count() const {
  std::size_t n = 0;
  for (std::size_t w = 0; w < worlds.size(); ++w) n += nodes(w).size();
  return n;
}

bool is_open(const Tableau& t) {
  for (std::size_t w = 0; w < t.worlds.size(); ++w)
    for (const auto& n : t.nodes(w))
      if (has_clash(n.gamma)) return false;
  return true;
}

Extraction extract_model(const Tableau& t) {
  if (t.worlds.empty()) throw std::invalid_argument("extract_model: empty tableau");
  if (!is_open(t)) throw std::invalid_argument("extract_model: tableau is not open");
  Extraction ex;
  std::unordered_map<Var, ElemId, VarHash> elem;
  auto element = [&](Var v) {
    auto it = elem.find(v);
    if (it != elem.end()) return it->second;
    ElemId d = ex.model.add_element(v.name());
    elem.emplace(v, d);
    return d;
  };
  std::vector<WorldId> wid;
  for (const auto& wt : t.worlds) wid.push_back(ex.model.add_world(wt.name.to_string()));
  for (std::size_t i = 0; i < t.worlds.size(); ++i) {
    const auto& wt = t.worlds[i];
    for (Var v : wt.last.sigma) ex.model.add_local(wid[i], element(v));
    for (std::size_t c : wt.children) ex.model.add_edge(wid[i], wid[c]);
    for (const auto& f : wt.last.gamma) {
      if (f.kind() != Kind::Atom) continue;
      Tuple tup;
      for (Var v : f.args()) tup.push_back(element(v));
      ex.model.add_fact(wid[i], f.pred(), std::move(tup));
    }
  }
  ex.root = wid[0];
  for (Var v : t.worlds[0].initial_domain) ex.sigma[v] = element(v);
  return ex;
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct LimitReached {
  std::string what;
};

enum Cat : std::size_t { kAnd, kOr, kExists, kForallUnsafe, kForallSafe, kDia, kBox, kLit, kCats };

Cat category(const Formula& f) {
  switch (f.kind()) {
    case Kind::And:
      return kAnd;
    case Kind::Or:
      return kOr;
    case Kind::Exists:
      return kExists;
    case Kind::Forall:
      return is_existential_safe(f) ? kForallSafe : kForallUnsafe;
    case Kind::Dia:
      return kDia;
    case Kind::Box:
      return kBox;
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::NegAtom:
      return kLit;
    default:
      throw InvariantFault("solver: formula is not in negation normal form: " + print(f));
  }
}

// Choice points a formula depends on, sorted. Used for backjumping: a closed
// branch reports the union of the dependencies of its clashing formulas.
using Deps = std::vector<std::uint32_t>;

Deps merge(const Deps& a, const Deps& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Deps out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Deps without(Deps d, std::uint32_t id) {
  d.erase(std::remove(d.begin(), d.end(), id), d.end());
  return d;
}

bool depends_on(const Deps& d, std::uint32_t id) {
  return std::binary_search(d.begin(), d.end(), id);
}

struct TraceTree {
  WorldTrace data;
  std::vector<std::unique_ptr<TraceTree>> kids;
};

// One world's mutable state with an undo trail; choice points are trail marks.
class Branch {
 public:
  WorldName name;
  std::vector<Formula> initial;
  std::vector<Var> initial_dom;

  std::vector<Formula> items;
  std::vector<Deps> deps;
  std::vector<char> live;
  std::unordered_map<Formula, std::size_t, FormulaHash> where;
  std::array<std::vector<std::size_t>, kCats> queue;
  std::array<std::size_t, kCats> head{};
  std::vector<Var> dom;
  std::vector<Deps> dom_deps;
  std::unordered_set<Var, VarHash> dom_set;
  Deps clash;  // set when add() closes the branch
  std::vector<TableauStep> steps;
  std::vector<std::unique_ptr<TraceTree>> kids;
  bool ended = false;

  bool contains(const Formula& f) const { return where.count(f) != 0; }

  bool clashes(const Formula& lit) const {
    return literal_clashes(lit, [&](const Formula& g) { return contains(g); });
  }

  const Deps& deps_of(const Formula& f) const { return deps[where.at(f)]; }

  // Dependencies of the formulas a literal clashes with.
  Deps clash_deps(const Formula& lit, const Deps& d) const {
    if (lit.kind() == Kind::False) return d;
    return merge(d, deps_of(complement_literal(lit)));
  }

  // False when the addition closes the branch; `clash` then holds the cause.
  bool add(const Formula& f, Deps d) {
    if (f.kind() == Kind::True || contains(f)) return true;
    Cat c = category(f);
    std::size_t idx = items.size();
    items.push_back(f);
    deps.push_back(std::move(d));
    live.push_back(1);
    where.emplace(f, idx);
    queue[c].push_back(idx);
    trail_.push_back({Undo::Add, c, 0});
    if (c == kLit && clashes(f)) {
      clash = clash_deps(f, deps.back());
      return false;
    }
    return true;
  }

  void kill(std::size_t idx) {
    live[idx] = 0;
    where.erase(items[idx]);
    trail_.push_back({Undo::Kill, idx, 0});
  }

  void add_dom(Var v, Deps d = {}) {
    dom_deps.push_back(std::move(d));
    dom.push_back(v);
    dom_set.insert(v);
    trail_.push_back({Undo::Dom, 0, 0});
  }

  void push_step(TableauStep s) {
    steps.push_back(std::move(s));
    trail_.push_back({Undo::Step, 0, 0});
  }

  void push_kid(std::unique_ptr<TraceTree> k) {
    kids.push_back(std::move(k));
    trail_.push_back({Undo::Kid, 0, 0});
  }

  std::optional<std::size_t> first(Cat c) {
    auto& q = queue[c];
    std::size_t h = head[c];
    while (h < q.size() && !live[q[h]]) ++h;
    if (h != head[c]) {
      trail_.push_back({Undo::Head, c, head[c]});
      head[c] = h;
    }
    if (h < q.size()) return q[h];
    return std::nullopt;
  }

  std::vector<Formula> live_items() const {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (live[i]) out.push_back(items[i]);
    return out;
  }

  std::size_t live_size() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (live[i]) n += items[i].size();
    return n;
  }

  std::size_t mark() const { return trail_.size(); }

  void undo_to(std::size_t m) {
    while (trail_.size() > m) {
      Undo u = trail_.back();
      trail_.pop_back();
      switch (u.kind) {
        case Undo::Add: {
          where.erase(items.back());
          queue[u.a].pop_back();
          items.pop_back();
          deps.pop_back();
          live.pop_back();
          break;
        }
        case Undo::Kill:
          live[u.a] = 1;
          where.emplace(items[u.a], u.a);
          break;
        case Undo::Dom:
          dom_set.erase(dom.back());
          dom.pop_back();
          dom_deps.pop_back();
          break;
        case Undo::Head:
          head[u.a] = u.b;
          break;
        case Undo::Step:
          steps.pop_back();
          break;
        case Undo::Kid:
          kids.pop_back();
          break;
      }
    }
  }

 private:
  struct Undo {
    enum Kind { Add, Kill, Dom, Head, Step, Kid } kind;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Undo> trail_;
};

struct CacheKey {
  std::vector<Formula> gamma;  // sorted by hash
  std::vector<Var> dom;        // sorted
  std::size_t hash = 0;
  bool operator==(const CacheKey& o) const {
    return hash == o.hash && dom == o.dom && gamma == o.gamma;
  }
};
struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept { return k.hash; }
};

CacheKey make_key(std::vector<Formula> gamma, std::vector<Var> dom) {
  std::sort(gamma.begin(), gamma.end(),
            [](const Formula& a, const Formula& b) { return a.hash() < b.hash(); });
  std::sort(dom.begin(), dom.end());
  CacheKey k{std::move(gamma), std::move(dom), 0};
  std::size_t h = 1469598103934665603ULL;
  for (const auto& f : k.gamma) h = (h ^ f.hash()) * 1099511628211ULL;
  for (Var v : k.dom) h = (h ^ v.id()) * 1099511628211ULL;
  k.hash = h;
  return k;
}

class Search {
 public:
  Search(SolverMode mode, const SolverOptions& opts, std::size_t pairs,
         std::unordered_set<Var, VarHash> taken, SolveStats& stats)
      : mode_(mode), opts_(opts), pairs_(pairs), taken_(std::move(taken)), stats_(stats) {}

  bool truncated() const { return truncated_; }

  Var fresh() {
    Var v = enumeration_.next_fresh([&](Var c) { return taken_.count(c) != 0; });
    return v;
  }

  // Returns the trace tree of an open saturated tableau, or null if closed.
  std::unique_ptr<TraceTree> run(const Formula& theta, const std::vector<Var>& root_dom) {
    Branch root;
    root.name = WorldName::root();
    root.initial = {theta};
    root.initial_dom = root_dom;
    for (Var v : root_dom) root.add_dom(v);
    stats_.worlds_created++;
    note_domain(root);
    if (!root.add(theta, {})) return nullptr;
    if (!saturate(root)) return nullptr;
    return freeze(root);
  }

 private:
  void emit(const std::string& line) {
    if (opts_.trace) *opts_.trace << line << "\n";
  }

  void count_node(std::size_t n = 1) {
    stats_.nodes_created += n;
    if (stats_.nodes_created > opts_.max_nodes)
      throw LimitReached{"node limit " + std::to_string(opts_.max_nodes)};
  }

  void note_domain(const Branch& b) { stats_.max_domain = std::max(stats_.max_domain, b.dom.size()); }

  void check_node(const Branch& b) {
    if (!opts_.check_invariants) return;
    auto fs = b.live_items();
    bool ok = is_clean(std::span<const Formula>(fs));
    for (const auto& f : fs) {
      if (!ok) break;
      for (Var v : bound_vars(f))
        if (b.dom_set.count(v)) ok = false;
      for (Var v : free_vars(f))
        if (!b.dom_set.count(v)) ok = false;
    }
    if (!ok) stats_.clean_violations++;
  }

  std::unique_ptr<TraceTree> freeze(Branch& b) {
    auto t = std::make_unique<TraceTree>();
    t->data.name = b.name;
    t->data.initial_gamma = b.initial;
    t->data.initial_domain = b.initial_dom;
    t->data.steps = b.steps;
    t->data.last.world = b.name;
    for (const auto& f : b.live_items())
      if (!b.ended || is_literal(f)) t->data.last.gamma.insert(f);
    t->data.last.sigma = b.dom;
    t->kids = std::move(b.kids);
    return t;
  }

  void record(Branch& b, Rule r, const Formula& principal, std::vector<Formula> added,
              std::vector<Var> new_dom = {}, std::string note = {}) {
    count_node();
    if (opts_.trace) {
      std::string line = rule_name(r) + " " + b.name.to_string();
      if (!principal.empty()) line += " " + print(principal);
      if (!note.empty()) line += " [" + note + "]";
      emit(line);
    }
    b.push_step(TableauStep{r, principal, std::move(added), std::move(new_dom), std::move(note)});
  }

  // False when every choice closes; b.clash then names the responsible
  // choice points outside this call.
  bool saturate(Branch& b) {
    for (;;) {
      if (auto i = b.first(kAnd)) {
        Formula f = b.items[*i];
        Deps d = b.deps[*i];
        b.kill(*i);
        record(b, Rule::And, f, {f.lhs(), f.rhs()});
        if (!b.add(f.lhs(), d) || !b.add(f.rhs(), d)) return false;
        check_node(b);
        continue;
      }
      if (auto i = b.first(kOr)) {
        Formula f = b.items[*i];
        Deps d = b.deps[*i];
        b.kill(*i);
        const Formula& l = f.lhs();
        const Formula& r = f.rhs();
        if (l.kind() == Kind::True || r.kind() == Kind::True || b.contains(l) || b.contains(r)) {
          record(b, Rule::Or, f, {}, {}, "direct");
          continue;
        }
        if (b.clashes(l)) {
          record(b, Rule::Or, f, {r}, {}, "direct");
          if (!b.add(r, b.clash_deps(l, d))) return false;
          check_node(b);
          continue;
        }
        if (b.clashes(r)) {
          record(b, Rule::Or, f, {l}, {}, "direct");
          if (!b.add(l, b.clash_deps(r, d))) return false;
          check_node(b);
          continue;
        }
        std::uint32_t id = next_choice_++;
        std::size_t m = b.mark();
        std::size_t cursor = enumeration_.cursor();
        record(b, Rule::Or, f, {l}, {}, "left");
        if (b.add(l, merge(d, {id}))) {
          check_node(b);
          if (saturate(b)) return true;
        }
        Deps left = b.clash;
        b.undo_to(m);
        enumeration_.set_cursor(cursor);
        if (!depends_on(left, id)) {
          // the closure does not involve this choice: the right branch fails too
          stats_.backjumps++;
          b.clash = std::move(left);
          return false;
        }
        stats_.backtracks++;
        if (opts_.trace) emit("backtrack " + b.name.to_string() + " " + print(f));
        record(b, Rule::Or, f, {r}, {}, "right");
        if (!b.add(r, merge(d, without(left, id)))) return false;
        check_node(b);
        continue;
      }
      if (auto i = b.first(kExists)) {
        Formula f = b.items[*i];
        Deps d = b.deps[*i];
        b.kill(*i);
        if (b.dom_set.count(f.bound())) stats_.clean_violations++;
        b.add_dom(f.bound(), d);
        note_domain(b);
        record(b, Rule::Exists, f, {f.body()}, {f.bound()});
        if (!b.add(f.body(), d)) return false;
        check_node(b);
        continue;
      }
      if (auto i = b.first(kForallUnsafe)) {
        Formula f = b.items[*i];
        Deps d = b.deps[*i];
        if (mode_ == SolverMode::Lbf) stuck(b, "gamma is not existential-safe: " + print(f));
        auto w = rewrite_exists_dia(f, b.live_size() - f.size(), pairs_, [&] { return fresh(); });
        if (!w) stuck(b, "unsafe universal without an exists-dia component: " + print(f));
        if (w->truncated) truncated_ = true;
        b.kill(*i);
        for (Var v : w->witnesses) b.add_dom(v, d);
        note_domain(b);
        record(b, Rule::ForallExistsDia, f, {w->result}, w->witnesses,
               "l=" + std::to_string(w->l));
        if (!b.add(w->result, d)) return false;
        check_node(b);
        continue;
      }
      if (auto i = b.first(kForallSafe)) {
        Formula f = b.items[*i];
        Deps d = b.deps[*i];
        b.kill(*i);
        auto inst = instantiate_forall(f, b.dom, [&] { return fresh(); });
        record(b, Rule::Forall, f, inst);
        // instances follow the domain order
        for (std::size_t k = 0; k < inst.size(); ++k)
          if (!b.add(inst[k], merge(d, b.dom_deps[k]))) return false;
        check_node(b);
        continue;
      }
      break;
    }

    // Only modules remain.
    std::vector<Formula> dias, boxes;
    std::vector<Deps> dia_deps, box_deps;
    for (std::size_t i = 0; i < b.items.size(); ++i) {
      if (!b.live[i]) continue;
      if (b.items[i].kind() == Kind::Dia) {
        dias.push_back(b.items[i]);
        dia_deps.push_back(b.deps[i]);
      }
      if (b.items[i].kind() == Kind::Box) {
        boxes.push_back(b.items[i].body());
        box_deps.push_back(b.deps[i]);
      }
    }
    if (!dias.empty()) {
      record(b, Rule::Dia, Formula(), {}, {}, std::to_string(dias.size()) + " children");
      count_node(dias.size() - 1);
      for (std::size_t k = 0; k < dias.size(); ++k) {
        Branch c;
        c.name = b.name.child(k + 1);
        c.initial.push_back(dias[k].body());
        c.initial.insert(c.initial.end(), boxes.begin(), boxes.end());
        c.initial_dom = b.dom;
        std::vector<Deps> initial_deps{dia_deps[k]};
        initial_deps.insert(initial_deps.end(), box_deps.begin(), box_deps.end());
        if (opts_.trace) emit("dia " + b.name.to_string() + " " + print(dias[k]) + " -> " +
                              c.name.to_string());
        auto kid = solve_child(c, initial_deps, b.dom_deps);
        if (!kid) {
          if (opts_.trace) emit("closed " + c.name.to_string());
          b.clash = std::move(c.clash);
          return false;
        }
        b.push_kid(std::move(kid));
      }
      b.ended = false;
      return true;
    }
    if (!boxes.empty()) {
      record(b, Rule::End, Formula(), {});
      b.ended = true;
    }
    return true;
  }

  std::unique_ptr<TraceTree> solve_child(Branch& c, const std::vector<Deps>& initial_deps,
                                         const std::vector<Deps>& dom_deps) {
    CacheKey key = make_key(c.initial, c.initial_dom);
    if (cache_.count(key)) {
      stats_.cache_hits++;
      Deps all;
      for (const auto& d : initial_deps) all = merge(all, d);
      for (const auto& d : dom_deps) all = merge(all, d);
      c.clash = std::move(all);
      return nullptr;
    }
    stats_.worlds_created++;
    for (std::size_t k = 0; k < c.initial_dom.size(); ++k) c.add_dom(c.initial_dom[k], dom_deps[k]);
    note_domain(c);
    bool ok = true;
    for (std::size_t k = 0; k < c.initial.size(); ++k)
      if (!c.add(c.initial[k], initial_deps[k])) {
        ok = false;
        break;
      }
    if (ok) {
      check_node(c);
      ok = saturate(c);
    }
    if (!ok) {
      cache_.insert(std::move(key));
      return nullptr;
    }
    return freeze(c);
  }

  [[noreturn]] void stuck(const Branch& b, const std::string& why) {
    stats_.stuck_nodes++;
    throw InvariantFault("stuck node at world " + b.name.to_string() + ": " + why);
  }

  SolverMode mode_;
  const SolverOptions& opts_;
  std::size_t pairs_;
  std::unordered_set<Var, VarHash> taken_;
  SolveStats& stats_;
  VariableEnumeration enumeration_{"x"};
  std::unordered_set<CacheKey, CacheKeyHash> cache_;
  std::uint32_t next_choice_ = 0;
  bool truncated_ = false;
};

void flatten(TraceTree& t, std::optional<std::size_t> parent, Tableau& out) {
  std::size_t idx = out.worlds.size();
  out.worlds.push_back(std::move(t.data));
  out.worlds[idx].parent = parent;
  if (parent) out.worlds[*parent].children.push_back(idx);
  for (auto& k : t.kids) flatten(*k, idx, out);
}

SolveResult solve(const Formula& input, SolverMode mode, const SolverOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  Formula nnf = to_nnf(input);
  if (mode == SolverMode::Lbf) {
    if (auto v = lbf_violation(nnf)) throw NotInFragment("not in LBF: " + *v);
  } else {
    if (auto v = abbabe_violation(nnf)) throw NotInFragment("not in ABBABE: " + *v);
  }
  SolveResult res;
  res.theta = normalize(input);

  std::unordered_set<Var, VarHash> taken;
  collect_all_vars(res.theta, taken);
  VarSet fv = free_vars(res.theta);
  std::vector<Var> root_dom(fv.begin(), fv.end());

  std::size_t pairs = 1;
  for (;;) {
    res.stats.rounds++;
    res.stats.witness_pairs = pairs;
    Search search(mode, opts, pairs, taken, res.stats);
    std::vector<Var> dom = root_dom;
    dom.push_back(search.fresh());
    std::unique_ptr<TraceTree> tree;
    try {
      tree = search.run(res.theta, dom);
    } catch (const LimitReached& e) {
      res.outcome = ResourceExceeded{e.what + (mode == SolverMode::Abbabe
                                                   ? " (witness pairs l=" + std::to_string(pairs) + ")"
                                                   : std::string())};
      break;
    }
    if (tree) {
      Sat sat;
      flatten(*tree, std::nullopt, sat.tableau);
      sat.extraction = extract_model(sat.tableau);
      auto report = validate(sat.extraction.model);
      if (!report.ok())
        throw InvariantFault("extracted model violates the structure conditions: " +
                             report.to_string());
      if (!check(sat.extraction.model, sat.extraction.root, sat.extraction.sigma, res.theta))
        throw InvariantFault("extracted model does not satisfy the input at the root");
      res.outcome = std::move(sat);
      break;
    }
    if (!search.truncated()) {
      res.outcome = Unsat{};
      break;
    }
    if (pairs >= opts.max_witness_pairs) {
      res.outcome = ResourceExceeded{"witness bound: closed with l=" + std::to_string(pairs) +
                                     " witness pairs, below the completeness bound"};
      break;
    }
    pairs = std::min(pairs * 2, opts.max_witness_pairs);
  }
  res.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

Formula normalize(const Formula& theta) {
  Formula nnf = to_nnf(theta);
  VariableEnumeration e("x");
  return clean_rewrite(FormulaSet{}, {nnf}, e).front();
}

SolveResult solve_lbf(const Formula& theta, const SolverOptions& opts) {
  return solve(theta, SolverMode::Lbf, opts);
}

SolveResult solve_abbabe(const Formula& theta, const SolverOptions& opts) {
  return solve(theta, SolverMode::Abbabe, opts);
}

}  // namespace bfoml
