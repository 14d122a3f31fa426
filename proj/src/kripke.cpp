#include "bfoml/kripke.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "bfoml/syntax.hpp"

namespace bfoml {

WorldId KripkeModel::add_world(const std::string& name) {
  if (world_index_.count(name)) throw std::invalid_argument("duplicate world '" + name + "'");
  WorldId id = worlds_.size();
  worlds_.push_back(WorldData{name, {}, {}, {}});
  world_index_.emplace(name, id);
  return id;
}

ElemId KripkeModel::add_element(const std::string& name) {
  if (element_index_.count(name)) throw std::invalid_argument("duplicate element '" + name + "'");
  ElemId id = elements_.size();
  elements_.push_back(name);
  element_index_.emplace(name, id);
  return id;
}

void KripkeModel::add_local(WorldId w, ElemId d) {
  if (d >= elements_.size()) throw std::out_of_range("add_local: unknown element");
  auto& loc = worlds_.at(w).local;
  auto it = std::lower_bound(loc.begin(), loc.end(), d);
  if (it == loc.end() || *it != d) loc.insert(it, d);
}

void KripkeModel::add_edge(WorldId from, WorldId to) {
  if (to >= worlds_.size()) throw std::out_of_range("add_edge: unknown world");
  auto& s = worlds_.at(from).succ;
  if (std::find(s.begin(), s.end(), to) == s.end()) s.push_back(to);
}

void KripkeModel::add_fact(WorldId w, Pred p, Tuple t) {
  for (ElemId d : t)
    if (d >= elements_.size()) throw std::out_of_range("add_fact: unknown element");
  worlds_.at(w).facts[p].insert(std::move(t));
}

std::optional<WorldId> KripkeModel::find_world(const std::string& name) const {
  auto it = world_index_.find(name);
  if (it == world_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ElemId> KripkeModel::find_element(const std::string& name) const {
  auto it = element_index_.find(name);
  if (it == element_index_.end()) return std::nullopt;
  return it->second;
}

bool KripkeModel::in_local(WorldId w, ElemId d) const {
  const auto& loc = worlds_.at(w).local;
  return std::binary_search(loc.begin(), loc.end(), d);
}

std::vector<std::pair<WorldId, WorldId>> KripkeModel::edges() const {
  std::vector<std::pair<WorldId, WorldId>> out;
  for (WorldId w = 0; w < worlds_.size(); ++w)
    for (WorldId v : worlds_[w].succ) out.emplace_back(w, v);
  return out;
}

bool KripkeModel::holds(WorldId w, Pred p, const Tuple& t) const {
  const auto& f = worlds_.at(w).facts;
  auto it = f.find(p);
  return it != f.end() && it->second.count(t) != 0;
}

// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    switch (v.kind) {
      case Violation::Kind::EmptyLocalDomain:
        os << "empty local domain: ";
        break;
      case Violation::Kind::Monotonicity:
        os << "monotonicity: ";
        break;
      case Violation::Kind::TupleOutsideDomain:
        os << "tuple outside local domain: ";
        break;
      case Violation::Kind::ArityMismatch:
        os << "arity mismatch: ";
        break;
    }
    os << v.detail << "\n";
  }
  return os.str();
}

namespace {

std::string tuple_text(const KripkeModel& m, const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += m.element_name(t[i]);
  }
  return s + ")";
}

}  // namespace

ValidationReport validate(const KripkeModel& m) {
  ValidationReport r;
  std::map<Pred, std::size_t> arity;
  for (WorldId w = 0; w < m.world_count(); ++w) {
    if (m.local_domain(w).empty())
      r.violations.push_back({Violation::Kind::EmptyLocalDomain, "world " + m.world_name(w)});
    for (WorldId v : m.successors(w)) {
      for (ElemId d : m.local_domain(w)) {
        if (!m.in_local(v, d)) {
          r.violations.push_back({Violation::Kind::Monotonicity,
                                  "edge (" + m.world_name(w) + "," + m.world_name(v) +
                                      "): element " + m.element_name(d) + " missing at " +
                                      m.world_name(v)});
          break;
        }
      }
    }
    for (const auto& [p, tuples] : m.facts(w)) {
      for (const auto& t : tuples) {
        auto [it, fresh] = arity.emplace(p, t.size());
        if (!fresh && it->second != t.size())
          r.violations.push_back({Violation::Kind::ArityMismatch,
                                  "predicate " + p.name() + " at world " + m.world_name(w) +
                                      ": tuple " + tuple_text(m, t) + " has length " +
                                      std::to_string(t.size()) + ", expected " +
                                      std::to_string(it->second)});
        for (ElemId d : t) {
          if (!m.in_local(w, d)) {
            r.violations.push_back({Violation::Kind::TupleOutsideDomain,
                                    "world " + m.world_name(w) + ": " + p.name() +
                                        tuple_text(m, t)});
            break;
          }
        }
      }
    }
  }
  return r;
}

bool is_constant_domain(const KripkeModel& m) {
  for (WorldId w = 0; w < m.world_count(); ++w)
    if (m.local_domain(w).size() != m.element_count()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const KripkeModel& m, const Assignment& sigma) : m_(m) {
    for (const auto& [v, d] : sigma) env_.emplace_back(v, d);
  }

  ElemId lookup(Var v) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == v) return it->second;
    throw PreconditionError("variable " + v.name() + " is unassigned", v);
  }

  bool eval(WorldId w, const Formula& f) {
    switch (f.kind()) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom:
      case Kind::NegAtom: {
        Tuple t;
        t.reserve(f.args().size());
        for (Var v : f.args()) t.push_back(lookup(v));
        bool h = m_.holds(w, f.pred(), t);
        return f.kind() == Kind::Atom ? h : !h;
      }
      case Kind::Not:
        return !eval(w, f.body());
      case Kind::And:
        return eval(w, f.lhs()) && eval(w, f.rhs());
      case Kind::Or:
        return eval(w, f.lhs()) || eval(w, f.rhs());
      case Kind::Implies:
        return !eval(w, f.lhs()) || eval(w, f.rhs());
      case Kind::Iff:
        return eval(w, f.lhs()) == eval(w, f.rhs());
      case Kind::Box:
        for (WorldId v : m_.successors(w))
          if (!eval(v, f.body())) return false;
        return true;
      case Kind::Dia:
        for (WorldId v : m_.successors(w))
          if (eval(v, f.body())) return true;
        return false;
      case Kind::Forall:
      case Kind::Exists: {
        bool univ = f.kind() == Kind::Forall;
        for (ElemId d : m_.local_domain(w)) {
          env_.emplace_back(f.bound(), d);
          bool r = eval(w, f.body());
          env_.pop_back();
          if (r != univ) return r;
        }
        return univ;
      }
    }
    return false;
  }

  // Appends the reason for f being false at w (f assumed false).
  void refute(WorldId w, const Formula& f, std::vector<std::string>& path) {
    std::string at = " at world " + m_.world_name(w);
    switch (f.kind()) {
      case Kind::False:
        path.push_back("false" + at);
        return;
      case Kind::Atom:
      case Kind::NegAtom:
        path.push_back("literal " + print(f) + " fails" + at + binding_text(f));
        return;
      case Kind::Not:
        path.push_back("negation " + print(f) + ": operand holds" + at);
        return;
      case Kind::And:
        path.push_back("conjunction" + at + ": a conjunct fails");
        if (!eval(w, f.lhs()))
          refute(w, f.lhs(), path);
        else
          refute(w, f.rhs(), path);
        return;
      case Kind::Or:
        path.push_back("disjunction " + print(f) + ": both disjuncts fail" + at);
        return;
      case Kind::Implies:
        path.push_back("implication " + print(f) + ": antecedent holds, consequent fails" + at);
        return;
      case Kind::Iff:
        path.push_back("biconditional " + print(f) + ": sides differ" + at);
        return;
      case Kind::Box:
        for (WorldId v : m_.successors(w)) {
          if (!eval(v, f.body())) {
            path.push_back("box" + at + ": fails at successor " + m_.world_name(v));
            refute(v, f.body(), path);
            return;
          }
        }
        return;
      case Kind::Dia:
        path.push_back("diamond " + print(f) + ": no successor of " + m_.world_name(w) +
                       " satisfies the body");
        return;
      case Kind::Forall:
        for (ElemId d : m_.local_domain(w)) {
          env_.emplace_back(f.bound(), d);
          if (!eval(w, f.body())) {
            path.push_back("forall " + f.bound().name() + at + ": fails for " +
                           f.bound().name() + "=" + m_.element_name(d));
            refute(w, f.body(), path);
            env_.pop_back();
            return;
          }
          env_.pop_back();
        }
        return;
      case Kind::Exists:
        path.push_back("exists " + f.bound().name() + at + ": no element of the local domain" +
                       " satisfies the body");
        return;
      case Kind::True:
        return;
    }
  }

 private:
  std::string binding_text(const Formula& f) const {
    std::string s;
    for (Var v : f.args()) {
      s += s.empty() ? " with " : ", ";
      s += v.name() + "=" + m_.element_name(lookup(v));
    }
    return s;
  }

  const KripkeModel& m_;
  std::vector<std::pair<Var, ElemId>> env_;
};

void require_relevant(const KripkeModel& m, WorldId w, const Assignment& sigma,
                      const Formula& phi) {
  if (w >= m.world_count()) throw std::out_of_range("check: unknown world");
  for (Var v : free_vars(phi)) {
    auto it = sigma.find(v);
    if (it == sigma.end())
      throw PreconditionError("free variable " + v.name() + " is not covered by the assignment",
                              v);
    if (!m.in_local(w, it->second))
      throw PreconditionError("assignment is not relevant at world " + m.world_name(w) + ": " +
                                  v.name() + "=" + m.element_name(it->second) +
                                  " is outside the local domain",
                              v);
  }
}

}  // namespace

bool check(const KripkeModel& m, WorldId w, const Assignment& sigma, const Formula& phi) {
  require_relevant(m, w, sigma, phi);
  Evaluator ev(m, sigma);
  return ev.eval(w, phi);
}

CheckTrace explain(const KripkeModel& m, WorldId w, const Assignment& sigma, const Formula& phi) {
  require_relevant(m, w, sigma, phi);
  Evaluator ev(m, sigma);
  CheckTrace t;
  t.value = ev.eval(w, phi);
  if (!t.value) ev.refute(w, phi, t.path);
  return t;
}

KripkeModel reachable_submodel(const KripkeModel& m, WorldId w) {
  std::vector<bool> seen(m.world_count(), false);
  std::vector<WorldId> order;
  std::deque<WorldId> q{w};
  seen[w] = true;
  while (!q.empty()) {
    WorldId u = q.front();
    q.pop_front();
    order.push_back(u);
    for (WorldId v : m.successors(u))
      if (!seen[v]) {
        seen[v] = true;
        q.push_back(v);
      }
  }
  KripkeModel out;
  for (ElemId d = 0; d < m.element_count(); ++d) out.add_element(m.element_name(d));
  std::map<WorldId, WorldId> id;
  for (WorldId u : order) id[u] = out.add_world(m.world_name(u));
  for (WorldId u : order) {
    for (ElemId d : m.local_domain(u)) out.add_local(id[u], d);
    for (WorldId v : m.successors(u)) out.add_edge(id[u], id[v]);
    for (const auto& [p, ts] : m.facts(u))
      for (const auto& t : ts) out.add_fact(id[u], p, t);
  }
  return out;
}

}  // namespace bfoml
