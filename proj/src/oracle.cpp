#include "bfoml/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace bfoml {

std::string SearchBounds::to_string() const {
  return "depth " + std::to_string(max_depth) + ", branch " + std::to_string(max_branching) +
         ", domain " + std::to_string(max_root_domain) + ", growth " + std::to_string(max_growth);
}

namespace {

// Placements of n free variables onto at most k interchangeable root
// elements: Stirling numbers of the second kind summed over j <= k blocks.
double placements(std::size_t k, std::size_t n) {
  std::vector<std::vector<double>> s(n + 1, std::vector<double>(k + 1, 0));
  s[0][0] = 1;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= k; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  double total = 0;
  for (std::size_t j = 0; j <= k; ++j) total += s[n][j];
  return total;
}

double shapes(std::size_t depth, const SearchBounds& b) {
  if (depth == 0) return 1;
  double sub = (b.max_growth + 1) * shapes(depth - 1, b);
  double total = 0;
  for (std::size_t c = 0; c <= b.max_branching; ++c) total += std::pow(sub, double(c));
  return total;
}

Var element_var(std::size_t i) { return Var::named("@" + std::to_string(i)); }

// A satisfying world and its subtree, over elements 0..k-1.
struct Subtree {
  std::size_t k = 0;
  std::vector<Formula> atoms;  // true ground atoms
  std::vector<std::shared_ptr<const Subtree>> children;
};
using SubPtr = std::shared_ptr<const Subtree>;

struct Key {
  std::vector<Formula> fs;
  std::size_t k, depth;
  std::size_t hash;
  bool operator==(const Key& o) const {
    return hash == o.hash && k == o.k && depth == o.depth && fs == o.fs;
  }
};
struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept { return k.hash; }
};

std::vector<Formula> canonical(std::vector<Formula> fs) {
  std::sort(fs.begin(), fs.end(), [](const Formula& a, const Formula& b) {
    return a.hash() < b.hash();
  });
  std::vector<Formula> out;
  for (auto& f : fs)
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
  return out;
}

Key make_key(std::vector<Formula> fs, std::size_t k, std::size_t depth) {
  Key key{canonical(std::move(fs)), k, depth, 0};
  std::size_t h = 1469598103934665603ULL ^ (k * 31 + depth);
  for (const auto& f : key.fs) h = (h ^ f.hash()) * 1099511628211ULL;
  key.hash = h;
  return key;
}

class Search {
 public:
  Search(const SearchBounds& b, const OracleOptions& o) : bounds_(b), opts_(o) {}

  std::size_t steps() const { return steps_; }

  // Memoized: can obligations hold at a world with k elements and depth left?
  SubPtr world(const std::vector<Formula>& obligations, std::size_t k, std::size_t depth) {
    Key key = make_key(obligations, k, depth);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    World w(*this, k, depth);
    w.agenda.assign(key.fs.rbegin(), key.fs.rend());
    SubPtr result = w.run() ? w.result : nullptr;
    memo_.emplace(std::move(key), result);
    return result;
  }

 private:
  struct World {
    World(Search& search, std::size_t size, std::size_t left) : s(search), k(size), depth(left) {}
    Search& s;
    std::size_t k, depth;
    std::vector<Formula> agenda;
    std::vector<Formula> deferred;  // disjunctions and existentials
    std::unordered_map<Formula, bool, FormulaHash> val;
    std::vector<Formula> val_trail;
    std::vector<Formula> dias, boxes;
    SubPtr result;

    bool run() {
      for (;;) {
        while (!agenda.empty()) {
          s.tick();
          Formula f = std::move(agenda.back());
          agenda.pop_back();
          if (!expand(f)) return false;
        }
        if (deferred.empty()) return finish();
        // Propagate: drop satisfied choices, commit forced ones, else branch
        // on the choice with the fewest open alternatives.
        std::vector<Formula> open;
        std::optional<std::size_t> best;
        std::vector<Formula> best_alts;
        bool forced = false;
        for (auto& d : deferred) {
          s.tick();
          if (forced) {
            open.push_back(std::move(d));
            continue;
          }
          auto alts = alternatives(d);
          if (!alts) continue;
          if (alts->empty()) return false;
          if (alts->size() == 1) {
            agenda.push_back(alts->front());
            forced = true;
            continue;
          }
          if (!best || alts->size() < best_alts.size()) {
            best = open.size();
            best_alts = std::move(*alts);
          }
          open.push_back(std::move(d));
        }
        deferred = std::move(open);
        if (forced || !best) continue;
        deferred.erase(deferred.begin() + *best);
        return choose(best_alts);
      }
    }

    bool expand(const Formula& f) {
      switch (f.kind()) {
        case Kind::True:
          return true;
        case Kind::False:
          return false;
        case Kind::Atom:
        case Kind::NegAtom: {
          bool pos = f.kind() == Kind::Atom;
          Formula a = pos ? f : complement_literal(f);
          auto it = val.find(a);
          if (it != val.end()) return it->second == pos;
          val.emplace(a, pos);
          val_trail.push_back(a);
          return true;
        }
        case Kind::And:
          agenda.push_back(f.rhs());
          agenda.push_back(f.lhs());
          return true;
        case Kind::Or:
        case Kind::Exists:
          deferred.push_back(f);
          return true;
        case Kind::Forall:
          for (std::size_t i = k; i-- > 0;)
            agenda.push_back(substitute(f.body(), element_var(i), f.bound()));
          return true;
        case Kind::Box:
          boxes.push_back(f.body());
          return true;
        case Kind::Dia:
          dias.push_back(f.body());
          return true;
        default:
          throw std::invalid_argument("sat_bounded: formula is not in negation normal form");
      }
    }

    // Literal truth under the current partial valuation, if decided.
    std::optional<bool> value(const Formula& f) const {
      if (f.kind() == Kind::True) return true;
      if (f.kind() == Kind::False) return false;
      if (f.kind() != Kind::Atom && f.kind() != Kind::NegAtom) return std::nullopt;
      bool pos = f.kind() == Kind::Atom;
      auto it = val.find(pos ? f : complement_literal(f));
      if (it == val.end()) return std::nullopt;
      return it->second == pos;
    }

    // Open alternatives of a choice; nullopt when one is already true.
    std::optional<std::vector<Formula>> alternatives(const Formula& f) const {
      std::vector<Formula> raw;
      if (f.kind() == Kind::Exists) {
        for (std::size_t i = 0; i < k; ++i)
          raw.push_back(substitute(f.body(), element_var(i), f.bound()));
      } else {
        std::vector<const Formula*> stack{&f};
        while (!stack.empty()) {
          const Formula* g = stack.back();
          stack.pop_back();
          if (g->kind() == Kind::Or) {
            stack.push_back(&g->rhs());
            stack.push_back(&g->lhs());
          } else {
            raw.push_back(*g);
          }
        }
      }
      std::vector<Formula> out;
      for (auto& g : raw) {
        auto v = value(g);
        if (v && *v) return std::nullopt;
        if (!v) out.push_back(std::move(g));
      }
      return out;
    }

    // Tries each alternative; state is restored after a failed one.
    bool choose(const std::vector<Formula>& alts) {
      auto saved_agenda = agenda;
      auto saved_deferred = deferred;
      std::size_t vt = val_trail.size(), nd = dias.size(), nb = boxes.size();
      for (const auto& alt : alts) {
        agenda = saved_agenda;
        deferred = saved_deferred;
        agenda.push_back(alt);
        if (run()) return true;
        while (val_trail.size() > vt) {
          val.erase(val_trail.back());
          val_trail.pop_back();
        }
        dias.resize(nd);
        boxes.resize(nb);
      }
      return false;
    }

    bool finish() {
      auto sub = std::make_shared<Subtree>();
      sub->k = k;
      for (const auto& [a, v] : val)
        if (v) sub->atoms.push_back(a);
      std::sort(sub->atoms.begin(), sub->atoms.end(),
                [](const Formula& a, const Formula& b) { return a.hash() < b.hash(); });
      auto ds = canonical(dias);
      if (!ds.empty()) {
        if (depth == 0 || s.bounds_.max_branching == 0) return false;
        auto kids = s.children(ds, boxes, k, depth - 1);
        if (!kids) return false;
        sub->children = std::move(*kids);
      }
      result = std::move(sub);
      return true;
    }
  };

  void tick() {
    if (++steps_ > opts_.step_ceiling)
      throw OracleLimit("oracle step ceiling " + std::to_string(opts_.step_ceiling) + " reached");
  }

  // A child with k+g elements satisfying the block's diamonds and all boxes.
  SubPtr child(const std::vector<Formula>& block, const std::vector<Formula>& boxes,
               std::size_t k, std::size_t depth) {
    std::vector<Formula> obligations = block;
    obligations.insert(obligations.end(), boxes.begin(), boxes.end());
    for (std::size_t g = 0; g <= bounds_.max_growth; ++g)
      if (auto sub = world(obligations, k + g, depth)) return sub;
    return nullptr;
  }

  // Groups the diamonds into at most max_branching children.
  std::optional<std::vector<SubPtr>> children(const std::vector<Formula>& dias,
                                              const std::vector<Formula>& boxes, std::size_t k,
                                              std::size_t depth) {
    for (const auto& d : dias)
      if (!child({d}, boxes, k, depth)) return std::nullopt;
    std::vector<std::size_t> block(dias.size(), 0);
    std::optional<std::vector<SubPtr>> found;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (found) return;
      if (i == dias.size()) {
        std::vector<SubPtr> kids;
        for (std::size_t b = 0; b < used; ++b) {
          std::vector<Formula> part;
          for (std::size_t j = 0; j < dias.size(); ++j)
            if (block[j] == b) part.push_back(dias[j]);
          auto sub = child(part, boxes, k, depth);
          if (!sub) return;
          kids.push_back(std::move(sub));
        }
        found = std::move(kids);
        return;
      }
      // Fewer blocks first: larger groups make smaller models.
      for (std::size_t b = 0; b < used; ++b) {
        block[i] = b;
        rec(i + 1, used);
      }
      if (used < bounds_.max_branching) {
        block[i] = used;
        rec(i + 1, used + 1);
      }
    };
    rec(0, 0);
    return found;
  }

  const SearchBounds& bounds_;
  const OracleOptions& opts_;
  std::size_t steps_ = 0;
  std::unordered_map<Key, SubPtr, KeyHash> memo_;
};

void build(const Subtree& t, KripkeModel& m, std::vector<ElemId>& elems, WorldId w,
           std::size_t& counter, const std::unordered_map<Var, std::size_t, VarHash>& index) {
  while (elems.size() < t.k) elems.push_back(m.add_element("d" + std::to_string(elems.size())));
  for (std::size_t i = 0; i < t.k; ++i) m.add_local(w, elems[i]);
  for (const auto& a : t.atoms) {
    Tuple tup;
    for (Var v : a.args()) tup.push_back(elems[index.at(v)]);
    m.add_fact(w, a.pred(), std::move(tup));
  }
  for (const auto& c : t.children) {
    WorldId cw = m.add_world("w" + std::to_string(++counter));
    m.add_edge(w, cw);
    build(*c, m, elems, cw, counter, index);
  }
}

}  // namespace

double oracle_state_count(const Formula& phi, const SearchBounds& b) {
  std::size_t nfv = free_vars(phi).size();
  double total = 0;
  for (std::size_t k = 1; k <= b.max_root_domain; ++k)
    total += placements(k, nfv) * shapes(b.max_depth, b);
  return total;
}

OracleResult sat_bounded(const Formula& phi, const SearchBounds& bounds,
                         const OracleOptions& opts) {
  signature(phi);
  Formula nnf = to_nnf(phi);
  VarSet fv_set = free_vars(nnf);
  std::vector<Var> fv(fv_set.begin(), fv_set.end());
  if (fv.size() > bounds.max_root_domain)
    throw std::invalid_argument("sat_bounded: " + std::to_string(fv.size()) +
                                " free variables exceed the root domain bound " +
                                std::to_string(bounds.max_root_domain));
  double count = oracle_state_count(nnf, bounds);
  if (count > opts.state_ceiling)
    throw OracleRefused("sat_bounded: " + std::to_string(count) + " model shapes exceed the ceiling",
                        count);

  Search search(bounds, opts);
  OracleResult res{NoneWithinBounds{bounds}, 0};
  std::vector<std::size_t> place(fv.size(), 0);
  for (std::size_t k = 1; k <= bounds.max_root_domain && !res.found(); ++k) {
    // Canonical placements: elements first used in increasing order.
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (i == fv.size()) {
        Formula g = nnf;
        for (std::size_t j = 0; j < fv.size(); ++j) g = substitute(g, element_var(place[j]), fv[j]);
        auto sub = search.world({g}, k, bounds.max_depth);
        if (!sub) return false;
        Found f;
        std::unordered_map<Var, std::size_t, VarHash> index;
        std::size_t max_k = k + bounds.max_depth * bounds.max_growth;
        for (std::size_t e = 0; e < max_k; ++e) index.emplace(element_var(e), e);
        std::vector<ElemId> elems;
        std::size_t counter = 0;
        f.world = f.model.add_world("w0");
        build(*sub, f.model, elems, f.world, counter, index);
        for (std::size_t j = 0; j < fv.size(); ++j) f.assignment[fv[j]] = elems[place[j]];
        if (!validate(f.model).ok() || !check(f.model, f.world, f.assignment, phi))
          throw std::logic_error("sat_bounded: found model fails verification");
        res.outcome = std::move(f);
        return true;
      }
      std::size_t limit = std::min(used + 1, k);
      for (std::size_t e = 0; e < limit; ++e) {
        place[i] = e;
        if (rec(i + 1, std::max(used, e + 1))) return true;
      }
      return false;
    };
    if (fv.size() > k) continue;
    rec(0, 0);
  }
  res.steps = search.steps();
  return res;
}

}  // namespace bfoml
