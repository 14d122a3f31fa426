#include "bfoml/sampler.hpp"

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <string>

namespace bfoml {

std::uint64_t sampler_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("BUNDLED_FOML_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

std::size_t Sampler::pick(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

Var Sampler::var() {
  static const Var vars[] = {Var::named("x"), Var::named("y"), Var::named("z")};
  // z is rarer so that literals clash more often
  return vars[std::min<std::size_t>(pick(5) / 2, 2)];
}

Var Sampler::binder(const Formula& body) {
  VarSet fv = free_vars(body);
  if (fv.empty() || pick(4) == 0) return var();
  auto it = fv.begin();
  std::advance(it, pick(fv.size()));
  return *it;
}

Formula Sampler::literal(bool allow_negation) {
  Formula a;
  switch (pick(3)) {
    case 0:
      a = Formula::atom(Pred::named("P"), {var()});
      break;
    case 1:
      a = Formula::atom(Pred::named("Q"), {var()});
      break;
    default:
      a = Formula::atom(Pred::named("R"), {var(), var()});
      break;
  }
  if (allow_negation && pick(2)) return complement_literal(a);
  return a;
}

template <class Gen>
Formula Sampler::bounded(std::size_t max_size, Gen gen) {
  for (;;) {
    Formula f = gen(max_size);
    std::size_t n = size(f);
    if (n <= max_size && n >= std::min(min_size_, max_size)) return f;
  }
}

Formula Sampler::foml(std::size_t max_size) {
  return bounded(max_size, [&](std::size_t b) { return foml_rec(b); });
}

Formula Sampler::foml_rec(std::size_t budget) {
  if (budget < 4 || pick(5) == 0) {
    switch (pick(8)) {
      case 0:
        return Formula::top();
      case 1:
        return Formula::bottom();
      default:
        return literal(true);
    }
  }
  std::size_t half = (budget - 1) / 2;
  switch (pick(9)) {
    case 0:
      return Formula::negation(foml_rec(budget - 1));
    case 1:
      return Formula::conj(foml_rec(half), foml_rec(half));
    case 2:
      return Formula::disj(foml_rec(half), foml_rec(half));
    case 3:
      return Formula::implies(foml_rec(half), foml_rec(half));
    case 4:
      return Formula::iff(foml_rec(half), foml_rec(half));
    case 5:
      return Formula::box(foml_rec(budget - 1));
    case 6:
      return Formula::dia(foml_rec(budget - 1));
    case 7: {
      Formula b = foml_rec(budget - 1);
      return Formula::forall(binder(b), b);
    }
    default: {
      Formula b = foml_rec(budget - 1);
      return Formula::exists(binder(b), b);
    }
  }
}

Formula Sampler::lbf(std::size_t max_size) {
  return bounded(max_size, [&](std::size_t b) { return lbf_alpha(b); });
}

Formula Sampler::lbf_alpha(std::size_t budget) {
  if (budget < 4) return lbf_psi(budget);
  std::size_t half = (budget - 1) / 2;
  switch (pick(5)) {
    case 0:
      return Formula::conj(lbf_alpha(half), lbf_alpha(half));
    case 1:
      return Formula::disj(lbf_alpha(half), lbf_alpha(half));
    case 2:
    case 3: {
      // exists* forall* prefix of length 1..3
      std::size_t ex = pick(3), all = pick(3);
      if (ex + all == 0) all = 1;
      while (ex + all + 1 > budget) ex ? --ex : --all;
      Formula f = lbf_psi(budget - ex - all);
      for (std::size_t i = 0; i < all; ++i) f = Formula::forall(binder(f), f);
      for (std::size_t i = 0; i < ex; ++i) f = Formula::exists(binder(f), f);
      return f;
    }
    default:
      return lbf_psi(budget);
  }
}

Formula Sampler::lbf_psi(std::size_t budget) {
  if (budget < 3 || pick(6) == 0) return literal(true);
  std::size_t half = (budget - 1) / 2;
  switch (pick(4)) {
    case 0:
      return Formula::conj(lbf_psi(half), lbf_psi(half));
    case 1:
      return Formula::disj(lbf_psi(half), lbf_psi(half));
    case 2:
      return Formula::box(lbf_alpha(budget - 1));
    default:
      return Formula::dia(lbf_alpha(budget - 1));
  }
}

Formula Sampler::bundled(std::size_t max_size, BundleSet allowed) {
  return bounded(max_size, [&](std::size_t b) { return bundled_rec(b, allowed); });
}

Formula Sampler::bundled_rec(std::size_t budget, BundleSet allowed) {
  if (budget < 3 || pick(5) == 0) return literal(true);
  std::size_t half = (budget - 1) / 2;
  // bundles weigh twice as much as the plain connectives
  std::size_t options = 4 + 4 * allowed.count();
  std::size_t c = pick(options);
  switch (c) {
    case 0:
      return Formula::conj(bundled_rec(half, allowed), bundled_rec(half, allowed));
    case 1:
      return Formula::disj(bundled_rec(half, allowed), bundled_rec(half, allowed));
    case 2:
      return Formula::box(bundled_rec(budget - 1, allowed));
    case 3:
      return Formula::dia(bundled_rec(budget - 1, allowed));
    default:
      break;
  }
  std::size_t k = (c - 4) / 4;
  bool dual = (c - 4) % 2;
  Bundle b = Bundle::AB;
  for (Bundle cand : kAllBundles)
    if (allowed.contains(cand) && k-- == 0) {
      b = cand;
      break;
    }
  Formula body = bundled_rec(budget - 2, allowed);
  Var x = binder(body);
  switch (b) {
    case Bundle::AB:
      return dual ? Formula::exists(x, Formula::dia(body)) : Formula::forall(x, Formula::box(body));
    case Bundle::EB:
      return dual ? Formula::forall(x, Formula::dia(body)) : Formula::exists(x, Formula::box(body));
    case Bundle::BA:
      return dual ? Formula::dia(Formula::exists(x, body)) : Formula::box(Formula::forall(x, body));
    case Bundle::BE:
      return dual ? Formula::dia(Formula::forall(x, body)) : Formula::box(Formula::exists(x, body));
  }
  return body;
}

KripkeModel Sampler::model(std::size_t worlds, std::size_t elements) {
  KripkeModel m;
  std::size_t nw = 1 + pick(worlds), ne = 1 + pick(elements);
  for (std::size_t d = 0; d < ne; ++d) m.add_element("d" + std::to_string(d));
  std::vector<std::size_t> local_count(nw);
  for (std::size_t w = 0; w < nw; ++w) m.add_world("w" + std::to_string(w));
  // Domains grow along the world order, so forward edges keep them increasing.
  std::size_t prev = 1 + pick(ne);
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t n = prev + pick(ne - prev + 1);
    local_count[w] = n;
    for (std::size_t d = 0; d < n; ++d) m.add_local(w, d);
    prev = n;
  }
  for (std::size_t w = 0; w < nw; ++w)
    for (std::size_t v = w; v < nw; ++v)
      if (pick(3) == 0) m.add_edge(w, v);
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t n = local_count[w];
    for (std::size_t d = 0; d < n; ++d) {
      if (pick(2)) m.add_fact(w, Pred::named("P"), {d});
      if (pick(2)) m.add_fact(w, Pred::named("Q"), {d});
      for (std::size_t e = 0; e < n; ++e)
        if (pick(3) == 0) m.add_fact(w, Pred::named("R"), {d, e});
    }
  }
  return m;
}

}  // namespace bfoml
