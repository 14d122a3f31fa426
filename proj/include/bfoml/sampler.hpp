#pragma once

#include <cstdint>
#include <random>

#include "bfoml/fragment.hpp"
#include "bfoml/formula.hpp"
#include "bfoml/kripke.hpp"

namespace bfoml {

// Seed from BUNDLED_FOML_SEED when set, otherwise `fallback`.
std::uint64_t sampler_seed(std::uint64_t fallback = 20240601);

// Random formulas over P/1, Q/1, R/2 and variables x, y, z. Every sample has
// size at most the requested bound and at least min_size (default 1).
// Quantifiers usually bind a variable free in their body.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  // Full syntax, including ~, ->, <->.
  void set_min_size(std::size_t n) { min_size_ = n; }

  Formula foml(std::size_t max_size);
  // NNF formulas in the loosely bundled grammar.
  Formula lbf(std::size_t max_size);
  // NNF formulas whose quantifiers all occur in bundles from `allowed`.
  Formula bundled(std::size_t max_size, BundleSet allowed);
  Formula abbabe(std::size_t max_size) { return bundled(max_size, kAbbabe); }
  Formula abeb(std::size_t max_size) { return bundled(max_size, {Bundle::AB, Bundle::EB}); }
  Formula babe(std::size_t max_size) { return bundled(max_size, {Bundle::BA, Bundle::BE}); }

  // Increasing-domain model with up to `worlds` worlds and `elements`
  // elements, random edges (forward only), over the same signature.
  KripkeModel model(std::size_t worlds, std::size_t elements);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::size_t pick(std::size_t n);
  Var var();
  Var binder(const Formula& body);
  Formula literal(bool allow_negation);
  Formula foml_rec(std::size_t budget);
  Formula lbf_alpha(std::size_t budget);
  Formula lbf_psi(std::size_t budget);
  Formula bundled_rec(std::size_t budget, BundleSet allowed);
  template <class Gen>
  Formula bounded(std::size_t max_size, Gen gen);

  std::mt19937_64 rng_;
  std::size_t min_size_ = 1;
};

}  // namespace bfoml
