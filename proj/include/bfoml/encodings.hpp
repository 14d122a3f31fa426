#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

struct TilingInstance {
  std::vector<std::string> tiles;
  std::vector<std::pair<std::string, std::string>> h;
  std::vector<std::pair<std::string, std::string>> v;
  std::string t0;

  bool has_tile(const std::string& t) const;
  // Throws std::invalid_argument on an empty tile set, unknown tiles in H/V or t0.
  void validate() const;
};

// Tile t as a predicate: unary for the grid encodings, binary for the
// exponential one.
Pred tile_pred(const std::string& t);
// Bit k of an element.
Pred bit_pred(std::size_t k);

// D^0 = true, D^n = dia true & box D^(n-1).
Formula delta_n(std::size_t n);

Formula only_t(const TilingInstance& inst, const std::string& t, Var x);
// P(x,y) -> OR over H of t(x) & t'(y); Q and V for vsuc.
Formula hsuc(const TilingInstance& inst, Var x, Var y);
Formula vsuc(const TilingInstance& inst, Var x, Var y);

using NamedParts = std::vector<std::pair<std::string, Formula>>;

// Conjuncts of the exists-box / box-forall grid encoding, in order:
// alpha0, alphaH, alphaV, alphaHs, alphaVs, phiH, phiV, psi.
NamedParts ebba_parts(const TilingInstance& inst);
Formula encode_ebba(const TilingInstance& inst);

// The forall-box / exists-box / box-exists grid encoding: alpha0 and the
// conjuncts of the dia-forall-x block (alpha00, alphaH, alphaV, alphaHs,
// alphaVs, phiH, phiV, psi).
NamedParts abebbe_parts(const TilingInstance& inst);
Formula encode_abebbe(const TilingInstance& inst);

struct NoFmpFormulas {
  Formula phi1;  // exists-box / box-exists, increasing domains
  Formula phi2;  // forall-exists-box prefix
  Formula phi3;  // box-exists, constant domains
};
NoFmpFormulas no_fmp_formulas();

// box^{<=n} psi: psi holds at every depth 0..n.
Formula box_upto(std::size_t n, const Formula& psi);
// Exactly n boxes / diamonds.
Formula box_n(std::size_t n, const Formula& psi);
Formula dia_n(std::size_t n, const Formula& psi);

// y is x + 1 in the n-bit encoding.
Formula succ_formula(std::size_t n, Var x, Var y);
Formula succ_formula(std::size_t n);

// Parts of the exponential-domain formula: phi0, phi1, phi2.
NamedParts alpha_parts(std::size_t n);
Formula alpha_n(std::size_t n);
// Tiling part: psi0..psi3.
NamedParts beta_parts(const TilingInstance& inst, std::size_t n);
Formula beta_nt(const TilingInstance& inst, std::size_t n);

// Brute force: is there f: side x side -> T with f(0,0) = t0,
// (f(i,j), f(i+1,j)) in H and (f(i,j), f(i,j+1)) in V?
bool tiling_oracle(const TilingInstance& inst, std::size_t side);

}  // namespace bfoml
