#include "bfoml/encodings.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "bfoml/syntax.hpp"

namespace bfoml {

bool TilingInstance::has_tile(const std::string& t) const {
  return std::find(tiles.begin(), tiles.end(), t) != tiles.end();
}

void TilingInstance::validate() const {
  if (tiles.empty()) throw std::invalid_argument("tiling instance: no tiles");
  for (const auto& t : tiles)
    if (std::count(tiles.begin(), tiles.end(), t) > 1)
      throw std::invalid_argument("tiling instance: duplicate tile " + t);
  for (const auto* rel : {&h, &v})
    for (const auto& [a, b] : *rel)
      if (!has_tile(a) || !has_tile(b))
        throw std::invalid_argument("tiling instance: pair (" + a + "," + b + ") uses an unknown tile");
  if (!has_tile(t0)) throw std::invalid_argument("tiling instance: t0 " + t0 + " is not a tile");
}

Pred tile_pred(const std::string& t) { return Pred::named("tile_" + t); }
Pred bit_pred(std::size_t k) { return Pred::named("bit_" + std::to_string(k)); }

namespace {

Var var(const char* name) { return Var::named(name); }

Formula atom(Pred p, std::vector<Var> args) { return Formula::atom(p, std::move(args)); }
Formula neg(Pred p, std::vector<Var> args) { return Formula::neg_atom(p, std::move(args)); }

Formula P(Var x, Var y) { return atom(Pred::named("P"), {x, y}); }
Formula Q(Var x, Var y) { return atom(Pred::named("Q"), {x, y}); }

Formula box(const Formula& f) { return Formula::box(f); }
Formula dia(const Formula& f) { return Formula::dia(f); }
Formula forall(Var x, const Formula& f) { return Formula::forall(x, f); }
Formula exists(Var x, const Formula& f) { return Formula::exists(x, f); }

Formula succ_relation(Formula edge,
                      const std::vector<std::pair<std::string, std::string>>& rel, Var x, Var y) {
  std::vector<Formula> options;
  for (const auto& [a, b] : rel)
    options.push_back(Formula::conj(atom(tile_pred(a), {x}), atom(tile_pred(b), {y})));
  return Formula::implies(std::move(edge), disj_all(options));
}

Formula conj_parts(const NamedParts& parts) {
  std::vector<Formula> fs;
  for (const auto& [name, f] : parts) fs.push_back(f);
  return conj_all(fs);
}

void require_tile(const TilingInstance& inst, const std::string& t) {
  if (!inst.has_tile(t)) throw std::invalid_argument("unknown tile " + t);
}

}  // namespace

Formula delta_n(std::size_t n) {
  if (n == 0) return Formula::top();
  return Formula::conj(dia(Formula::top()), box(delta_n(n - 1)));
}

Formula only_t(const TilingInstance& inst, const std::string& t, Var x) {
  require_tile(inst, t);
  std::vector<Formula> fs{atom(tile_pred(t), {x})};
  for (const auto& other : inst.tiles)
    if (other != t) fs.push_back(neg(tile_pred(other), {x}));
  return conj_all(fs);
}

Formula hsuc(const TilingInstance& inst, Var x, Var y) {
  return succ_relation(P(x, y), inst.h, x, y);
}

Formula vsuc(const TilingInstance& inst, Var x, Var y) {
  return succ_relation(Q(x, y), inst.v, x, y);
}

NamedParts ebba_parts(const TilingInstance& inst) {
  inst.validate();
  Var x = var("x"), x0 = var("x0"), x1 = var("x1"), x2 = var("x2"), y = var("y"), z = var("z"),
      zp = var("z'");
  std::vector<Formula> some_tile;
  for (const auto& t : inst.tiles) some_tile.push_back(box(box(only_t(inst, t, x))));
  NamedParts parts;
  parts.emplace_back("alpha0",
                     conj_all({dia(exists(x0, box(box(only_t(inst, inst.t0, x0))))),
                               box(forall(x, disj_all(some_tile))), delta_n(3)}));
  parts.emplace_back("alphaH", box(forall(x, exists(x1, box(box(P(x, x1)))))));
  parts.emplace_back("alphaV", box(forall(x, exists(x2, box(box(Q(x, x2)))))));
  parts.emplace_back("alphaHs", box(forall(x, box(forall(y, box(hsuc(inst, x, y)))))));
  parts.emplace_back("alphaVs", box(forall(x, box(forall(y, box(vsuc(inst, x, y)))))));
  parts.emplace_back("phiH",
                     box(forall(x, box(forall(y, Formula::iff(dia(P(x, y)), box(P(x, y))))))));
  parts.emplace_back("phiV",
                     box(forall(x, box(forall(y, Formula::iff(dia(Q(x, y)), box(Q(x, y))))))));
  Formula diag = Formula::implies(exists(zp, box(Formula::conj(Q(x, zp), P(zp, y)))),
                                  box(forall(z, Formula::implies(P(x, z), Q(z, y)))));
  parts.emplace_back("psi", box(forall(x, box(forall(y, diag)))));
  return parts;
}

Formula encode_ebba(const TilingInstance& inst) { return conj_parts(ebba_parts(inst)); }

NamedParts abebbe_parts(const TilingInstance& inst) {
  inst.validate();
  Var x = var("x"), x0 = var("x0"), x1 = var("x1"), x2 = var("x2"), y = var("y"), z = var("z"),
      zp = var("z'");
  std::vector<Formula> some_tile;
  for (const auto& t : inst.tiles) some_tile.push_back(box(box(only_t(inst, t, x))));
  NamedParts parts;
  parts.emplace_back("alpha0",
                     Formula::conj(box(exists(x0, box(box(only_t(inst, inst.t0, x0))))), delta_n(3)));
  parts.emplace_back("alpha00", disj_all(some_tile));
  parts.emplace_back("alphaH", exists(x1, box(box(P(x, x1)))));
  parts.emplace_back("alphaV", exists(x2, box(box(Q(x, x2)))));
  parts.emplace_back("alphaHs", forall(y, box(box(hsuc(inst, x, y)))));
  parts.emplace_back("alphaVs", forall(y, box(box(vsuc(inst, x, y)))));
  parts.emplace_back("phiH", forall(y, box(Formula::iff(dia(P(x, y)), box(P(x, y))))));
  parts.emplace_back("phiV", forall(y, box(Formula::iff(dia(Q(x, y)), box(Q(x, y))))));
  parts.emplace_back("psi",
                     forall(y, box(Formula::implies(
                                   exists(zp, box(Formula::conj(Q(x, zp), P(zp, y)))),
                                   forall(z, box(Formula::implies(P(x, z), Q(z, y))))))));
  return parts;
}

Formula encode_abebbe(const TilingInstance& inst) {
  auto parts = abebbe_parts(inst);
  NamedParts block(parts.begin() + 1, parts.end());
  return Formula::conj(parts.front().second, dia(forall(var("x"), conj_parts(block))));
}

NoFmpFormulas no_fmp_formulas() {
  NoFmpFormulas out;
  out.phi1 = parse(
      "dia forall x. ((exists y. box box P(x,y)) & box box ~P(x,x) &"
      " dia forall y. ((dia P(x,y) <-> box P(x,y)) &"
      " dia forall z. ((P(x,y) & P(y,z)) -> P(x,z))))");
  out.phi2 = parse(
      "(forall x. exists y. box (box box P(x,y))) & (forall x. box (box box ~P(x,x))) &"
      " (forall x. box forall y. box forall z. box ((P(x,y) & P(y,z)) -> P(x,z))) &"
      " dia dia dia true");
  out.phi3 = parse(
      "dia forall x. ((box exists y. box box P(x,y)) & box box box ~P(x,x) &"
      " dia (dia forall y. ((dia P(x,y) <-> box P(x,y)) &"
      " dia forall z. ((P(x,y) & P(y,z)) -> P(x,z)))))");
  return out;
}

Formula box_upto(std::size_t n, const Formula& psi) {
  if (n == 0) return psi;
  return Formula::conj(psi, box(box_upto(n - 1, psi)));
}

Formula box_n(std::size_t n, const Formula& psi) { return n == 0 ? psi : box(box_n(n - 1, psi)); }
Formula dia_n(std::size_t n, const Formula& psi) { return n == 0 ? psi : dia(dia_n(n - 1, psi)); }

Formula succ_formula(std::size_t n, Var x, Var y) {
  std::vector<Formula> cases;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Formula> c{neg(bit_pred(i), {x}), atom(bit_pred(i), {y})};
    for (std::size_t j = 0; j < i; ++j)
      c.push_back(Formula::conj(atom(bit_pred(j), {x}), neg(bit_pred(j), {y})));
    for (std::size_t j = i + 1; j < n; ++j)
      c.push_back(Formula::iff(atom(bit_pred(j), {x}), atom(bit_pred(j), {y})));
    cases.push_back(conj_all(c));
  }
  return disj_all(cases);
}

Formula succ_formula(std::size_t n) { return succ_formula(n, var("x"), var("y")); }

namespace {

Formula bits_zero(std::size_t n, Var x) {
  std::vector<Formula> fs;
  for (std::size_t i = 0; i < n; ++i) fs.push_back(neg(bit_pred(i), {x}));
  return conj_all(fs);
}

Formula phi1_bits(std::size_t n) {
  Var x = var("x");
  std::vector<Formula> fs;
  for (std::size_t i = 0; i < n; ++i) {
    Formula b = atom(bit_pred(i), {x});
    Formula nb = neg(bit_pred(i), {x});
    fs.push_back(Formula::conj(Formula::implies(b, box(b)), Formula::implies(nb, box(nb))));
  }
  return forall(x, box(conj_all(fs)));
}

}  // namespace

NamedParts alpha_parts(std::size_t n) {
  if (n == 0) throw std::invalid_argument("alpha_n: n must be at least 1");
  Var x = var("x");
  NamedParts parts;
  parts.emplace_back("phi0", exists(x, box(bits_zero(n, x))));
  parts.emplace_back("phi1", phi1_bits(n));
  std::vector<Formula> flips;
  for (std::size_t i = 0; i < n; ++i) {
    Var y = Var::named("y" + std::to_string(i));
    std::vector<Formula> same;
    same.push_back(atom(bit_pred(i), {y}));
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) same.push_back(Formula::iff(atom(bit_pred(j), {x}), atom(bit_pred(j), {y})));
    flips.push_back(
        Formula::implies(neg(bit_pred(i), {x}), exists(y, box(conj_all(same)))));
  }
  parts.emplace_back("phi2", forall(x, box(conj_all(flips))));
  return parts;
}

Formula alpha_n(std::size_t n) {
  auto p = alpha_parts(n);
  return Formula::conj(p[0].second,
                       box_upto(n, conj_all({p[1].second, p[2].second, dia(Formula::top())})));
}

NamedParts beta_parts(const TilingInstance& inst, std::size_t n) {
  inst.validate();
  if (n == 0) throw std::invalid_argument("beta_nt: n must be at least 1");
  Var x = var("x"), y = var("y"), z = var("z");
  auto Qt = [](const std::string& t, Var a, Var b) { return atom(tile_pred(t), {a, b}); };
  NamedParts parts;
  parts.emplace_back("psi0", forall(x, box_n(3, Formula::implies(bits_zero(n, x), Qt(inst.t0, x, x)))));
  std::vector<Formula> one_tile;
  for (const auto& t : inst.tiles) {
    std::vector<Formula> c{Qt(t, x, y)};
    for (const auto& o : inst.tiles)
      if (o != t) c.push_back(neg(tile_pred(o), {x, y}));
    one_tile.push_back(conj_all(c));
  }
  parts.emplace_back("psi1", forall(x, box(forall(y, box(box(disj_all(one_tile)))))));
  std::vector<Formula> hs, vs;
  for (const auto& [a, b] : inst.h) hs.push_back(Formula::conj(Qt(a, x, z), Qt(b, y, z)));
  for (const auto& [a, b] : inst.v) vs.push_back(Formula::conj(Qt(a, z, x), Qt(b, z, y)));
  Formula s = succ_formula(n, x, y);
  auto grid = [&](const Formula& body) {
    return forall(x, box(forall(y, box(forall(z, box(body))))));
  };
  parts.emplace_back("psi2", grid(Formula::implies(s, disj_all(hs))));
  parts.emplace_back("psi3", grid(Formula::implies(s, disj_all(vs))));
  return parts;
}

Formula beta_nt(const TilingInstance& inst, std::size_t n) {
  Formula p1 = phi1_bits(n);
  std::vector<Formula> inner{p1, box(p1), box(box(p1)), dia_n(3, Formula::top())};
  for (const auto& [name, f] : beta_parts(inst, n)) inner.push_back(f);
  return Formula::conj(alpha_n(n), box_n(n, conj_all(inner)));
}

bool tiling_oracle(const TilingInstance& inst, std::size_t side) {
  inst.validate();
  if (side == 0) return true;
  std::vector<std::size_t> grid(side * side);
  auto index = [&](const std::string& t) {
    return std::size_t(std::find(inst.tiles.begin(), inst.tiles.end(), t) - inst.tiles.begin());
  };
  std::size_t m = inst.tiles.size();
  std::vector<char> H(m * m, 0), V(m * m, 0);
  for (const auto& [a, b] : inst.h) H[index(a) * m + index(b)] = 1;
  for (const auto& [a, b] : inst.v) V[index(a) * m + index(b)] = 1;
  // Cell (i, j) is grid[j * side + i]; i grows horizontally.
  std::function<bool(std::size_t)> fill = [&](std::size_t c) {
    if (c == grid.size()) return true;
    std::size_t i = c % side, j = c / side;
    for (std::size_t t = 0; t < m; ++t) {
      if (c == 0 && t != index(inst.t0)) continue;
      if (i > 0 && !H[grid[c - 1] * m + t]) continue;
      if (j > 0 && !V[grid[c - side] * m + t]) continue;
      grid[c] = t;
      if (fill(c + 1)) return true;
    }
    return false;
  };
  return fill(0);
}

}  // namespace bfoml
