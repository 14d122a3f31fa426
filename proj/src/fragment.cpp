#include "bfoml/fragment.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include "bfoml/syntax.hpp"

namespace bfoml {

std::string bundle_name(Bundle b) {
  switch (b) {
    case Bundle::AB:
      return "AB";
    case Bundle::EB:
      return "EB";
    case Bundle::BA:
      return "BA";
    case Bundle::BE:
      return "BE";
  }
  return "?";
}

std::size_t BundleSet::count() const { return std::popcount(bits_); }

std::string BundleSet::to_string() const {
  std::string s;
  for (Bundle b : kAllBundles) {
    if (!contains(b)) continue;
    if (!s.empty()) s += ",";
    s += bundle_name(b);
  }
  return s.empty() ? "none" : s;
}

BundleSet BundleSet::parse(const std::string& text) {
  BundleSet out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string up;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c)))
        up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up.empty() || up == "NONE") continue;
    bool found = false;
    for (Bundle b : kAllBundles) {
      if (bundle_name(b) == up) {
        out.insert(b);
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("unknown bundle '" + item + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bundled grammar

namespace {

using MaskSet = std::uint16_t;  // bit m set <=> bundle mask m achievable

MaskSet single(std::uint8_t mask) { return static_cast<MaskSet>(1u << mask); }

MaskSet combine(MaskSet a, MaskSet b) {
  MaskSet out = 0;
  for (unsigned i = 0; i < 16; ++i)
    if (a & (1u << i))
      for (unsigned j = 0; j < 16; ++j)
        if (b & (1u << j)) out |= single(static_cast<std::uint8_t>(i | j));
  return out;
}

MaskSet with_bundle(MaskSet a, Bundle b) {
  MaskSet out = 0;
  for (unsigned i = 0; i < 16; ++i)
    if (a & (1u << i)) out |= single(static_cast<std::uint8_t>(i | (1u << static_cast<unsigned>(b))));
  return out;
}

// Quantifier above modality: forall-box / exists-dia are AB; exists-box /
// forall-dia are EB.
Bundle quantifier_first(Kind q, Kind m) {
  bool same = (q == Kind::Forall) == (m == Kind::Box);
  return same ? Bundle::AB : Bundle::EB;
}

// Modality above quantifier: box-forall / dia-exists are BA; box-exists /
// dia-forall are BE.
Bundle modality_first(Kind m, Kind q) {
  bool same = (q == Kind::Forall) == (m == Kind::Box);
  return same ? Bundle::BA : Bundle::BE;
}

MaskSet parses_rec(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::NegAtom:
      return single(0);
    case Kind::And:
    case Kind::Or: {
      MaskSet l = parses_rec(f.lhs());
      if (!l) return 0;
      return combine(l, parses_rec(f.rhs()));
    }
    case Kind::Forall:
    case Kind::Exists: {
      const Formula& b = f.body();
      if (!b.is_modal()) return 0;
      return with_bundle(parses_rec(b.body()), quantifier_first(f.kind(), b.kind()));
    }
    case Kind::Box:
    case Kind::Dia: {
      const Formula& b = f.body();
      MaskSet out = parses_rec(b);
      if (b.is_quantifier())
        out |= with_bundle(parses_rec(b.body()), modality_first(f.kind(), b.kind()));
      return out;
    }
    default:
      throw std::invalid_argument("bundled grammar: formula is not in negation normal form");
  }
}

// Innermost subformula without a bundled reading.
std::optional<std::string> unbundled_part(const Formula& f) {
  if (parses_rec(f) != 0) return std::nullopt;
  if (f.is_binary()) {
    if (auto r = unbundled_part(f.lhs())) return r;
    if (auto r = unbundled_part(f.rhs())) return r;
  } else if (f.is_unary()) {
    if (auto r = unbundled_part(f.body())) return r;
  }
  if (f.is_quantifier()) return "quantifier not paired with a modality: " + print(f);
  return "not in the bundled grammar: " + print(f);
}

}  // namespace

std::vector<BundleSet> bundle_parses(const Formula& phi) {
  MaskSet m = parses_rec(phi);
  std::vector<BundleSet> out;
  for (unsigned i = 0; i < 16; ++i)
    if (m & (1u << i)) out.emplace_back(static_cast<std::uint8_t>(i));
  return out;
}

std::optional<BundleSet> bundles_used(const Formula& phi) {
  auto ps = bundle_parses(phi);
  if (ps.empty()) return std::nullopt;
  return *std::min_element(ps.begin(), ps.end(), [](BundleSet a, BundleSet b) {
    auto key = [](BundleSet s) {
      return std::make_tuple(s.contains(Bundle::EB), s.count(), s.bits());
    };
    return key(a) < key(b);
  });
}

std::optional<std::string> bundled_violation(const Formula& phi) {
  if (!bundle_parses(phi).empty()) return std::nullopt;
  return unbundled_part(phi);
}

bool in_bundled_with(const Formula& phi, BundleSet allowed) {
  for (BundleSet s : bundle_parses(phi))
    if (s.subset_of(allowed)) return true;
  return false;
}

bool in_abbabe(const Formula& phi) { return in_bundled_with(phi, kAbbabe); }

std::optional<std::string> abbabe_violation(const Formula& phi) {
  if (in_abbabe(phi)) return std::nullopt;
  if (auto r = bundled_violation(phi)) return r;
  return "every bundled reading uses the exists-box bundle or its dual (forall-dia)";
}

// ---------------------------------------------------------------------------
// Loosely bundled grammar

namespace {

std::optional<std::string> alpha_violation(const Formula& f);

std::optional<std::string> psi_violation(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::NegAtom:
      return std::nullopt;
    case Kind::And:
    case Kind::Or: {
      if (auto r = psi_violation(f.lhs())) return r;
      return psi_violation(f.rhs());
    }
    case Kind::Box:
    case Kind::Dia:
      return alpha_violation(f.body());
    case Kind::Forall:
    case Kind::Exists:
      return "quantifier inside the scope of a quantifier prefix: " + print(f);
    default:
      throw std::invalid_argument("LBF grammar: formula is not in negation normal form");
  }
}

std::optional<std::string> alpha_violation(const Formula& f) {
  switch (f.kind()) {
    case Kind::And:
    case Kind::Or: {
      if (auto r = alpha_violation(f.lhs())) return r;
      return alpha_violation(f.rhs());
    }
    case Kind::Exists:
    case Kind::Forall: {
      const Formula* g = &f;
      while (g->kind() == Kind::Exists) g = &g->body();
      while (g->kind() == Kind::Forall) g = &g->body();
      if (g->kind() == Kind::Exists) return "forbidden forall-exists alternation: " + print(f);
      return psi_violation(*g);
    }
    default:
      return psi_violation(f);
  }
}

}  // namespace

std::optional<std::string> lbf_violation(const Formula& phi) { return alpha_violation(phi); }

bool in_lbf(const Formula& phi) { return !alpha_violation(phi).has_value(); }

// ---------------------------------------------------------------------------
// Classification table

std::string regime_name(DomainRegime r) {
  return r == DomainRegime::Constant ? "constant" : "increasing";
}

std::string FragmentStatus::label() const {
  switch (verdict) {
    case Verdict::Undecidable:
      return "Undecidable";
    case Verdict::NoFMP:
      return "No FMP";
    case Verdict::Decidable:
      return upper == lower ? upper + "-complete" : upper + "/" + lower;
  }
  return "?";
}

bool TableRow::matches(DomainRegime r, BundleSet s) const {
  if (r != regime) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    bool has = s.contains(kAllBundles[i]);
    if (marks[i] == Mark::Yes && !has) return false;
    if (marks[i] == Mark::No && has) return false;
  }
  return true;
}

namespace {

FragmentStatus decidable(std::string upper, std::string lower, std::string note) {
  return {FragmentStatus::Verdict::Decidable, std::move(upper), std::move(lower), std::move(note),
          false};
}
FragmentStatus undecidable(std::string note) {
  return {FragmentStatus::Verdict::Undecidable, "", "", std::move(note), false};
}
FragmentStatus no_fmp(std::string note) {
  return {FragmentStatus::Verdict::NoFMP, "", "", std::move(note), false};
}

constexpr Mark Y = Mark::Yes, N = Mark::No, A = Mark::Any;
constexpr DomainRegime C = DomainRegime::Constant, I = DomainRegime::Increasing;

int complexity_rank(const std::string& c) {
  if (c == "PSpace") return 0;
  if (c == "NexpTime") return 1;
  if (c == "ExpSpace") return 2;
  return 3;
}

int verdict_rank(FragmentStatus::Verdict v) {
  switch (v) {
    case FragmentStatus::Verdict::Undecidable:
      return 2;
    case FragmentStatus::Verdict::NoFMP:
      return 1;
    case FragmentStatus::Verdict::Decidable:
      return 0;
  }
  return 0;
}

std::string marks_text(const TableRow& r) {
  std::string s;
  for (std::size_t i = 0; i < 4; ++i) {
    if (r.marks[i] == Mark::No) continue;
    if (!s.empty()) s += ",";
    s += bundle_name(kAllBundles[i]);
    if (r.marks[i] == Mark::Any) s += "?";
  }
  return s.empty() ? "none" : s;
}

}  // namespace

const std::vector<TableRow>& classification_rows() {
  static const std::vector<TableRow> rows = {
      {C, {Y, A, A, A}, undecidable("constant domain, forall-box present (prior result)")},
      {C, {A, A, Y, A}, undecidable("constant domain, box-forall present (prior result)")},
      {C, {N, Y, N, N}, decidable("PSpace", "PSpace", "constant domain, exists-box only")},
      {C, {N, N, N, Y}, no_fmp("constant domain, box-exists only")},
      {C, {N, Y, N, Y}, no_fmp("constant domain, exists-box with box-exists")},
      {I, {Y, N, N, N}, decidable("PSpace", "PSpace", "increasing domain, forall-box only")},
      {I, {N, Y, N, N}, decidable("PSpace", "PSpace", "increasing domain, exists-box only")},
      {I, {N, N, Y, N}, decidable("PSpace", "PSpace", "increasing domain, box-forall only")},
      {I, {N, N, N, Y}, decidable("ExpSpace", "PSpace", "increasing domain, box-exists only")},
      {I, {Y, Y, N, N}, decidable("ExpSpace", "NexpTime", "increasing domain, forall-box with exists-box")},
      {I, {N, N, Y, Y}, decidable("ExpSpace", "NexpTime", "increasing domain, box-forall with box-exists")},
      {I, {A, Y, Y, A}, undecidable("increasing domain, exists-box with box-forall")},
      {I, {N, Y, N, Y}, no_fmp("increasing domain, exists-box with box-exists")},
      {I, {Y, Y, N, Y}, undecidable("increasing domain, forall-box, exists-box and box-exists")},
      {I, {Y, N, Y, Y}, decidable("ExpSpace", "NexpTime", "increasing domain, forall-box, box-forall and box-exists")},
  };
  return rows;
}

FragmentStatus classify_lbf() {
  return decidable("ExpSpace", "NexpTime", "increasing domain, loosely bundled fragment");
}

FragmentStatus classify(BundleSet s, DomainRegime regime) {
  const auto& rows = classification_rows();

  // Printed rows first; overlaps resolve Undecidable > NoFMP > Decidable.
  const TableRow* best = nullptr;
  for (const auto& r : rows)
    if (r.matches(regime, s) &&
        (!best || verdict_rank(r.status.verdict) > verdict_rank(best->status.verdict)))
      best = &r;
  if (best) {
    FragmentStatus out = best->status;
    out.note = "row [" + marks_text(*best) + "]: " + out.note;
    return out;
  }

  // Closure over the cells of fully specified rows (no wildcards are needed:
  // a wildcard row already matches every superset it covers).
  auto cells = [&](auto pred) {
    std::vector<std::pair<BundleSet, const TableRow*>> out;
    for (unsigned m = 0; m < 16; ++m) {
      BundleSet t(static_cast<std::uint8_t>(m));
      if (!pred(t)) continue;
      for (const auto& r : rows)
        if (r.matches(regime, t)) out.emplace_back(t, &r);
    }
    return out;
  };

  for (auto verdict : {FragmentStatus::Verdict::Undecidable, FragmentStatus::Verdict::NoFMP}) {
    for (const auto& [t, r] : cells([&](BundleSet t) { return t.subset_of(s); })) {
      if (r->status.verdict != verdict) continue;
      FragmentStatus out = r->status;
      out.via_closure = true;
      out.note = "closure: contains the " + t.to_string() + " cell of row [" + marks_text(*r) +
                 "] (" + r->status.note + ")";
      return out;
    }
  }

  // Decidable: upper bound from the cheapest decidable superset cell, lower
  // bound from the hardest decidable subset cell (propositional modal logic
  // gives PSpace-hardness for every fragment).
  const TableRow* up = nullptr;
  BundleSet up_cell;
  for (const auto& [t, r] : cells([&](BundleSet t) { return s.subset_of(t); })) {
    if (r->status.verdict != FragmentStatus::Verdict::Decidable) continue;
    if (!up || complexity_rank(r->status.upper) < complexity_rank(up->status.upper) ||
        (complexity_rank(r->status.upper) == complexity_rank(up->status.upper) &&
         t.count() < up_cell.count())) {
      up = r;
      up_cell = t;
    }
  }
  if (!up) throw std::logic_error("classify: no row covers " + s.to_string());
  std::string lower = "PSpace";
  std::string lower_src = "propositional modal logic";
  for (const auto& [t, r] : cells([&](BundleSet t) { return t.subset_of(s); })) {
    if (r->status.verdict != FragmentStatus::Verdict::Decidable) continue;
    if (complexity_rank(r->status.lower) > complexity_rank(lower)) {
      lower = r->status.lower;
      lower_src = "row [" + marks_text(*r) + "]";
    }
  }
  FragmentStatus out = decidable(up->status.upper, lower, "");
  out.via_closure = true;
  out.note = "closure: upper bound from superset " + up_cell.to_string() + " (row [" +
             marks_text(*up) + "]), lower bound from " + lower_src;
  return out;
}

}  // namespace bfoml
