#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

// forall-box, exists-box, box-forall, box-exists (duals included).
enum class Bundle : std::uint8_t { AB = 0, EB = 1, BA = 2, BE = 3 };

inline constexpr std::array<Bundle, 4> kAllBundles = {Bundle::AB, Bundle::EB, Bundle::BA,
                                                      Bundle::BE};

std::string bundle_name(Bundle b);

class BundleSet {
 public:
  constexpr BundleSet() = default;
  constexpr explicit BundleSet(std::uint8_t bits) : bits_(bits & 0xF) {}
  BundleSet(std::initializer_list<Bundle> bs) {
    for (Bundle b : bs) insert(b);
  }
  void insert(Bundle b) { bits_ |= bit(b); }
  bool contains(Bundle b) const { return bits_ & bit(b); }
  bool subset_of(BundleSet o) const { return (bits_ & ~o.bits_) == 0; }
  std::uint8_t bits() const { return bits_; }
  std::size_t count() const;
  BundleSet operator|(BundleSet o) const { return BundleSet(bits_ | o.bits_); }
  bool operator==(const BundleSet&) const = default;
  // "AB,EB" style; "none" for the empty set.
  std::string to_string() const;
  static BundleSet parse(const std::string& text);  // throws std::invalid_argument

 private:
  static constexpr std::uint8_t bit(Bundle b) { return 1u << static_cast<unsigned>(b); }
  std::uint8_t bits_ = 0;
};

inline const BundleSet kAbbabe{Bundle::AB, Bundle::BA, Bundle::BE};

// All bundle sets under which the NNF formula parses in the bundled grammar
// (a quantifier must sit directly above or below a modality it pairs with).
// Empty when the formula is not bundled.
std::vector<BundleSet> bundle_parses(const Formula& phi);

// Preferred parse: avoids EB when possible, then fewest bundles.
std::optional<BundleSet> bundles_used(const Formula& phi);
// Describes the first quantifier that cannot be paired, if any.
std::optional<std::string> bundled_violation(const Formula& phi);

bool in_lbf(const Formula& phi);
std::optional<std::string> lbf_violation(const Formula& phi);

bool in_abbabe(const Formula& phi);
std::optional<std::string> abbabe_violation(const Formula& phi);

// Restricted bundled grammars used for sampling and containment tests.
bool in_bundled_with(const Formula& phi, BundleSet allowed);

enum class DomainRegime { Constant, Increasing };
std::string regime_name(DomainRegime r);

struct FragmentStatus {
  enum class Verdict { Decidable, Undecidable, NoFMP };
  Verdict verdict = Verdict::Undecidable;
  std::string upper;  // Decidable only: "PSpace", "NexpTime", "ExpSpace"
  std::string lower;
  std::string note;
  bool via_closure = false;  // true when no printed row covers the cell directly

  std::string label() const;  // "PSpace-complete", "ExpSpace/NexpTime", "Undecidable", "No FMP"
};

enum class Mark { Yes, No, Any };

struct TableRow {
  DomainRegime regime;
  std::array<Mark, 4> marks;  // AB, EB, BA, BE
  FragmentStatus status;
  bool matches(DomainRegime r, BundleSet s) const;
};

// The printed rows of the classification table, in order.
const std::vector<TableRow>& classification_rows();

FragmentStatus classify(BundleSet bundles, DomainRegime regime);
// The loosely bundled row (increasing domains).
FragmentStatus classify_lbf();

}  // namespace bfoml
