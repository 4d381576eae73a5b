#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "igkit/model.hpp"

namespace igkit {

// Coding features across the three levels, in the order used for canonical
// profile text. General symbols (B, C, U, and their Ext variants) subsume
// their directed/conditional specializations.
enum class Feature {
  A, B, Bdir, Bind, D, I, C, Cac, Cex, O, P, M, E, F,
  A_Ext, B_Ext, Bdir_Ext, Bind_Ext, C_Ext, Cac_Ext, Cex_Ext, P_Ext, E_Ext,
  R, L, S, U, U_reg, U_con,
};

using FeatureSet = std::set<Feature>;

std::string to_string(Feature feature);
std::optional<Feature> feature_from_string(std::string_view text);

// B -> {Bdir, Bind}; empty for symbols without specializations.
const std::vector<Feature>& specializations(Feature feature);
// Bdir -> B; nullopt for symbols that are not specializations.
std::optional<Feature> general_feature(Feature feature);
// B -> B_Ext; nullopt for symbols without a refinement variant.
std::optional<Feature> ext_variant(Feature feature);

// Regulative and constitutive universes merged; conformance checking later
// restricts to the symbols applicable to a statement's kind.
FeatureSet baseline_features(Level level);

struct Profile {
  Level baseline = Level::Core;
  std::vector<Feature> removed;
  std::vector<Feature> added;
  FeatureSet expanded;

  bool operator==(const Profile& other) const = default;
};

struct ExpandResult {
  FeatureSet features;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Applies removals (each demoting the highest-level variant of its symbol
// still present), then additions. Splits general symbols on demand so that
// e.g. removing Cex from Extended leaves Cac_Ext in place.
ExpandResult expand_features(Level baseline, const std::vector<Feature>& removed,
                             const std::vector<Feature>& added);

struct ProfileResult {
  std::optional<Profile> profile;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return profile.has_value(); }
};

// Parses `IG <Level>[-<features>][+<features>]`. Feature runs are
// concatenated symbols, longest-match tokenized; `--` is accepted alongside
// `-`, and `,Ext` alongside `_Ext`.
ProfileResult parse_profile(std::string_view expr);

// Canonical text: baseline, removals, additions, each side in Feature order.
std::string format_profile(const Profile& profile);

// Membership with subsumption in both directions: a general symbol covers
// its specializations, and any present specialization answers for its
// general symbol.
bool feature_set_includes(const FeatureSet& set, Feature feature);
bool profile_includes(const Profile& profile, Feature feature);

}  // namespace igkit
