// Statement linting: completeness of necessary components, taxonomy
// annotation checks, feature-usage extraction, and profile conformance.
#pragma once

#include <optional>
#include <vector>

#include "igkit/model.hpp"
#include "igkit/notation.hpp"
#include "igkit/profile.hpp"
#include "igkit/taxonomy.hpp"

namespace igkit {

// Checks every atomic statement of the tree (nested ones independently)
// for the necessary components of its own family: A and I regulative,
// E and F constitutive, both sets when a single atomic mixes families.
// Dual-coded atomics are checked per reading and report the failing
// family. Context never errors; a missing activation condition or
// execution constraint yields an ImpliedContext info.
// Diagnostic codes: MissingAttributes, MissingAim,
// MissingConstitutedEntity, MissingConstitutiveFunction,
// PolymorphicFamilyIncomplete, ImpliedContext.
std::vector<Diagnostic> check_completeness(const Statement& statement);

// Resolves every semantic annotation against the registry and checks
// placement: regfunc only on Aim, confunc only on Constitutive Function,
// ctx only on contexts, animacy/metatype/role only on actors, objects,
// entities and properties (their property nodes included); polref goes
// anywhere. Labels under a registered prefix must resolve
// (UnknownTaxonomyLabel); an unregistered prefix is a warning
// (UnknownPrefix), since custom annotation categories are legal but
// unverifiable. With strict_specificity, resolving to a non-leaf node
// warns NonLeafLabel.
std::vector<Diagnostic> validate_annotations(const Statement& statement,
                                             const TaxonomyRegistry& registry,
                                             bool strict_specificity = false);

// The profile features a statement's coding exercises. Implied
// components never count. Properties or nesting on a component count the
// host's Ext variant; context taxonomy tags count Cac_Ext/Cex_Ext;
// written component- or property-level operators count L; references
// count R, function annotations U_reg/U_con, all other semantic
// annotations S; an "or else" counts O.
FeatureSet feature_usage(const Statement& statement);

// One error per used feature the profile does not cover
// (FeatureNotInProfile), plus an info per necessary feature the profile
// removed (NecessaryFeatureRemoved); validate() uses the latter to
// suppress the corresponding completeness errors.
std::vector<Diagnostic> check_profile_conformance(const Statement& statement,
                                                  const Profile& profile);

struct ValidationOptions {
  const TaxonomyRegistry* registry = nullptr;  // builtin() when null
  std::optional<Profile> profile;
  bool strict_specificity = false;
};

struct ValidationReport {
  std::string statement_id;
  StatementKind kind = StatementKind::Regulative;
  std::vector<Diagnostic> diagnostics;
  FeatureSet feature_usage;

  bool ok() const;  // no error-severity diagnostics
};

// Full lint of one record: parse diagnostics, completeness (suppressed
// for necessary features the profile removes), annotation checks,
// governance metadata consistency, and profile conformance. Every
// diagnostic is stamped with the record id.
ValidationReport validate(const SourceRecord& record, const ValidationOptions& options = {});

}  // namespace igkit
