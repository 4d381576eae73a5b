#include "igkit/validate.hpp"

#include <algorithm>
#include <set>

namespace igkit {

namespace {

Diagnostic make_diag(Severity sev, std::string code, std::string message) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.message = std::move(message);
  return d;
}

// Applies `fn` to every atomic node of the tree, nested component
// statements included, in document order.
template <typename Fn>
void for_each_atomic(const Statement& s, Fn&& fn) {
  if (const auto* atomic = std::get_if<Atomic>(&s.node)) {
    fn(*atomic);
    struct PropWalk {
      Fn& fn;
      void props(const std::vector<PropertyNode>& nodes) {
        for (const PropertyNode& p : nodes) {
          if (p.nested) for_each_atomic(*p.nested, fn);
          props(p.children);
        }
      }
    } walk{fn};
    for (const Component& c : atomic->components) {
      if (c.nested) for_each_atomic(*c.nested, fn);
      walk.props(c.properties);
    }
    return;
  }
  if (const auto* combo = std::get_if<Combination>(&s.node)) {
    for (const StatementPtr& operand : combo->operands) for_each_atomic(*operand, fn);
    return;
  }
  if (const auto* neg = std::get_if<Negation>(&s.node)) {
    for_each_atomic(*neg->operand, fn);
    return;
  }
  const auto& oe = std::get<OrElse>(s.node);
  for_each_atomic(*oe.monitored, fn);
  for_each_atomic(*oe.consequential, fn);
}

// ---------------------------------------------------------------------------
// check_completeness

struct CodePresence {
  std::set<ComponentCode> coded;      // primary codes, implied excluded
  std::set<ComponentCode> any;        // primary or alternate
  bool has_alt = false;

  bool coded_has(ComponentCode c) const { return coded.count(c) != 0; }
  bool any_has(ComponentCode c) const { return any.count(c) != 0; }
};

CodePresence presence_of(const Atomic& atomic) {
  CodePresence p;
  for (const Component& c : atomic.components) {
    if (c.implied) continue;
    p.coded.insert(c.code);
    p.any.insert(c.code);
    if (c.alt_code) {
      p.any.insert(*c.alt_code);
      p.has_alt = true;
    }
  }
  return p;
}

bool family_regulative(const CodePresence& p) {
  for (ComponentCode c : p.coded) {
    if (!is_context_code(c) && is_regulative_code(c)) return true;
  }
  return false;
}

bool family_constitutive(const CodePresence& p) {
  for (ComponentCode c : p.coded) {
    if (!is_context_code(c) && is_constitutive_code(c)) return true;
  }
  return false;
}

void completeness_of_atomic(const Atomic& atomic, std::vector<Diagnostic>& out) {
  CodePresence p = presence_of(atomic);

  if (p.has_alt) {
    std::string missing;
    if (!p.any_has(ComponentCode::A)) missing = "Attributes (A)";
    if (!p.any_has(ComponentCode::I)) {
      if (!missing.empty()) missing += " and ";
      missing += "Aim (I)";
    }
    if (!missing.empty()) {
      out.push_back(make_diag(Severity::Error, "PolymorphicFamilyIncomplete",
                              "the regulative reading lacks " + missing));
    }
    missing.clear();
    if (!p.any_has(ComponentCode::E)) missing = "Constituted Entity (E)";
    if (!p.any_has(ComponentCode::F)) {
      if (!missing.empty()) missing += " and ";
      missing += "Constitutive Function (F)";
    }
    if (!missing.empty()) {
      out.push_back(make_diag(Severity::Error, "PolymorphicFamilyIncomplete",
                              "the constitutive reading lacks " + missing));
    }
  } else {
    const bool reg = family_regulative(p);
    const bool con = family_constitutive(p);
    if (reg || !con) {
      if (!p.coded_has(ComponentCode::A)) {
        out.push_back(make_diag(Severity::Error, "MissingAttributes",
                                "a regulative statement needs an Attributes (A) component"));
      }
      if (!p.coded_has(ComponentCode::I)) {
        out.push_back(make_diag(Severity::Error, "MissingAim",
                                "a regulative statement needs an Aim (I) component"));
      }
    }
    if (con) {
      if (!p.coded_has(ComponentCode::E)) {
        out.push_back(
            make_diag(Severity::Error, "MissingConstitutedEntity",
                      "a constitutive statement needs a Constituted Entity (E) component"));
      }
      if (!p.coded_has(ComponentCode::F)) {
        out.push_back(
            make_diag(Severity::Error, "MissingConstitutiveFunction",
                      "a constitutive statement needs a Constitutive Function (F) component"));
      }
    }
  }

  if (!p.coded_has(ComponentCode::Cac)) {
    out.push_back(make_diag(Severity::Info, "ImpliedContext",
                            std::string("activation condition implied: \"") +
                                std::string(kImpliedActivationText) + "\""));
  }
  if (!p.coded_has(ComponentCode::Cex)) {
    out.push_back(make_diag(Severity::Info, "ImpliedContext",
                            std::string("execution constraint implied: \"") +
                                std::string(kImpliedExecutionText) + "\""));
  }
}

// ---------------------------------------------------------------------------
// validate_annotations

bool placement_ok(const std::string& prefix, ComponentCode host) {
  if (prefix == "polref") return true;
  if (prefix == "ctx") return is_context_code(host);
  if (prefix == "regfunc") return host == ComponentCode::I;
  if (prefix == "confunc") return host == ComponentCode::F;
  if (prefix == "anim" || prefix == "metatype" || prefix == "role") {
    switch (host) {
      case ComponentCode::A:
      case ComponentCode::B:
      case ComponentCode::Bdir:
      case ComponentCode::Bind:
      case ComponentCode::E:
      case ComponentCode::P:
        return true;
      default:
        return false;
    }
  }
  // User taxonomies carry no placement rules; they may sit anywhere.
  return true;
}

void check_annotation(const SemanticAnnotation& sem, ComponentCode host,
                      const TaxonomyRegistry& registry, bool strict,
                      std::vector<Diagnostic>& out) {
  if (sem.prefix == "polref") return;
  if (!registry.has_prefix(sem.prefix)) {
    out.push_back(make_diag(Severity::Warning, "UnknownPrefix",
                            "annotation prefix '" + sem.prefix +
                                "' is not a registered taxonomy; treating it as custom"));
    return;
  }
  if (!placement_ok(sem.prefix, host)) {
    out.push_back(make_diag(Severity::Error, "MisplacedAnnotation",
                            "'" + sem.prefix + "' annotations do not apply to " +
                                to_string(host) + " components"));
  }
  auto result = registry.resolve(sem.prefix, sem.label);
  if (!result.ok()) {
    out.push_back(
        make_diag(Severity::Error, "UnknownTaxonomyLabel", result.error->message));
    return;
  }
  if (strict && !result.node->children.empty()) {
    out.push_back(make_diag(
        Severity::Warning, "NonLeafLabel",
        "'" + sem.prefix + ":" + sem.label + "' has more specific labels available"));
  }
}

void check_property_annotations(const PropertyNode& node, ComponentCode host,
                                const TaxonomyRegistry& registry, bool strict,
                                std::vector<Diagnostic>& out) {
  for (const SemanticAnnotation& sem : node.annotations) {
    check_annotation(sem, host, registry, strict, out);
  }
  for (const PropertyNode& child : node.children) {
    check_property_annotations(child, host, registry, strict, out);
  }
}

// ---------------------------------------------------------------------------
// feature_usage

Feature code_feature(ComponentCode code) {
  switch (code) {
    case ComponentCode::A:
      return Feature::A;
    case ComponentCode::B:
      return Feature::B;
    case ComponentCode::Bdir:
      return Feature::Bdir;
    case ComponentCode::Bind:
      return Feature::Bind;
    case ComponentCode::D:
      return Feature::D;
    case ComponentCode::I:
      return Feature::I;
    case ComponentCode::Cac:
      return Feature::Cac;
    case ComponentCode::Cex:
      return Feature::Cex;
    case ComponentCode::E:
      return Feature::E;
    case ComponentCode::F:
      return Feature::F;
    case ComponentCode::M:
      return Feature::M;
    case ComponentCode::P:
      return Feature::P;
  }
  return Feature::A;
}

void annotation_features(const std::vector<SemanticAnnotation>& annotations,
                         ComponentCode host, FeatureSet& out) {
  for (const SemanticAnnotation& sem : annotations) {
    if (sem.prefix == "ctx") {
      if (host == ComponentCode::Cex) {
        out.insert(Feature::Cex_Ext);
      } else {
        out.insert(Feature::Cac_Ext);
      }
    } else if (sem.prefix == "polref") {
      out.insert(Feature::R);
    } else if (sem.prefix == "regfunc") {
      out.insert(Feature::U_reg);
    } else if (sem.prefix == "confunc") {
      out.insert(Feature::U_con);
    } else {
      out.insert(Feature::S);
    }
  }
}

void property_features(const PropertyNode& node, ComponentCode host, FeatureSet& out) {
  if (node.sibling_op) out.insert(Feature::L);
  annotation_features(node.annotations, host, out);
  for (const PropertyNode& child : node.children) property_features(child, host, out);
}

void usage_of_atomic(const Atomic& atomic, FeatureSet& out) {
  for (const Component& c : atomic.components) {
    if (c.implied) continue;
    out.insert(code_feature(c.code));
    if (c.alt_code) out.insert(code_feature(*c.alt_code));
    if (!c.properties.empty() || c.nested) {
      if (auto ext = ext_variant(code_feature(c.code))) out.insert(*ext);
    }
    if (c.op_explicit && c.sibling_op) out.insert(Feature::L);
    annotation_features(c.annotations, c.code, out);
    for (const PropertyNode& p : c.properties) property_features(p, c.code, out);
  }
}

// ---------------------------------------------------------------------------
// validate plumbing

struct NecessaryFeature {
  Feature feature;
  const char* diagnostic;
  const char* name;
};

constexpr NecessaryFeature kNecessary[] = {
    {Feature::A, "MissingAttributes", "Attributes (A)"},
    {Feature::I, "MissingAim", "Aim (I)"},
    {Feature::E, "MissingConstitutedEntity", "Constituted Entity (E)"},
    {Feature::F, "MissingConstitutiveFunction", "Constitutive Function (F)"},
};

void governance_walk(const Statement& s, std::vector<Diagnostic>& out) {
  if (s.consequence && s.governance && *s.governance != Governance::Consequential) {
    out.push_back(make_diag(Severity::Warning, "GovernanceConsequenceMismatch",
                            std::string("a consequence type is set but the statement is "
                                        "marked ") +
                                to_string(*s.governance)));
  }
  if (const auto* combo = std::get_if<Combination>(&s.node)) {
    for (const StatementPtr& operand : combo->operands) governance_walk(*operand, out);
  } else if (const auto* neg = std::get_if<Negation>(&s.node)) {
    governance_walk(*neg->operand, out);
  } else if (const auto* oe = std::get_if<OrElse>(&s.node)) {
    governance_walk(*oe->monitored, out);
    governance_walk(*oe->consequential, out);
  } else {
    const auto& atomic = std::get<Atomic>(s.node);
    for (const Component& c : atomic.components) {
      if (c.nested) governance_walk(*c.nested, out);
    }
  }
}

}  // namespace

std::vector<Diagnostic> check_completeness(const Statement& statement) {
  std::vector<Diagnostic> out;
  for_each_atomic(statement, [&out](const Atomic& a) { completeness_of_atomic(a, out); });
  return out;
}

std::vector<Diagnostic> validate_annotations(const Statement& statement,
                                             const TaxonomyRegistry& registry,
                                             bool strict_specificity) {
  std::vector<Diagnostic> out;
  for_each_atomic(statement, [&](const Atomic& atomic) {
    for (const Component& c : atomic.components) {
      for (const SemanticAnnotation& sem : c.annotations) {
        check_annotation(sem, c.code, registry, strict_specificity, out);
      }
      for (const PropertyNode& p : c.properties) {
        check_property_annotations(p, c.code, registry, strict_specificity, out);
      }
    }
  });
  return out;
}

FeatureSet feature_usage(const Statement& statement) {
  FeatureSet out;
  for_each_atomic(statement, [&out](const Atomic& a) { usage_of_atomic(a, out); });

  struct OrElseWalk {
    FeatureSet& out;
    void visit(const Statement& s) {
      if (const auto* combo = std::get_if<Combination>(&s.node)) {
        for (const StatementPtr& operand : combo->operands) visit(*operand);
      } else if (const auto* neg = std::get_if<Negation>(&s.node)) {
        visit(*neg->operand);
      } else if (const auto* oe = std::get_if<OrElse>(&s.node)) {
        out.insert(Feature::O);
        visit(*oe->monitored);
        visit(*oe->consequential);
      } else {
        const auto& atomic = std::get<Atomic>(s.node);
        for (const Component& c : atomic.components) {
          if (c.nested) visit(*c.nested);
        }
      }
    }
  };
  OrElseWalk{out}.visit(statement);
  return out;
}

std::vector<Diagnostic> check_profile_conformance(const Statement& statement,
                                                  const Profile& profile) {
  std::vector<Diagnostic> out;
  for (Feature f : feature_usage(statement)) {
    if (!feature_set_includes(profile.expanded, f)) {
      out.push_back(make_diag(Severity::Error, "FeatureNotInProfile",
                              "the coding uses " + to_string(f) +
                                  " which is outside the applied profile"));
    }
  }
  for (const NecessaryFeature& n : kNecessary) {
    if (!feature_set_includes(profile.expanded, n.feature)) {
      out.push_back(make_diag(Severity::Info, "NecessaryFeatureRemoved",
                              std::string("the profile removes ") + n.name +
                                  "; its completeness errors are suppressed"));
    }
  }
  return out;
}

bool ValidationReport::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

ValidationReport validate(const SourceRecord& record, const ValidationOptions& options) {
  ValidationReport report;
  report.statement_id = record.id;
  report.diagnostics = record.diagnostics;

  const TaxonomyRegistry& registry =
      options.registry ? *options.registry : TaxonomyRegistry::builtin();
  const auto run_checks = [&](const Statement& s) {
    std::vector<Diagnostic> completeness = check_completeness(s);
    if (options.profile) {
      std::set<std::string> suppressed;
      for (const NecessaryFeature& n : kNecessary) {
        if (!feature_set_includes(options.profile->expanded, n.feature)) {
          suppressed.insert(n.diagnostic);
        }
      }
      std::erase_if(completeness, [&suppressed](const Diagnostic& d) {
        return suppressed.count(d.code) != 0;
      });
    }
    report.diagnostics.insert(report.diagnostics.end(), completeness.begin(),
                              completeness.end());

    std::vector<Diagnostic> annotations =
        validate_annotations(s, registry, options.strict_specificity);
    report.diagnostics.insert(report.diagnostics.end(), annotations.begin(),
                              annotations.end());

    governance_walk(s, report.diagnostics);

    if (options.profile) {
      std::vector<Diagnostic> conformance = check_profile_conformance(s, *options.profile);
      report.diagnostics.insert(report.diagnostics.end(), conformance.begin(),
                                conformance.end());
    }
  };

  if (record.parsed) {
    report.kind = classify(*record.parsed);
    report.feature_usage = igkit::feature_usage(*record.parsed);
    run_checks(*record.parsed);
  }
  if (record.alternate) run_checks(*record.alternate);

  for (Diagnostic& d : report.diagnostics) {
    if (d.statement_id.empty()) d.statement_id = record.id;
  }
  return report;
}

}  // namespace igkit
