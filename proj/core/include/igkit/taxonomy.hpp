#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace igkit {

// One node of a label taxonomy. Nodes with an empty code are descriptive
// grouping levels; they appear in ancestor paths but cannot be used as
// annotation labels.
struct TaxonomyNode {
  std::string prefix;
  std::string code;
  std::string name;
  std::vector<std::string> aliases;
  const TaxonomyNode* parent = nullptr;
  std::vector<const TaxonomyNode*> children;

  bool annotatable() const { return !code.empty(); }
};

// One row of a user taxonomy definition. parent is the code of the parent
// node within the same prefix; empty means root.
struct TaxonomyEntry {
  std::string prefix;
  std::string code;
  std::string name;
  std::string parent;
};

enum class TaxonomyErrorCode {
  UnknownPrefix,
  UnknownLabel,
  DuplicateCode,
  CycleDetected,
  ReservedPrefixModification,
  MalformedDefinition,
};

struct TaxonomyError {
  TaxonomyErrorCode code;
  std::string message;
};

std::string to_string(TaxonomyErrorCode code);

struct TaxonomyMergeResult;

class TaxonomyRegistry {
public:
  TaxonomyRegistry() = default;
  TaxonomyRegistry(TaxonomyRegistry&&) noexcept = default;
  TaxonomyRegistry& operator=(TaxonomyRegistry&&) noexcept = default;
  // Nodes are referenced by stable pointers; copying would silently
  // invalidate them. merge() is the way to derive a new registry.
  TaxonomyRegistry(const TaxonomyRegistry&) = delete;
  TaxonomyRegistry& operator=(const TaxonomyRegistry&) = delete;

  // The built-in taxonomies: ctx, anim, metatype, role, regfunc, confunc,
  // governance, consequence. Loaded once, immutable afterwards.
  static const TaxonomyRegistry& builtin();

  // Exact (prefix, code) lookup; null when absent. Only annotatable nodes
  // are indexed.
  const TaxonomyNode* find(std::string_view prefix, std::string_view code) const;

  struct ResolveResult {
    const TaxonomyNode* node = nullptr;
    std::optional<TaxonomyError> error;
    bool ok() const { return node != nullptr; }
  };
  // Label lookup with diagnostics: UnknownPrefix for an unregistered
  // taxonomy, UnknownLabel (with a nearest-match suggestion) otherwise.
  ResolveResult resolve(std::string_view prefix, std::string_view label) const;

  // Path root..node, inclusive; length >= 1.
  static std::vector<const TaxonomyNode*> ancestors(const TaxonomyNode* node);

  bool has_prefix(std::string_view prefix) const;
  std::vector<std::string> prefixes() const;
  std::vector<const TaxonomyNode*> roots(std::string_view prefix) const;
  // All nodes of one prefix in definition order (pre-order per tree).
  std::vector<const TaxonomyNode*> nodes(std::string_view prefix) const;
  std::size_t coded_count(std::string_view prefix) const;

  // Returns a new registry extended with the given entries. Entries may
  // introduce new prefixes or hang leaves under existing nodes; they can
  // never redefine a node carried over from the built-in set.
  TaxonomyMergeResult merge(const std::vector<TaxonomyEntry>& entries) const;

private:
  TaxonomyNode* add(std::string prefix, std::string code, std::string name,
                    TaxonomyNode* parent, std::vector<std::string> aliases = {},
                    bool reserved = false);
  TaxonomyRegistry clone() const;

  std::vector<std::unique_ptr<TaxonomyNode>> nodes_;
  std::vector<std::pair<std::string, std::string>> reserved_;
};

struct TaxonomyMergeResult {
  std::optional<TaxonomyRegistry> registry;
  std::optional<TaxonomyError> error;
  bool ok() const { return registry.has_value(); }
};

struct TaxonomyFileResult {
  std::vector<TaxonomyEntry> entries;
  std::optional<TaxonomyError> error;
  bool ok() const { return !error.has_value(); }
};

// Parses the JSON taxonomy definition format described in docs/formats.md:
// an object with a "nodes" array of {prefix, code, name, parent?} objects.
TaxonomyFileResult parse_taxonomy_file(std::string_view json_text);

}  // namespace igkit
