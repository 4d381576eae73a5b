// Corpus-level operations: prose pre-processing, frequency statistics,
// manifest parsing, and the versioned interchange format.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igkit/model.hpp"
#include "igkit/notation.hpp"

namespace igkit {

// Splits prose into candidate statement texts: enumeration markers
// ("(a)", "(1)", "(iv)", bullet glyphs) are stripped, sentences split on
// terminator runs outside parentheses and quotes, and a colon followed
// by a capitalized clause ends a statement (the colon becomes a period).
// A colon whose continuation is an enumeration item does not split, so
// list lead-ins stay with their first item. Interior wording is never
// altered; a trailing truncation ellipsis collapses to a period.
std::vector<std::string> preprocess(std::string_view raw);

// Occurrence counts over a parsed corpus. Explicit and implied
// components are tallied separately; labels count semantic annotations
// by (prefix, label-or-value); vertical_depth histograms "or else"
// pairs by depth, nesting_depth histograms component-level nested
// statements by depth.
struct FrequencyTable {
  std::map<ComponentCode, std::size_t> components;
  std::map<ComponentCode, std::size_t> implied;
  std::map<std::pair<std::string, std::string>, std::size_t> labels;
  std::map<int, std::size_t> vertical_depth;
  std::map<int, std::size_t> nesting_depth;

  std::size_t total_components() const;
};

FrequencyTable stats(const std::vector<SourceRecord>& corpus);

// A coding project file: flat key = value lines, '#' comments.
// `taxonomy` and `document` repeat; `notes` carries the free-text
// description of any custom refinements applied on top of the profile.
struct CorpusManifest {
  std::string name;
  std::string profile;
  std::vector<std::string> taxonomies;
  std::vector<std::string> documents;
  std::string notes;
};

struct ManifestResult {
  std::optional<CorpusManifest> manifest;
  std::string error;

  bool ok() const { return manifest.has_value(); }
};

// Parses and checks manifest text: unknown keys are errors, and a
// profile expression that does not parse fails here rather than at
// first use. Path existence is the caller's concern.
ManifestResult parse_manifest(std::string_view text);

// Versioned JSON interchange ("igkit-1"). Field names mirror the model
// types; implied components are exported with implied=true rather than
// omitted; key order is stable for diffability.
std::string export_corpus(const std::vector<SourceRecord>& records);

struct ImportResult {
  std::vector<SourceRecord> records;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Inverse of export_corpus; structurally lossless for tree, metadata,
// and diagnostics.
ImportResult import_corpus(std::string_view json_text);

}  // namespace igkit
