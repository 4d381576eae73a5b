// Structural transformations: decomposition into atomic statements,
// level projection, vertical flattening, and negation normalization.
// All functions are pure; input trees are never mutated.
#pragma once

#include <vector>

#include "igkit/model.hpp"

namespace igkit {

struct TransformResult {
  StatementPtr statement;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

// Expands operator-joined component alternatives distributively into a
// combination of atomic statements. Alternatives of the same code joined
// by an explicit operator (or the implied AND between unmarked
// duplicates) multiply out; shared components are replicated into every
// leaf, which inherits the trailing text. Expansion follows source
// order: the first multi-valued component becomes the outermost
// operator. "Or else" nodes stay where they are; their sides are
// decomposed independently. Alternatives of one component joined by
// different operators raise MixedOperatorsWithoutGrouping.
TransformResult decompose_combinations(const StatementPtr& statement);

// Collapses a statement down to the target coding level; projecting at
// or above the statement's own richness is the identity.
//   Logico -> Extended  drops semantic annotations (references, animacy,
//                       roles, functions); context taxonomy tags stay.
//   Extended -> Core    merges property hierarchies back into component
//                       text at their source positions, dissolves
//                       component-level nested statements into plain
//                       clause text, and drops context tags.
// The statement-level skeleton and the classification never change.
StatementPtr project(const StatementPtr& statement, Level target);

// One "or else" relation. depth is 1 for a top-level pair and one more
// than the enclosing pair's depth for nested ones.
struct MonitoredPair {
  StatementPtr monitored;
  StatementPtr consequential;
  int depth = 1;
};

// All monitored/consequential pairs of the tree in document order,
// nested component statements included.
std::vector<MonitoredPair> flatten_vertical(const StatementPtr& statement);

enum class NegationMode { Hoist, Push };

// Normalizes where negation lives. Hoist moves leaf-level negation (a
// NOT-marked deontic/modal, or one whose text ends in "not") up into a
// statement-level Negation wrapper; push moves Negation wrappers down
// onto the deontic/modal as a NOT marker. Both modes are idempotent and
// mutually inverse on each other's outputs. Pushing into a statement
// with no deontic or modal raises NoModalToNegate.
TransformResult normalize_negation(const StatementPtr& statement, NegationMode mode);

}  // namespace igkit
