// Data model for institutional statements coded in the Institutional
// Grammar 2.0 inline shorthand.
//
// A statement is a tree: atomic statements hold annotated components,
// combinations join statements with a logical operator, negation wraps a
// single statement, and "or else" links a monitored statement to its
// consequence.  Components may carry property hierarchies, nested
// statements, and semantic annotations.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace igkit {

// Component codes of the two statement families.  Cac/Cex are shared by
// both; B is the underspecified object used when direct/indirect is not
// distinguished.
enum class ComponentCode {
  A,     // Attributes (regulative actor)
  B,     // Object, underspecified
  Bdir,  // Direct object
  Bind,  // Indirect object
  D,     // Deontic
  I,     // Aim
  Cac,   // Activation condition (shared)
  Cex,   // Execution constraint (shared)
  E,     // Constituted entity
  F,     // Constitutive function
  M,     // Modal
  P,     // Constituting properties
};

enum class StatementKind { Regulative, Constitutive, Hybrid, Polymorphic };

enum class LogicalOperator { And, Or, Xor };

// Coding richness levels.  Core captures the base component syntax,
// Extended adds property hierarchies and context refinement, Logico adds
// semantic annotations and references.
enum class Level { Core, Extended, Logico };

// Statement-level governance role within a monitoring arrangement.
enum class Governance { Monitored, Consequential, Monitoring };

enum class ConsequenceType { Existential, NonExistential };

enum class Dependence { Dependent, Independent };

enum class Severity { Error, Warning, Info };

// Byte range into the source text a diagnostic refers to.
struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Span&) const = default;
};

// Diagnostics are values, never exceptions.  `code` is a stable
// identifier (e.g. "UnknownCode", "MissingAttributes"); every diagnostic
// carries a span into the source or the id of the offending statement.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::string statement_id;
  std::optional<Span> span;

  bool operator==(const Diagnostic&) const = default;
};

// A single semantic annotation attached after ';' in an annotation,
// e.g. "ctx:tim" or "polref=Section/16-107.5".  Taxonomy annotations
// carry a label and no value; reference annotations carry a value.
struct SemanticAnnotation {
  std::string prefix;
  std::string label;
  std::string value;

  bool has_value() const { return !value.empty(); }
  bool operator==(const SemanticAnnotation&) const = default;
};

struct Statement;
using StatementPtr = std::shared_ptr<const Statement>;

// Node of an object-property hierarchy under a component.  Group members
// (independent properties inside a compound group) have dependence
// Independent and a group id; their own properties keep the group id.
// index_path mirrors the chained "prop1,prop1" suffix: its length equals
// the node's depth below the attachment root, empty meaning unindexed.
struct PropertyNode {
  std::string text;
  Dependence dependence = Dependence::Dependent;
  std::vector<int> index_path;
  std::optional<char> group_id;
  // Explicit operator joining this node to its previous sibling.
  std::optional<LogicalOperator> sibling_op;
  // True when the span appeared before the owning head text in source.
  bool before_head = false;
  StatementPtr nested;  // nested statement; a node with one has no children
  std::vector<SemanticAnnotation> annotations;
  std::vector<PropertyNode> children;

  bool operator==(const PropertyNode& o) const;
};

// One coded component span.  `text` is the raw span including leading
// filler words ("to organic farming practices").  Implied components are
// synthesized defaults, inferred ones were supplied by the coder in
// square brackets.  Same-code alternatives joined by a component-level
// operator are stored as separate entries; `sibling_op` records the
// operator joining an entry to its predecessor and `op_explicit` whether
// it was written out (an unmarked non-context duplicate defaults to AND).
struct Component {
  ComponentCode code = ComponentCode::A;
  std::optional<ComponentCode> alt_code;  // dual coding, e.g. (D/M)
  std::string text;
  bool implied = false;
  bool inferred = false;
  bool negated = false;  // (D,NOT) / (M,NOT) marker
  std::optional<LogicalOperator> sibling_op;
  bool op_explicit = false;
  std::vector<PropertyNode> properties;
  StatementPtr nested;
  std::vector<SemanticAnnotation> annotations;

  bool operator==(const Component& o) const;
};

struct Atomic {
  std::vector<Component> components;

  bool operator==(const Atomic& o) const = default;
};

// n-ary combination; same-operator chains are flattened (>= 2 operands).
struct Combination {
  LogicalOperator op = LogicalOperator::And;
  std::vector<StatementPtr> operands;

  bool operator==(const Combination& o) const;
};

struct Negation {
  StatementPtr operand;

  bool operator==(const Negation& o) const;
};

// "OR ELSE": consequence attached to a monitored statement.  Chains nest
// on the consequential side.
struct OrElse {
  StatementPtr monitored;
  StatementPtr consequential;

  bool operator==(const OrElse& o) const;
};

struct Statement {
  std::variant<Atomic, Combination, Negation, OrElse> node;
  std::optional<Governance> governance;
  std::optional<ConsequenceType> consequence;
  // Trailing filler after the last annotated span, usually ".".
  std::string trailing;

  bool operator==(const Statement& o) const;
};

// Texts synthesized for missing contexts: every atomic statement holds an
// activation condition and an execution constraint, implied when not coded.
inline constexpr std::string_view kImpliedActivationText = "under all conditions";
inline constexpr std::string_view kImpliedExecutionText = "no constraints";

const char* to_string(ComponentCode code);
const char* to_string(StatementKind kind);
const char* to_string(LogicalOperator op);
const char* to_string(Level level);
const char* to_string(Governance g);
const char* to_string(ConsequenceType c);
const char* to_string(Severity s);
std::optional<ComponentCode> code_from_string(std::string_view text);
std::optional<Level> level_from_string(std::string_view text);

bool is_regulative_code(ComponentCode code);
bool is_constitutive_code(ComponentCode code);
bool is_context_code(ComponentCode code);
// True for codes that may carry a property hierarchy (actors, objects,
// entities, properties and contexts).
bool is_property_host(ComponentCode code);

// Builds an atomic statement, appending implied Cac/Cex when absent.
StatementPtr make_atomic(std::vector<Component> components,
                         std::string trailing = "");
StatementPtr make_combination(LogicalOperator op,
                              std::vector<StatementPtr> operands,
                              std::string trailing = "");
StatementPtr make_negation(StatementPtr operand, std::string trailing = "");
StatementPtr make_or_else(StatementPtr monitored, StatementPtr consequential,
                          std::string trailing = "");

// Classification over the whole tree, nested statements included.  Any
// dual-coded component makes the statement Polymorphic; otherwise both
// families occurring makes it Hybrid.  Shared context components never
// influence the result.
StatementKind classify(const Statement& s);

// True iff the statement is a single Atomic node with no "or else", no
// operator-joined same-code duplicates and no nested statements anywhere.
// Multiple context clauses of the same type do not break atomicity.
bool is_atomic(const Statement& s);

// Clause text with all coding stripped: span texts joined in source
// order, implied components omitted.  Reconstructs the sentence the
// coder annotated, modulo whitespace.
std::string plain_text(const Statement& s);

}  // namespace igkit
