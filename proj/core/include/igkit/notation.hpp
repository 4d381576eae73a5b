// Inline shorthand reader and writer.
//
// The surface grammar, in one place:
//
//   annotation        (CODE[,MOD...][;ANNOT...])   after the span it codes
//   codes             A B Bdir Bind D I Cac Cex E F M P, dual-coded as D/M
//   modifiers         prop, prop1, prop1,prop1 (chain depth), NOT
//   group ids         CODE(a) inside compound groups
//   inferred content  [bracketed text] immediately before its annotation
//   operators         [AND] [OR] [XOR] [NOT] between statements or spans,
//                     OR ELSE between a statement and its consequence
//   nested statement  { statement } (CODE)
//   compound group    ( member (P(a)) [AND] member (P(b)) ) (P)
//   semantic tags     ;prefix:label or ;prefix=value (polref)
//
// Bracketed operators contain only the reserved uppercase words; any other
// bracketed text is coder-inferred content. A parenthesized span is an
// annotation only when it is annotation-shaped; prose parentheses survive
// as filler. An operator between two bare spans joins components when the
// codes on both sides agree and statements otherwise; parenthesized
// operands are always statement-level.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "igkit/model.hpp"

namespace igkit {

struct ParseResult {
  StatementPtr statement;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

// Parses one statement or statement expression. The two entry points
// accept the same grammar; parse_statement is the conventional name used
// when the caller expects a single (possibly nested) statement.
ParseResult parse_statement(std::string_view text);
ParseResult parse_expression(std::string_view text);

// Canonical shorthand: single spaces, implied components omitted,
// statement operands parenthesized, nested statements braced. Parsing the
// result reproduces the tree; serializing it again is byte-stable.
std::string serialize(const Statement& statement);
std::string serialize(const StatementPtr& statement);

// One coded record of a document. `alternate` holds the paired second
// form of a polymorphic statement when the record carries an ALT line.
struct SourceRecord {
  std::string id;
  std::string raw;
  StatementPtr parsed;
  StatementPtr alternate;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

// Splits a document into records on blank lines. A record may open with
// an `ID: <identifier>` line and may carry one `ALT: <shorthand>` line;
// records without an ID are numbered stmt-1, stmt-2, ... Parse failures
// are recorded per record, never thrown.
std::vector<SourceRecord> parse_document(std::string_view raw);

}  // namespace igkit
