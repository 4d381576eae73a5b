#include "igkit/notation.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <utility>

namespace igkit {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// ---------------------------------------------------------------------------
// Lexing

enum class TokenKind {
  Text,        // one unannotated word
  Annotation,  // (CODE...) shaped parenthetical
  Inferred,    // [text] with non-reserved content
  Operator,    // [AND] [OR] [XOR]
  Not,         // [NOT]
  OrElseTok,   // OR ELSE
  LParen,
  RParen,
  LBrace,
  RBrace,
};

// Content of one (CODE...) annotation.
struct AnnotationInfo {
  std::string code_text;
  std::optional<ComponentCode> code;
  std::optional<ComponentCode> alt;
  std::optional<char> group_id;
  int prop_depth = 0;
  std::vector<int> index_path;
  bool negated = false;
  std::vector<SemanticAnnotation> semantics;
  std::vector<std::string> bad_mods;
  bool empty = false;
};

struct Token {
  TokenKind kind = TokenKind::Text;
  std::string text;
  AnnotationInfo annot;
  LogicalOperator op = LogicalOperator::And;
  Span span;
};

// Splits the ";a;b" tail of an annotation into semantic annotations.
// Both "prefix:label" and "prefix=label" occur in source; the value slot
// is reserved for reference annotations (polref).
void parse_semantics(std::string_view tail, AnnotationInfo& out) {
  std::size_t start = 0;
  while (start <= tail.size()) {
    std::size_t end = tail.find(';', start);
    std::string_view item = trim(tail.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (!item.empty()) {
      SemanticAnnotation sem;
      std::size_t sep = item.find_first_of(":=");
      if (sep == std::string_view::npos) {
        sem.prefix = std::string(item);
      } else {
        sem.prefix = std::string(trim(item.substr(0, sep)));
        std::string_view rest = trim(item.substr(sep + 1));
        if (sem.prefix == "polref") {
          sem.value = std::string(rest);
        } else {
          sem.label = std::string(rest);
        }
      }
      out.semantics.push_back(std::move(sem));
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

// Decides whether a parenthetical is an annotation and extracts its parts.
// Prose parentheses ("(b)", "(e.g., ...)") fail the shape test and stay
// literal. A shape with an unknown code qualifies only when modifiers or
// semantic tags make the intent unambiguous.
bool parse_annotation(std::string_view inner, AnnotationInfo& out) {
  inner = trim(inner);
  if (inner.empty()) {
    out.empty = true;
    return true;
  }
  std::size_t pos = 0;
  const auto read_code = [&]() -> std::string {
    std::size_t begin = pos;
    while (pos < inner.size() && is_alpha(inner[pos])) ++pos;
    return std::string(inner.substr(begin, pos - begin));
  };
  if (!is_alpha(inner[0]) || std::isupper(static_cast<unsigned char>(inner[0])) == 0) return false;
  out.code_text = read_code();
  out.code = code_from_string(out.code_text);
  bool marked = false;
  if (pos < inner.size() && inner[pos] == '/') {
    ++pos;
    std::string alt_text = read_code();
    if (alt_text.empty()) return false;
    out.alt = code_from_string(alt_text);
    if (!out.alt) return false;
    marked = true;
  }
  if (pos + 2 < inner.size() && inner[pos] == '(' && is_alpha(inner[pos + 1]) &&
      std::islower(static_cast<unsigned char>(inner[pos + 1])) && inner[pos + 2] == ')') {
    out.group_id = inner[pos + 1];
    pos += 3;
    marked = true;
  }
  std::size_t semi = inner.find(';', pos);
  std::string_view mods = inner.substr(pos, semi == std::string_view::npos ? std::string_view::npos
                                                                           : semi - pos);
  std::size_t mpos = 0;
  bool unindexed = false;
  while (mpos < mods.size()) {
    if (mods[mpos] != ',') return false;
    ++mpos;
    std::size_t mend = mods.find(',', mpos);
    std::string_view mod = trim(mods.substr(
        mpos, mend == std::string_view::npos ? std::string_view::npos : mend - mpos));
    mpos = mend == std::string_view::npos ? mods.size() : mend;
    marked = true;
    if (mod == "NOT") {
      out.negated = true;
    } else if (mod.substr(0, 4) == "prop") {
      std::string_view digits = mod.substr(4);
      if (digits.empty()) {
        unindexed = true;
        ++out.prop_depth;
      } else if (std::all_of(digits.begin(), digits.end(), is_digit)) {
        out.index_path.push_back(std::stoi(std::string(digits)));
        ++out.prop_depth;
      } else {
        out.bad_mods.push_back(std::string(mod));
      }
    } else if (!mod.empty()) {
      out.bad_mods.push_back(std::string(mod));
    }
  }
  if (unindexed) out.index_path.clear();
  if (semi != std::string_view::npos) {
    marked = true;
    parse_semantics(inner.substr(semi + 1), out);
  }
  return out.code.has_value() || marked;
}

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  std::vector<Token> tokens;
  std::vector<Diagnostic>& diags;

  explicit Lexer(std::string_view text, std::vector<Diagnostic>& d) : src(text), diags(d) {}

  void fail(const std::string& msg, std::size_t at, std::size_t len) {
    Diagnostic d;
    d.severity = Severity::Error;
    d.code = "UnbalancedDelimiter";
    d.message = msg;
    d.span = Span{at, len};
    diags.push_back(std::move(d));
  }

  // Offset of the delimiter closing the one at `open`, or npos.
  std::size_t find_match(std::size_t open, char lhs, char rhs) const {
    int depth = 0;
    for (std::size_t i = open; i < src.size(); ++i) {
      if (src[i] == lhs) ++depth;
      if (src[i] == rhs && --depth == 0) return i;
    }
    return std::string_view::npos;
  }

  void push(TokenKind kind, std::size_t begin, std::size_t end, std::string text = "") {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = Span{begin, end - begin};
    tokens.push_back(std::move(t));
  }

  void lex() {
    while (pos < src.size()) {
      if (is_space(src[pos])) {
        ++pos;
        continue;
      }
      char c = src[pos];
      if (c == '(') {
        std::size_t close = find_match(pos, '(', ')');
        if (close == std::string_view::npos) {
          fail("'(' is never closed", pos, 1);
          ++pos;
          continue;
        }
        AnnotationInfo info;
        if (parse_annotation(src.substr(pos + 1, close - pos - 1), info)) {
          Token t;
          t.kind = TokenKind::Annotation;
          t.annot = std::move(info);
          t.span = Span{pos, close - pos + 1};
          tokens.push_back(std::move(t));
          pos = close + 1;
        } else {
          push(TokenKind::LParen, pos, pos + 1);
          ++pos;
        }
        continue;
      }
      if (c == ')') {
        push(TokenKind::RParen, pos, pos + 1);
        ++pos;
        continue;
      }
      if (c == '{') {
        if (find_match(pos, '{', '}') == std::string_view::npos) {
          fail("'{' is never closed", pos, 1);
          ++pos;
          continue;
        }
        push(TokenKind::LBrace, pos, pos + 1);
        ++pos;
        continue;
      }
      if (c == '}') {
        push(TokenKind::RBrace, pos, pos + 1);
        ++pos;
        continue;
      }
      if (c == '[') {
        std::size_t close = find_match(pos, '[', ']');
        if (close == std::string_view::npos) {
          fail("'[' is never closed", pos, 1);
          ++pos;
          continue;
        }
        std::string_view inner = trim(src.substr(pos + 1, close - pos - 1));
        Token t;
        t.span = Span{pos, close - pos + 1};
        if (inner == "AND" || inner == "OR" || inner == "XOR") {
          t.kind = TokenKind::Operator;
          t.op = inner == "AND"  ? LogicalOperator::And
                 : inner == "OR" ? LogicalOperator::Or
                                 : LogicalOperator::Xor;
        } else if (inner == "NOT") {
          t.kind = TokenKind::Not;
        } else {
          t.kind = TokenKind::Inferred;
          std::string collapsed;
          for (char ic : inner) {
            if (is_space(ic)) {
              if (!collapsed.empty() && collapsed.back() != ' ') collapsed.push_back(' ');
            } else {
              collapsed.push_back(ic);
            }
          }
          t.text = std::move(collapsed);
        }
        tokens.push_back(std::move(t));
        pos = close + 1;
        continue;
      }
      if (c == ']') {
        fail("']' without a matching '['", pos, 1);
        ++pos;
        continue;
      }
      // Bare word. "OR ELSE" is the one two-word reserved form.
      std::size_t begin = pos;
      while (pos < src.size() && !is_space(src[pos]) &&
             src[pos] != '(' && src[pos] != ')' && src[pos] != '{' && src[pos] != '}' &&
             src[pos] != '[' && src[pos] != ']') {
        ++pos;
      }
      std::string word(src.substr(begin, pos - begin));
      if (word == "OR") {
        std::size_t ahead = pos;
        while (ahead < src.size() && is_space(src[ahead])) ++ahead;
        if (src.substr(ahead, 4) == "ELSE" &&
            (ahead + 4 == src.size() || !is_alpha(src[ahead + 4]))) {
          push(TokenKind::OrElseTok, begin, ahead + 4);
          pos = ahead + 4;
          continue;
        }
      }
      push(TokenKind::Text, begin, pos, std::move(word));
    }
  }
};

// ---------------------------------------------------------------------------
// Parsing

Diagnostic make_diag(Severity sev, std::string code, std::string message, Span span) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.message = std::move(message);
  d.span = span;
  return d;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  StatementPtr run() {
    StatementPtr stmt = parse_or_else();
    if (!at_end()) {
      const Token& t = peek();
      if (t.kind == TokenKind::RParen || t.kind == TokenKind::RBrace) {
        error("UnbalancedDelimiter", "closing delimiter without an opening one", t.span);
      } else {
        error("EmptyStatement", "content after the end of the statement was not parsed", t.span);
      }
    }
    return stmt;
  }

 private:
  std::vector<Token> tokens_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const { return tokens_[pos_ + ahead]; }
  bool next_is(TokenKind kind) const { return !at_end() && peek().kind == kind; }
  const Token& advance() { return tokens_[pos_++]; }

  void error(std::string code, std::string message, Span span) {
    diags_.push_back(make_diag(Severity::Error, std::move(code), std::move(message), span));
  }

  // --- statement level -----------------------------------------------------

  StatementPtr parse_or_else() {
    Span at = at_end() ? Span{} : peek().span;
    std::vector<StatementPtr> links;
    StatementPtr first = parse_combination();
    if (next_is(TokenKind::OrElseTok) && !first) {
      error("DanglingOrElse", "OR ELSE without a monitored statement", peek().span);
    }
    if (first) links.push_back(std::move(first));
    while (next_is(TokenKind::OrElseTok)) {
      Span op_span = advance().span;
      StatementPtr next = parse_combination();
      if (!next) {
        error("DanglingOrElse", "OR ELSE without a consequence", op_span);
        break;
      }
      links.push_back(std::move(next));
    }
    if (links.empty()) return nullptr;
    // Chains hang off the consequential side, so fold from the right.
    StatementPtr chain = links.back();
    for (std::size_t i = links.size() - 1; i-- > 0;) {
      chain = make_or_else(links[i], chain);
    }
    (void)at;
    return chain;
  }

  StatementPtr parse_combination() {
    StatementPtr left = parse_unary();
    if (!left) return nullptr;
    if (!next_is(TokenKind::Operator)) return left;
    LogicalOperator op = peek().op;
    std::vector<StatementPtr> operands{std::move(left)};
    while (next_is(TokenKind::Operator)) {
      const Token& op_tok = advance();
      if (op_tok.op != op) {
        // Recover by grouping what is already parsed, as if the coder had
        // parenthesized left to right.
        error("MixedOperatorsWithoutParens",
              "mixed logical operators need parentheses to fix precedence", op_tok.span);
        StatementPtr grouped = make_combination(op, std::move(operands));
        operands = {std::move(grouped)};
        op = op_tok.op;
      }
      StatementPtr right = parse_unary();
      if (!right) {
        error("EmptyStatement", "operator without a right-hand statement", op_tok.span);
        break;
      }
      operands.push_back(std::move(right));
    }
    if (operands.size() == 1) return operands.front();
    return make_combination(op, std::move(operands));
  }

  StatementPtr parse_unary() {
    if (next_is(TokenKind::Not)) {
      Span span = advance().span;
      StatementPtr operand = parse_unary();
      if (!operand) {
        error("EmptyStatement", "[NOT] without a statement", span);
        return nullptr;
      }
      return make_negation(std::move(operand));
    }
    return parse_operand();
  }

  StatementPtr parse_operand() {
    if (next_is(TokenKind::LParen) && !starts_component(pos_)) {
      Span open = advance().span;
      StatementPtr inner = parse_or_else();
      if (next_is(TokenKind::RParen)) {
        advance();
      } else {
        error("UnbalancedDelimiter", "'(' is never closed", open);
      }
      if (!inner) error("EmptyStatement", "nothing between '(' and ')'", open);
      return inner;
    }
    return parse_atomic_run();
  }

  // --- token classification ------------------------------------------------

  // Offset of the RParen matching the LParen at `from` (token indices).
  std::size_t matching_rparen(std::size_t from) const {
    int depth = 0;
    for (std::size_t i = from; i < tokens_.size(); ++i) {
      if (tokens_[i].kind == TokenKind::LParen) ++depth;
      if (tokens_[i].kind == TokenKind::RParen && --depth == 0) return i;
    }
    return tokens_.size();
  }

  std::size_t matching_rbrace(std::size_t from) const {
    int depth = 0;
    for (std::size_t i = from; i < tokens_.size(); ++i) {
      if (tokens_[i].kind == TokenKind::LBrace) ++depth;
      if (tokens_[i].kind == TokenKind::RBrace && --depth == 0) return i;
    }
    return tokens_.size();
  }

  // A '(' starts component content (not a statement operand) when it is a
  // compound group, i.e. its closing ')' is directly followed by a head
  // annotation, or when it only wraps prose.
  bool starts_component(std::size_t at) const {
    std::size_t close = matching_rparen(at);
    if (close + 1 < tokens_.size() && tokens_[close + 1].kind == TokenKind::Annotation &&
        tokens_[close + 1].annot.code && tokens_[close + 1].annot.prop_depth == 0 &&
        !tokens_[close + 1].annot.group_id) {
      return true;
    }
    return is_prose_paren(at, close);
  }

  bool is_prose_paren(std::size_t at, std::size_t close) const {
    for (std::size_t i = at + 1; i < close && i < tokens_.size(); ++i) {
      if (tokens_[i].kind != TokenKind::Text && tokens_[i].kind != TokenKind::Inferred)
        return false;
    }
    return close < tokens_.size();
  }

  // Code of the next component-forming element at or after `at`, for the
  // component-vs-statement operator decision.
  std::optional<ComponentCode> next_element_code(std::size_t at) const {
    std::size_t i = at;
    while (i < tokens_.size()) {
      const Token& t = tokens_[i];
      switch (t.kind) {
        case TokenKind::Text:
        case TokenKind::Inferred:
          ++i;
          continue;
        case TokenKind::Annotation:
          if (!t.annot.code) {
            ++i;
            continue;
          }
          return t.annot.code;
        case TokenKind::LBrace: {
          std::size_t close = matching_rbrace(i);
          if (close + 1 < tokens_.size() &&
              tokens_[close + 1].kind == TokenKind::Annotation) {
            return tokens_[close + 1].annot.code;
          }
          return std::nullopt;
        }
        case TokenKind::LParen: {
          std::size_t close = matching_rparen(i);
          if (close + 1 < tokens_.size() &&
              tokens_[close + 1].kind == TokenKind::Annotation &&
              !tokens_[close + 1].annot.group_id) {
            return tokens_[close + 1].annot.code;
          }
          if (is_prose_paren(i, close)) {
            i = close + 1;
            continue;
          }
          return std::nullopt;
        }
        default:
          return std::nullopt;
      }
    }
    return std::nullopt;
  }

  // --- atomic statements ---------------------------------------------------

  struct PendingProp {
    ComponentCode code = ComponentCode::A;
    PropertyNode node;
    int depth = 1;
  };

  // Inserts `node` into the hierarchy at `depth`, following the index path
  // or, unindexed, the most recently added node of each level.
  static void attach_prop(std::vector<PropertyNode>& roots, PropertyNode node, int depth) {
    std::vector<PropertyNode>* level = &roots;
    for (int d = 1; d < depth; ++d) {
      PropertyNode* parent = nullptr;
      if (!node.index_path.empty()) {
        for (PropertyNode& cand : *level) {
          if (static_cast<int>(cand.index_path.size()) == d &&
              std::equal(cand.index_path.begin(), cand.index_path.end(),
                         node.index_path.begin())) {
            parent = &cand;
          }
        }
      } else {
        for (PropertyNode& cand : *level) {
          if (!cand.nested && cand.group_id == node.group_id) parent = &cand;
        }
      }
      if (!parent) break;
      level = &parent->children;
    }
    level->push_back(std::move(node));
  }

  std::string take_filler(std::string& filler) {
    std::string out = std::move(filler);
    filler.clear();
    return out;
  }

  // `glue` joins without a space, for content that was adjacent in source
  // ("205.239" + "(b)").
  void add_filler(std::string& filler, const std::string& word, bool glue = false) {
    if (!filler.empty() && !glue) filler.push_back(' ');
    filler += word;
  }

  PropertyNode make_prop_node(const AnnotationInfo& info, std::string text, bool before_head) {
    PropertyNode node;
    node.text = std::move(text);
    node.dependence = Dependence::Dependent;
    node.index_path = info.index_path;
    node.group_id = info.group_id;
    node.before_head = before_head;
    node.annotations = info.semantics;
    return node;
  }

  void report_annotation_issues(const AnnotationInfo& info, Span span) {
    for (const std::string& mod : info.bad_mods) {
      error("UnknownModifier", "unknown annotation modifier '" + mod + "'", span);
    }
  }

  StatementPtr parse_atomic_run() {
    std::vector<Component> components;
    std::vector<PendingProp> pending;
    std::string filler;
    std::optional<std::string> inferred;
    std::optional<LogicalOperator> pending_op;
    bool consumed = false;
    std::size_t last_end = std::string_view::npos;

    const auto flush_inferred = [&]() {
      // Bracketed content not followed by an annotation is plain prose.
      if (inferred) {
        add_filler(filler, "[" + *inferred + "]");
        inferred.reset();
      }
    };

    const auto last_component_with = [&components](ComponentCode code) -> Component* {
      for (auto it = components.rbegin(); it != components.rend(); ++it) {
        if (it->code == code) return &*it;
      }
      return nullptr;
    };

    bool pending_explicit = false;
    const auto close_component = [&](Component c) {
      c.sibling_op = pending_op;
      c.op_explicit = pending_explicit;
      pending_op.reset();
      pending_explicit = false;
      components.push_back(std::move(c));
    };

    // Duplicate codes without a written operator alternate implicitly;
    // context components are the exception (multiple conditions stack).
    const auto implicit_op = [&](ComponentCode code) {
      if (pending_op) return;
      if (is_context_code(code)) return;
      if (last_component_with(code)) pending_op = LogicalOperator::And;
    };

    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == TokenKind::RParen || t.kind == TokenKind::RBrace ||
          t.kind == TokenKind::OrElseTok || t.kind == TokenKind::Not) {
        break;
      }
      if (t.kind == TokenKind::Operator) {
        std::optional<ComponentCode> next_code = next_element_code(pos_ + 1);
        std::optional<ComponentCode> last_code;
        if (!components.empty()) last_code = components.back().code;
        if (!next_code || !last_code || *next_code != *last_code) break;
        pending_op = t.op;
        pending_explicit = true;
        advance();
        continue;
      }
      if (t.kind == TokenKind::Text) {
        flush_inferred();
        add_filler(filler, t.text, t.span.offset == last_end);
        last_end = t.span.offset + t.span.length;
        advance();
        consumed = true;
        continue;
      }
      if (t.kind == TokenKind::Inferred) {
        flush_inferred();
        inferred = t.text;
        last_end = t.span.offset + t.span.length;
        advance();
        consumed = true;
        continue;
      }
      if (t.kind == TokenKind::Annotation) {
        const AnnotationInfo& info = t.annot;
        Span span = t.span;
        last_end = span.offset + span.length;
        advance();
        consumed = true;
        if (info.empty) {
          error("EmptyAnnotation", "annotation with no content", span);
          flush_inferred();
          continue;
        }
        if (!info.code) {
          error("UnknownCode", "unknown component code '" + info.code_text + "'", span);
          flush_inferred();
          continue;
        }
        report_annotation_issues(info, span);
        if (info.prop_depth > 0) {
          std::string text;
          if (inferred) {
            text = *inferred;
            inferred.reset();
          } else {
            text = take_filler(filler);
          }
          PropertyNode node = make_prop_node(info, std::move(text), false);
          if (Component* host = last_component_with(*info.code)) {
            attach_prop(host->properties, std::move(node), info.prop_depth);
          } else {
            node.before_head = true;
            pending.push_back(PendingProp{*info.code, std::move(node), info.prop_depth});
          }
          continue;
        }
        Component c;
        c.code = *info.code;
        c.alt_code = info.alt;
        c.negated = info.negated;
        c.annotations = info.semantics;
        if (inferred) {
          c.text = *inferred;
          c.inferred = true;
          inferred.reset();
        } else {
          c.text = take_filler(filler);
        }
        implicit_op(c.code);
        adopt_pending(pending, c);
        close_component(std::move(c));
        continue;
      }
      if (t.kind == TokenKind::LBrace) {
        flush_inferred();
        Span open = t.span;
        advance();
        consumed = true;
        StatementPtr nested = parse_or_else();
        if (next_is(TokenKind::RBrace)) {
          advance();
        } else {
          error("UnbalancedDelimiter", "'{' is never closed", open);
        }
        if (!next_is(TokenKind::Annotation) || !peek().annot.code) {
          error("EmptyAnnotation", "a nested statement needs a component annotation", open);
          continue;
        }
        const AnnotationInfo info = advance().annot;
        report_annotation_issues(info, open);
        if (info.code && is_aim_like(*info.code)) {
          error("InvalidNestingTarget",
                std::string("statements cannot nest inside ") + to_string(*info.code), open);
        }
        if (info.prop_depth > 0) {
          PropertyNode node = make_prop_node(info, take_filler(filler), false);
          node.nested = nested;
          if (Component* host = last_component_with(*info.code)) {
            attach_prop(host->properties, std::move(node), info.prop_depth);
          } else {
            node.before_head = true;
            pending.push_back(PendingProp{*info.code, std::move(node), info.prop_depth});
          }
          continue;
        }
        Component c;
        c.code = *info.code;
        c.alt_code = info.alt;
        c.negated = info.negated;
        c.annotations = info.semantics;
        c.text = take_filler(filler);
        c.nested = nested;
        implicit_op(c.code);
        adopt_pending(pending, c);
        close_component(std::move(c));
        continue;
      }
      if (t.kind == TokenKind::LParen) {
        std::size_t close = matching_rparen(pos_);
        bool group = close + 1 < tokens_.size() &&
                     tokens_[close + 1].kind == TokenKind::Annotation &&
                     tokens_[close + 1].annot.code && tokens_[close + 1].annot.prop_depth == 0 &&
                     !tokens_[close + 1].annot.group_id;
        if (group) {
          flush_inferred();
          consumed = true;
          Component c = parse_compound_group();
          c.text = take_filler(filler);
          implicit_op(c.code);
          adopt_pending(pending, c);
          close_component(std::move(c));
          continue;
        }
        if (is_prose_paren(pos_, close)) {
          flush_inferred();
          consumed = true;
          const bool glue = t.span.offset == last_end;
          if (close < tokens_.size()) {
            last_end = tokens_[close].span.offset + tokens_[close].span.length;
          }
          std::string literal = "(";
          advance();
          while (!next_is(TokenKind::RParen) && !at_end()) {
            const Token& part = advance();
            if (literal.size() > 1) literal.push_back(' ');
            literal += part.kind == TokenKind::Inferred ? "[" + part.text + "]" : part.text;
          }
          if (!at_end()) advance();
          literal.push_back(')');
          add_filler(filler, literal, glue);
          continue;
        }
        break;  // statement grouping; handled a level up
      }
      break;
    }

    flush_inferred();
    for (PendingProp& p : pending) {
      // A property without a head keeps its component as a bare holder.
      Component holder;
      holder.code = p.code;
      attach_prop(holder.properties, std::move(p.node), p.depth);
      components.push_back(std::move(holder));
    }
    if (components.empty()) {
      if (consumed && !filler.empty()) {
        diags_.push_back(make_diag(Severity::Error, "EmptyStatement",
                                   "no coded components in '" + filler + "'", Span{}));
      }
      return nullptr;
    }
    return make_atomic(std::move(components), take_filler(filler));
  }

  static bool is_aim_like(ComponentCode code) {
    return code == ComponentCode::D || code == ComponentCode::I || code == ComponentCode::M ||
           code == ComponentCode::F;
  }

  // Shallow nodes first: a "prop1,prop1" span often precedes its "prop1"
  // parent in source, and the parent must exist before the child attaches.
  void adopt_pending(std::vector<PendingProp>& pending, Component& c) {
    std::vector<PendingProp> matched;
    for (auto it = pending.begin(); it != pending.end();) {
      if (it->code == c.code) {
        matched.push_back(std::move(*it));
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
    std::stable_sort(matched.begin(), matched.end(),
                     [](const PendingProp& a, const PendingProp& b) { return a.depth < b.depth; });
    for (PendingProp& p : matched) {
      attach_prop(c.properties, std::move(p.node), p.depth);
    }
  }

  // `( member [AND] member ... ) (CODE)` — members become independent
  // property nodes; member properties link up through their group ids.
  Component parse_compound_group() {
    advance();  // consume '('
    Component component;
    std::vector<PropertyNode> members;
    std::vector<PendingProp> member_pending;
    std::string filler;
    std::optional<LogicalOperator> op;

    const auto close_member = [&](PropertyNode node) {
      node.dependence = Dependence::Independent;
      node.sibling_op = op;
      op.reset();
      std::vector<PendingProp> matched;
      for (auto it = member_pending.begin(); it != member_pending.end();) {
        if (it->node.group_id == node.group_id) {
          matched.push_back(std::move(*it));
          it = member_pending.erase(it);
        } else {
          ++it;
        }
      }
      std::stable_sort(matched.begin(), matched.end(), [](const PendingProp& a,
                                                          const PendingProp& b) {
        return a.depth < b.depth;
      });
      for (PendingProp& p : matched) {
        attach_prop(node.children, std::move(p.node), p.depth);
      }
      members.push_back(std::move(node));
    };

    while (!at_end() && !next_is(TokenKind::RParen)) {
      const Token& t = peek();
      if (t.kind == TokenKind::Text) {
        if (!filler.empty()) filler.push_back(' ');
        filler += t.text;
        advance();
        continue;
      }
      if (t.kind == TokenKind::Operator) {
        if (!filler.empty()) {
          PropertyNode bare;
          bare.text = take_filler(filler);
          close_member(std::move(bare));
        }
        op = t.op;
        advance();
        continue;
      }
      if (t.kind == TokenKind::Annotation && t.annot.code) {
        AnnotationInfo info = t.annot;
        Span span = t.span;
        advance();
        report_annotation_issues(info, span);
        if (info.prop_depth > 0) {
          PropertyNode node = make_prop_node(info, take_filler(filler), false);
          PropertyNode* host = nullptr;
          for (auto it = members.rbegin(); it != members.rend(); ++it) {
            if (it->group_id == info.group_id) {
              host = &*it;
              break;
            }
          }
          if (host) {
            attach_prop(host->children, std::move(node), info.prop_depth);
          } else {
            node.before_head = true;
            member_pending.push_back(
                PendingProp{info.code.value_or(component.code), std::move(node), info.prop_depth});
          }
          continue;
        }
        PropertyNode member;
        member.text = take_filler(filler);
        member.group_id = info.group_id;
        member.annotations = info.semantics;
        close_member(std::move(member));
        continue;
      }
      if (t.kind == TokenKind::LBrace) {
        // Member whose content is a full statement, e.g. enumerated
        // functions of a constituting-property collection.
        Span open = t.span;
        advance();
        PropertyNode member;
        member.text = take_filler(filler);
        member.nested = parse_or_else();
        if (next_is(TokenKind::RBrace)) {
          advance();
        } else {
          error("UnbalancedDelimiter", "'{' is never closed", open);
        }
        if (next_is(TokenKind::Annotation) && peek().annot.code &&
            peek().annot.prop_depth == 0) {
          AnnotationInfo info = advance().annot;
          report_annotation_issues(info, open);
          member.group_id = info.group_id;
          member.annotations = info.semantics;
        }
        close_member(std::move(member));
        continue;
      }
      // Anything else inside a group is kept as member prose.
      if (!filler.empty()) filler.push_back(' ');
      filler += t.text;
      advance();
    }
    if (!filler.empty()) {
      PropertyNode bare;
      bare.text = take_filler(filler);
      close_member(std::move(bare));
    }
    if (!member_pending.empty() && members.empty()) {
      close_member(PropertyNode{});
    }
    for (PendingProp& p : member_pending) {
      attach_prop(members.back().children, std::move(p.node), p.depth);
    }
    if (!at_end()) advance();  // ')'
    const AnnotationInfo head = advance().annot;  // guaranteed by the caller's lookahead
    component.code = *head.code;
    component.alt_code = head.alt;
    component.negated = head.negated;
    component.annotations = head.semantics;
    component.properties = std::move(members);
    return component;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Entry points

bool ParseResult::ok() const {
  if (!statement) return false;
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

static ParseResult parse_impl(std::string_view text) {
  ParseResult result;
  if (trim(text).empty()) {
    result.diagnostics.push_back(
        make_diag(Severity::Error, "EmptyStatement", "statement text is empty", Span{}));
    return result;
  }
  Lexer lexer(text, result.diagnostics);
  lexer.lex();
  Parser parser(std::move(lexer.tokens), result.diagnostics);
  result.statement = parser.run();
  if (!result.statement && result.diagnostics.empty()) {
    result.diagnostics.push_back(
        make_diag(Severity::Error, "EmptyStatement", "no coded components found", Span{}));
  }
  return result;
}

ParseResult parse_statement(std::string_view text) { return parse_impl(text); }
ParseResult parse_expression(std::string_view text) { return parse_impl(text); }

// ---------------------------------------------------------------------------
// Serialization

namespace {

bool glue_left(std::string_view seg) {
  if (seg.empty()) return true;
  switch (seg.front()) {
    case ',':
    case ';':
    case ':':
    case '.':
    case '!':
    case '?':
      return true;
    default:
      return false;
  }
}

class Writer {
 public:
  void append(std::string_view seg) {
    if (seg.empty()) return;
    if (!out_.empty() && !glue_left(seg)) out_.push_back(' ');
    out_ += seg;
  }

  std::string str() && { return std::move(out_); }

 private:
  std::string out_;
};

std::string prop_suffix(const PropertyNode& node, int depth) {
  std::string out;
  for (int d = 0; d < depth; ++d) {
    out += ",prop";
    if (static_cast<std::size_t>(d) < node.index_path.size()) {
      out += std::to_string(node.index_path[d]);
    }
  }
  return out;
}

std::string semantics_suffix(const std::vector<SemanticAnnotation>& semantics) {
  std::string out;
  for (const SemanticAnnotation& sem : semantics) {
    out.push_back(';');
    out += sem.prefix;
    if (sem.has_value()) {
      out.push_back('=');
      out += sem.value;
    } else if (!sem.label.empty()) {
      out.push_back(':');
      out += sem.label;
    }
  }
  return out;
}

void write_statement(Writer& w, const Statement& s);

void write_nested(Writer& w, const StatementPtr& nested) {
  w.append("{");
  write_statement(w, *nested);
  w.append("}");
}

void write_property(Writer& w, const PropertyNode& node, ComponentCode host, int depth) {
  // Group members are not themselves prop-suffixed, so their own
  // properties restart the chain at depth 1.
  const int child_depth = node.dependence == Dependence::Independent ? 1 : depth + 1;
  if (node.sibling_op) {
    w.append(std::string("[") + to_string(*node.sibling_op) + "]");
  }
  for (const PropertyNode& child : node.children) {
    if (child.before_head) write_property(w, child, host, child_depth);
  }
  if (!node.text.empty()) w.append(node.text);
  if (node.nested) write_nested(w, node.nested);
  std::string annot = "(";
  annot += to_string(host);
  if (node.group_id) {
    annot.push_back('(');
    annot.push_back(*node.group_id);
    annot.push_back(')');
  }
  if (node.dependence == Dependence::Dependent) annot += prop_suffix(node, depth);
  annot += semantics_suffix(node.annotations);
  annot.push_back(')');
  if (node.dependence == Dependence::Independent && !node.group_id && node.annotations.empty()) {
    // Bare group member: no annotation was written in source.
  } else {
    w.append(annot);
  }
  for (const PropertyNode& child : node.children) {
    if (!child.before_head) write_property(w, child, host, child_depth);
  }
}

void write_component(Writer& w, const Component& c) {
  if (c.implied) return;
  if (c.op_explicit && c.sibling_op) {
    w.append(std::string("[") + to_string(*c.sibling_op) + "]");
  }
  const bool compound = std::any_of(c.properties.begin(), c.properties.end(),
                                    [](const PropertyNode& p) {
                                      return p.dependence == Dependence::Independent;
                                    });
  for (const PropertyNode& p : c.properties) {
    if (p.dependence == Dependence::Dependent && p.before_head) {
      write_property(w, p, c.code, 1);
    }
  }
  if (c.inferred) {
    w.append("[" + c.text + "]");
  } else if (!c.text.empty()) {
    w.append(c.text);
  }
  if (c.nested) write_nested(w, c.nested);
  if (compound) {
    w.append("(");
    for (const PropertyNode& p : c.properties) {
      if (p.dependence == Dependence::Independent) write_property(w, p, c.code, 1);
    }
    w.append(")");
  }
  std::string annot = "(";
  annot += to_string(c.code);
  if (c.alt_code) {
    annot.push_back('/');
    annot += to_string(*c.alt_code);
  }
  if (c.negated) annot += ",NOT";
  annot += semantics_suffix(c.annotations);
  annot.push_back(')');
  if (!c.text.empty() || c.nested || compound || !c.properties.empty()) {
    w.append(annot);
  }
  for (const PropertyNode& p : c.properties) {
    if (p.dependence == Dependence::Dependent && !p.before_head) {
      write_property(w, p, c.code, 1);
    }
  }
}

bool is_kind(const Statement& s, bool (*pred)(const Statement&));

void write_statement(Writer& w, const Statement& s) {
  if (const auto* atomic = std::get_if<Atomic>(&s.node)) {
    for (const Component& c : atomic->components) write_component(w, c);
  } else if (const auto* combo = std::get_if<Combination>(&s.node)) {
    bool first = true;
    for (const StatementPtr& operand : combo->operands) {
      if (!first) w.append(std::string("[") + to_string(combo->op) + "]");
      first = false;
      w.append("(");
      write_statement(w, *operand);
      w.append(")");
    }
  } else if (const auto* neg = std::get_if<Negation>(&s.node)) {
    w.append("[NOT]");
    w.append("(");
    write_statement(w, *neg->operand);
    w.append(")");
  } else if (const auto* oe = std::get_if<OrElse>(&s.node)) {
    const bool wrap_monitored = !std::holds_alternative<Atomic>(oe->monitored->node);
    if (wrap_monitored) w.append("(");
    write_statement(w, *oe->monitored);
    if (wrap_monitored) w.append(")");
    w.append("OR ELSE");
    const bool wrap_consequence = std::holds_alternative<Combination>(oe->consequential->node) ||
                                  std::holds_alternative<Negation>(oe->consequential->node);
    if (wrap_consequence) w.append("(");
    write_statement(w, *oe->consequential);
    if (wrap_consequence) w.append(")");
  }
  if (!s.trailing.empty()) w.append(s.trailing);
}

}  // namespace

std::string serialize(const Statement& statement) {
  Writer w;
  write_statement(w, statement);
  return std::move(w).str();
}

std::string serialize(const StatementPtr& statement) {
  return statement ? serialize(*statement) : std::string();
}

// ---------------------------------------------------------------------------
// Documents

bool SourceRecord::ok() const {
  if (!parsed) return false;
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::vector<SourceRecord> parse_document(std::string_view raw) {
  std::vector<SourceRecord> records;
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    std::string_view line = raw.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view trimmed = trim(line);
    if (trimmed.empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else if (trimmed.front() != '#') {  // '#' lines are comments, never record text
      current.emplace_back(trimmed);
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  std::vector<std::string> seen_ids;
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    std::vector<std::string>& lines = blocks[n];
    SourceRecord rec;
    rec.id = "stmt-" + std::to_string(n + 1);
    std::size_t first = 0;
    if (!lines.empty() && lines[0].rfind("ID:", 0) == 0) {
      rec.id = std::string(trim(std::string_view(lines[0]).substr(3)));
      first = 1;
    }
    std::string main_text;
    std::string alt_text;
    bool in_alt = false;
    for (std::size_t i = first; i < lines.size(); ++i) {
      std::string_view line = lines[i];
      if (line.rfind("ALT:", 0) == 0) {
        in_alt = true;
        line = trim(line.substr(4));
      }
      std::string& target = in_alt ? alt_text : main_text;
      if (!target.empty()) target.push_back(' ');
      target += line;
    }
    rec.raw = main_text;
    if (std::find(seen_ids.begin(), seen_ids.end(), rec.id) != seen_ids.end()) {
      rec.diagnostics.push_back(make_diag(Severity::Error, "DuplicateRecordId",
                                          "record id '" + rec.id + "' used twice", Span{}));
    }
    seen_ids.push_back(rec.id);
    ParseResult main_parse = parse_impl(main_text);
    rec.parsed = main_parse.statement;
    rec.diagnostics.insert(rec.diagnostics.end(), main_parse.diagnostics.begin(),
                           main_parse.diagnostics.end());
    if (!alt_text.empty()) {
      ParseResult alt_parse = parse_impl(alt_text);
      rec.alternate = alt_parse.statement;
      rec.diagnostics.insert(rec.diagnostics.end(), alt_parse.diagnostics.begin(),
                             alt_parse.diagnostics.end());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace igkit
