#include "igkit/model.hpp"

#include <algorithm>
#include <array>

namespace igkit {

namespace {

bool ptr_equal(const StatementPtr& a, const StatementPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace

bool PropertyNode::operator==(const PropertyNode& o) const {
  return text == o.text && dependence == o.dependence &&
         index_path == o.index_path && group_id == o.group_id &&
         sibling_op == o.sibling_op && before_head == o.before_head &&
         ptr_equal(nested, o.nested) && annotations == o.annotations &&
         children == o.children;
}

bool Component::operator==(const Component& o) const {
  return code == o.code && alt_code == o.alt_code && text == o.text &&
         implied == o.implied && inferred == o.inferred &&
         negated == o.negated && sibling_op == o.sibling_op &&
         op_explicit == o.op_explicit && properties == o.properties &&
         ptr_equal(nested, o.nested) && annotations == o.annotations;
}

bool Combination::operator==(const Combination& o) const {
  if (op != o.op || operands.size() != o.operands.size()) return false;
  for (std::size_t i = 0; i < operands.size(); ++i)
    if (!ptr_equal(operands[i], o.operands[i])) return false;
  return true;
}

bool Negation::operator==(const Negation& o) const {
  return ptr_equal(operand, o.operand);
}

bool OrElse::operator==(const OrElse& o) const {
  return ptr_equal(monitored, o.monitored) &&
         ptr_equal(consequential, o.consequential);
}

bool Statement::operator==(const Statement& o) const {
  return node == o.node && governance == o.governance &&
         consequence == o.consequence && trailing == o.trailing;
}

const char* to_string(ComponentCode code) {
  switch (code) {
    case ComponentCode::A: return "A";
    case ComponentCode::B: return "B";
    case ComponentCode::Bdir: return "Bdir";
    case ComponentCode::Bind: return "Bind";
    case ComponentCode::D: return "D";
    case ComponentCode::I: return "I";
    case ComponentCode::Cac: return "Cac";
    case ComponentCode::Cex: return "Cex";
    case ComponentCode::E: return "E";
    case ComponentCode::F: return "F";
    case ComponentCode::M: return "M";
    case ComponentCode::P: return "P";
  }
  return "?";
}

const char* to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::Regulative: return "regulative";
    case StatementKind::Constitutive: return "constitutive";
    case StatementKind::Hybrid: return "hybrid";
    case StatementKind::Polymorphic: return "polymorphic";
  }
  return "?";
}

const char* to_string(LogicalOperator op) {
  switch (op) {
    case LogicalOperator::And: return "AND";
    case LogicalOperator::Or: return "OR";
    case LogicalOperator::Xor: return "XOR";
  }
  return "?";
}

const char* to_string(Level level) {
  switch (level) {
    case Level::Core: return "Core";
    case Level::Extended: return "Extended";
    case Level::Logico: return "Logico";
  }
  return "?";
}

const char* to_string(Governance g) {
  switch (g) {
    case Governance::Monitored: return "monitored";
    case Governance::Consequential: return "consequential";
    case Governance::Monitoring: return "monitoring";
  }
  return "?";
}

const char* to_string(ConsequenceType c) {
  switch (c) {
    case ConsequenceType::Existential: return "existential";
    case ConsequenceType::NonExistential: return "non-existential";
  }
  return "?";
}

const char* to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "?";
}

std::optional<ComponentCode> code_from_string(std::string_view text) {
  static constexpr std::array<ComponentCode, 12> kCodes = {
      ComponentCode::A,   ComponentCode::B,    ComponentCode::Bdir,
      ComponentCode::Bind, ComponentCode::D,   ComponentCode::I,
      ComponentCode::Cac, ComponentCode::Cex,  ComponentCode::E,
      ComponentCode::F,   ComponentCode::M,    ComponentCode::P};
  for (ComponentCode c : kCodes)
    if (text == to_string(c)) return c;
  return std::nullopt;
}

std::optional<Level> level_from_string(std::string_view text) {
  if (text == "Core" || text == "core") return Level::Core;
  if (text == "Extended" || text == "extended") return Level::Extended;
  if (text == "Logico" || text == "logico") return Level::Logico;
  return std::nullopt;
}

bool is_regulative_code(ComponentCode code) {
  switch (code) {
    case ComponentCode::A:
    case ComponentCode::B:
    case ComponentCode::Bdir:
    case ComponentCode::Bind:
    case ComponentCode::D:
    case ComponentCode::I:
      return true;
    default:
      return false;
  }
}

bool is_constitutive_code(ComponentCode code) {
  switch (code) {
    case ComponentCode::E:
    case ComponentCode::F:
    case ComponentCode::M:
    case ComponentCode::P:
      return true;
    default:
      return false;
  }
}

bool is_context_code(ComponentCode code) {
  return code == ComponentCode::Cac || code == ComponentCode::Cex;
}

bool is_property_host(ComponentCode code) {
  switch (code) {
    case ComponentCode::A:
    case ComponentCode::B:
    case ComponentCode::Bdir:
    case ComponentCode::Bind:
    case ComponentCode::E:
    case ComponentCode::P:
    case ComponentCode::Cac:
    case ComponentCode::Cex:
      return true;
    default:
      return false;
  }
}

StatementPtr make_atomic(std::vector<Component> components,
                         std::string trailing) {
  auto has = [&](ComponentCode code) {
    return std::any_of(components.begin(), components.end(),
                       [&](const Component& c) { return c.code == code; });
  };
  if (!has(ComponentCode::Cac)) {
    Component cac;
    cac.code = ComponentCode::Cac;
    cac.text = std::string(kImpliedActivationText);
    cac.implied = true;
    components.push_back(std::move(cac));
  }
  if (!has(ComponentCode::Cex)) {
    Component cex;
    cex.code = ComponentCode::Cex;
    cex.text = std::string(kImpliedExecutionText);
    cex.implied = true;
    components.push_back(std::move(cex));
  }
  auto s = std::make_shared<Statement>();
  s->node = Atomic{std::move(components)};
  s->trailing = std::move(trailing);
  return s;
}

StatementPtr make_combination(LogicalOperator op,
                              std::vector<StatementPtr> operands,
                              std::string trailing) {
  auto s = std::make_shared<Statement>();
  s->node = Combination{op, std::move(operands)};
  s->trailing = std::move(trailing);
  return s;
}

StatementPtr make_negation(StatementPtr operand, std::string trailing) {
  auto s = std::make_shared<Statement>();
  s->node = Negation{std::move(operand)};
  s->trailing = std::move(trailing);
  return s;
}

StatementPtr make_or_else(StatementPtr monitored, StatementPtr consequential,
                          std::string trailing) {
  auto s = std::make_shared<Statement>();
  s->node = OrElse{std::move(monitored), std::move(consequential)};
  s->trailing = std::move(trailing);
  return s;
}

namespace {

struct FamilyScan {
  bool regulative = false;
  bool constitutive = false;
  bool polymorphic = false;
};

void scan_code(ComponentCode code, FamilyScan& scan) {
  if (is_regulative_code(code)) scan.regulative = true;
  if (is_constitutive_code(code)) scan.constitutive = true;
}

void scan_statement(const Statement& s, FamilyScan& scan);

// Statements nested inside components classify on their own; only the
// host's component skeleton determines the family.
void scan_component(const Component& c, FamilyScan& scan) {
  scan_code(c.code, scan);
  if (c.alt_code) {
    scan.polymorphic = true;
    scan_code(*c.alt_code, scan);
  }
}

void scan_statement(const Statement& s, FamilyScan& scan) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Atomic>) {
          for (const auto& c : node.components) scan_component(c, scan);
        } else if constexpr (std::is_same_v<T, Combination>) {
          for (const auto& op : node.operands)
            if (op) scan_statement(*op, scan);
        } else if constexpr (std::is_same_v<T, Negation>) {
          if (node.operand) scan_statement(*node.operand, scan);
        } else {
          if (node.monitored) scan_statement(*node.monitored, scan);
          if (node.consequential) scan_statement(*node.consequential, scan);
        }
      },
      s.node);
}

}  // namespace

StatementKind classify(const Statement& s) {
  FamilyScan scan;
  scan_statement(s, scan);
  if (scan.polymorphic) return StatementKind::Polymorphic;
  if (scan.regulative && scan.constitutive) return StatementKind::Hybrid;
  if (scan.constitutive) return StatementKind::Constitutive;
  return StatementKind::Regulative;
}

namespace {

bool property_tree_has_nested(const PropertyNode& p) {
  if (p.nested) return true;
  return std::any_of(p.children.begin(), p.children.end(),
                     property_tree_has_nested);
}

}  // namespace

bool is_atomic(const Statement& s) {
  const auto* atomic = std::get_if<Atomic>(&s.node);
  if (!atomic) return false;
  for (const auto& c : atomic->components) {
    if (c.nested) return false;
    for (const auto& p : c.properties)
      if (property_tree_has_nested(p)) return false;
  }
  // Same-code duplicates are combinations, except co-occurring context
  // clauses without an explicit operator.
  for (std::size_t i = 0; i < atomic->components.size(); ++i) {
    const auto& a = atomic->components[i];
    for (std::size_t j = i + 1; j < atomic->components.size(); ++j) {
      const auto& b = atomic->components[j];
      if (a.code != b.code) continue;
      if (!is_context_code(a.code)) return false;
      if (a.op_explicit || b.op_explicit) return false;
    }
  }
  return true;
}

namespace {

// Joins segments with single spaces, gluing punctuation-led segments
// directly to their predecessor.
void append_segment(std::string& out, std::string_view segment) {
  if (segment.empty()) return;
  if (!out.empty()) {
    char first = segment.front();
    bool punct = first == ',' || first == ';' || first == ':' ||
                 first == '.' || first == '!' || first == '?' ||
                 first == ')';
    if (!punct) out.push_back(' ');
  }
  out.append(segment);
}

const char* plain_operator_word(LogicalOperator op) {
  switch (op) {
    case LogicalOperator::And: return "and";
    case LogicalOperator::Or: return "and/or";
    case LogicalOperator::Xor: return "or";
  }
  return "and";
}

void plain_statement(const Statement& s, std::string& out);

void plain_property(const PropertyNode& p, std::string& out) {
  if (p.sibling_op) append_segment(out, plain_operator_word(*p.sibling_op));
  for (const auto& child : p.children)
    if (child.before_head) plain_property(child, out);
  append_segment(out, p.text);
  if (p.nested) plain_statement(*p.nested, out);
  for (const auto& child : p.children)
    if (!child.before_head) plain_property(child, out);
}

void plain_component(const Component& c, std::string& out) {
  if (c.implied) return;
  if (c.sibling_op) append_segment(out, plain_operator_word(*c.sibling_op));
  for (const auto& p : c.properties)
    if (p.before_head) plain_property(p, out);
  append_segment(out, c.text);
  if (c.nested) plain_statement(*c.nested, out);
  for (const auto& p : c.properties)
    if (!p.before_head) plain_property(p, out);
}

void plain_statement(const Statement& s, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Atomic>) {
          for (const auto& c : node.components) plain_component(c, out);
        } else if constexpr (std::is_same_v<T, Combination>) {
          for (std::size_t i = 0; i < node.operands.size(); ++i) {
            if (i > 0) append_segment(out, plain_operator_word(node.op));
            if (node.operands[i]) plain_statement(*node.operands[i], out);
          }
        } else if constexpr (std::is_same_v<T, Negation>) {
          append_segment(out, "not");
          if (node.operand) plain_statement(*node.operand, out);
        } else {
          if (node.monitored) plain_statement(*node.monitored, out);
          append_segment(out, "or else");
          if (node.consequential) plain_statement(*node.consequential, out);
        }
      },
      s.node);
  append_segment(out, s.trailing);
}

}  // namespace

std::string plain_text(const Statement& s) {
  std::string out;
  plain_statement(s, out);
  return out;
}

}  // namespace igkit
