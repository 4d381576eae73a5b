#include "igkit/transform.hpp"

#include <algorithm>
#include <cctype>

namespace igkit {

namespace {

Diagnostic make_diag(Severity sev, std::string code, std::string message) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.message = std::move(message);
  return d;
}

// Copy of `s` with a new node, keeping trailing text and metadata.
StatementPtr rebuild(const Statement& s, std::variant<Atomic, Combination, Negation, OrElse> node) {
  auto out = std::make_shared<Statement>(s);
  out->node = std::move(node);
  return out;
}

bool glue_word(std::string_view word) {
  if (word.empty()) return true;
  switch (word.front()) {
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

void join(std::string& out, std::string_view part) {
  if (part.empty()) return;
  if (!out.empty() && !glue_word(part)) out.push_back(' ');
  out += part;
}

const char* operator_word(LogicalOperator op) {
  switch (op) {
    case LogicalOperator::And:
      return "and";
    case LogicalOperator::Or:
      return "and/or";
    case LogicalOperator::Xor:
      return "or";
  }
  return "and";
}

// ---------------------------------------------------------------------------
// decompose_combinations

// A slot is a maximal run of same-code components linked by sibling
// operators; its alternatives multiply out during decomposition.
struct Slot {
  std::vector<const Component*> alts;
  std::optional<LogicalOperator> op;
  bool mixed = false;
};

std::vector<Slot> make_slots(const std::vector<Component>& components) {
  std::vector<Slot> slots;
  for (const Component& c : components) {
    if (c.sibling_op && !slots.empty() && slots.back().alts.back()->code == c.code) {
      Slot& slot = slots.back();
      if (slot.op && *slot.op != *c.sibling_op) slot.mixed = true;
      if (!slot.op) slot.op = c.sibling_op;
      slot.alts.push_back(&c);
    } else {
      Slot slot;
      slot.alts.push_back(&c);
      slots.push_back(std::move(slot));
    }
  }
  return slots;
}

StatementPtr build_leaves(const Statement& src, const std::vector<Slot>& slots,
                          std::vector<std::size_t>& choice, std::size_t from) {
  std::size_t next = slots.size();
  for (std::size_t i = from; i < slots.size(); ++i) {
    if (slots[i].alts.size() > 1) {
      next = i;
      break;
    }
  }
  if (next == slots.size()) {
    std::vector<Component> components;
    components.reserve(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      Component c = *slots[i].alts[slots[i].alts.size() > 1 ? choice[i] : 0];
      c.sibling_op.reset();
      c.op_explicit = false;
      components.push_back(std::move(c));
    }
    auto leaf = std::make_shared<Statement>(src);
    leaf->node = Atomic{std::move(components)};
    return leaf;
  }
  std::vector<StatementPtr> operands;
  operands.reserve(slots[next].alts.size());
  for (std::size_t a = 0; a < slots[next].alts.size(); ++a) {
    choice[next] = a;
    operands.push_back(build_leaves(src, slots, choice, next + 1));
  }
  auto combo = std::make_shared<Statement>();
  combo->node = Combination{*slots[next].op, std::move(operands)};
  return combo;
}

StatementPtr decompose_node(const StatementPtr& s, std::vector<Diagnostic>& diags) {
  if (!s) return s;
  if (const auto* atomic = std::get_if<Atomic>(&s->node)) {
    std::vector<Slot> slots = make_slots(atomic->components);
    bool multi = false;
    for (const Slot& slot : slots) {
      if (slot.mixed) {
        diags.push_back(make_diag(
            Severity::Error, "MixedOperatorsWithoutGrouping",
            std::string("alternatives of ") + to_string(slot.alts.front()->code) +
                " mix different operators; decomposition order is ambiguous"));
        return s;
      }
      if (slot.alts.size() > 1) multi = true;
    }
    if (!multi) return s;
    std::vector<std::size_t> choice(slots.size(), 0);
    return build_leaves(*s, slots, choice, 0);
  }
  if (const auto* combo = std::get_if<Combination>(&s->node)) {
    std::vector<StatementPtr> operands;
    bool changed = false;
    for (const StatementPtr& operand : combo->operands) {
      StatementPtr out = decompose_node(operand, diags);
      changed = changed || out != operand;
      operands.push_back(std::move(out));
    }
    if (!changed) return s;
    return rebuild(*s, Combination{combo->op, std::move(operands)});
  }
  if (const auto* neg = std::get_if<Negation>(&s->node)) {
    StatementPtr operand = decompose_node(neg->operand, diags);
    if (operand == neg->operand) return s;
    return rebuild(*s, Negation{std::move(operand)});
  }
  const auto& oe = std::get<OrElse>(s->node);
  StatementPtr monitored = decompose_node(oe.monitored, diags);
  StatementPtr consequential = decompose_node(oe.consequential, diags);
  if (monitored == oe.monitored && consequential == oe.consequential) return s;
  return rebuild(*s, OrElse{std::move(monitored), std::move(consequential)});
}

// ---------------------------------------------------------------------------
// project

std::vector<SemanticAnnotation> context_only(const std::vector<SemanticAnnotation>& in) {
  std::vector<SemanticAnnotation> out;
  std::copy_if(in.begin(), in.end(), std::back_inserter(out),
               [](const SemanticAnnotation& a) { return a.prefix == "ctx"; });
  return out;
}

void strip_semantics(PropertyNode& node, Level target);

void strip_semantics(Component& c, Level target) {
  c.annotations = context_only(c.annotations);
  for (PropertyNode& p : c.properties) strip_semantics(p, target);
  if (c.nested) c.nested = project(c.nested, target);
}

void strip_semantics(PropertyNode& node, Level target) {
  node.annotations = context_only(node.annotations);
  for (PropertyNode& child : node.children) strip_semantics(child, target);
  if (node.nested) node.nested = project(node.nested, target);
}

// Source-order clause text of a property subtree, codes stripped.
std::string property_text(const PropertyNode& node) {
  std::string out;
  if (node.sibling_op) join(out, operator_word(*node.sibling_op));
  for (const PropertyNode& child : node.children) {
    if (child.before_head) join(out, property_text(child));
  }
  join(out, node.text);
  if (node.nested) join(out, plain_text(*node.nested));
  for (const PropertyNode& child : node.children) {
    if (!child.before_head) join(out, property_text(child));
  }
  return out;
}

Component collapse_component(const Component& src) {
  Component c = src;
  c.annotations.clear();
  std::string text;
  for (const PropertyNode& p : c.properties) {
    if (p.dependence == Dependence::Dependent && p.before_head) join(text, property_text(p));
  }
  join(text, c.text);
  if (c.nested) {
    join(text, plain_text(*c.nested));
    c.nested = nullptr;
  }
  for (const PropertyNode& p : c.properties) {
    if (p.dependence == Dependence::Independent) join(text, property_text(p));
  }
  for (const PropertyNode& p : c.properties) {
    if (p.dependence == Dependence::Dependent && !p.before_head) join(text, property_text(p));
  }
  c.properties.clear();
  if (text != c.text) c.inferred = false;
  c.text = std::move(text);
  return c;
}

StatementPtr project_node(const StatementPtr& s, Level target) {
  if (const auto* atomic = std::get_if<Atomic>(&s->node)) {
    std::vector<Component> components;
    components.reserve(atomic->components.size());
    for (const Component& src : atomic->components) {
      Component c = src;
      strip_semantics(c, target);
      if (target == Level::Core) c = collapse_component(c);
      // Written alternative runs fold into the preceding component's text at
      // Core; the operator survives only as a plain connective word.
      if (target == Level::Core && c.op_explicit && !components.empty() &&
          components.back().code == c.code && c.sibling_op) {
        Component& host = components.back();
        join(host.text, operator_word(*c.sibling_op));
        join(host.text, c.text);
        if (host.alt_code != c.alt_code) host.alt_code.reset();
        host.negated = host.negated && c.negated;
        host.inferred = false;
        continue;
      }
      components.push_back(std::move(c));
    }
    return rebuild(*s, Atomic{std::move(components)});
  }
  if (const auto* combo = std::get_if<Combination>(&s->node)) {
    std::vector<StatementPtr> operands;
    for (const StatementPtr& operand : combo->operands) {
      operands.push_back(project_node(operand, target));
    }
    return rebuild(*s, Combination{combo->op, std::move(operands)});
  }
  if (const auto* neg = std::get_if<Negation>(&s->node)) {
    return rebuild(*s, Negation{project_node(neg->operand, target)});
  }
  const auto& oe = std::get<OrElse>(s->node);
  return rebuild(*s, OrElse{project_node(oe.monitored, target),
                            project_node(oe.consequential, target)});
}

// ---------------------------------------------------------------------------
// normalize_negation

bool ends_with_not(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.size() < 3) return false;
  std::string_view tail = text.substr(text.size() - 3);
  char n = static_cast<char>(std::tolower(static_cast<unsigned char>(tail[0])));
  char o = static_cast<char>(std::tolower(static_cast<unsigned char>(tail[1])));
  char t = static_cast<char>(std::tolower(static_cast<unsigned char>(tail[2])));
  if (n != 'n' || o != 'o' || t != 't') return false;
  return text.size() == 3 || std::isspace(static_cast<unsigned char>(text[text.size() - 4]));
}

std::string strip_not(std::string text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  text.resize(text.size() - 3);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  return text;
}

bool modal_like(ComponentCode code) {
  return code == ComponentCode::D || code == ComponentCode::M;
}

// Clears the negation carried by the first negated deontic/modal, in the
// flag or in the text; false when there is none.
bool clear_leaf_negation(std::vector<Component>& components) {
  for (Component& c : components) {
    if (!modal_like(c.code)) continue;
    if (c.negated) {
      c.negated = false;
      // The marker usually doubles the textual "not"; both carry the
      // same negation, so both go.
      if (ends_with_not(c.text)) c.text = strip_not(c.text);
      return true;
    }
    if (ends_with_not(c.text)) {
      c.text = strip_not(c.text);
      return true;
    }
  }
  return false;
}

StatementPtr hoist_node(const StatementPtr& s) {
  if (const auto* atomic = std::get_if<Atomic>(&s->node)) {
    std::vector<Component> components = atomic->components;
    if (!clear_leaf_negation(components)) return s;
    StatementPtr leaf = rebuild(*s, Atomic{std::move(components)});
    return make_negation(std::move(leaf));
  }
  if (const auto* combo = std::get_if<Combination>(&s->node)) {
    std::vector<StatementPtr> operands;
    bool changed = false;
    for (const StatementPtr& operand : combo->operands) {
      StatementPtr out = hoist_node(operand);
      changed = changed || out != operand;
      operands.push_back(std::move(out));
    }
    if (!changed) return s;
    return rebuild(*s, Combination{combo->op, std::move(operands)});
  }
  if (const auto* neg = std::get_if<Negation>(&s->node)) {
    StatementPtr operand = hoist_node(neg->operand);
    if (operand == neg->operand) return s;
    return rebuild(*s, Negation{std::move(operand)});
  }
  const auto& oe = std::get<OrElse>(s->node);
  StatementPtr monitored = hoist_node(oe.monitored);
  StatementPtr consequential = hoist_node(oe.consequential);
  if (monitored == oe.monitored && consequential == oe.consequential) return s;
  return rebuild(*s, OrElse{std::move(monitored), std::move(consequential)});
}

// Textual "must not" becomes the NOT marker so both written forms push
// to the same tree.
StatementPtr mark_leaf(const StatementPtr& s) {
  const auto* atomic = std::get_if<Atomic>(&s->node);
  if (!atomic) return s;
  std::vector<Component> components = atomic->components;
  bool changed = false;
  for (Component& c : components) {
    if (modal_like(c.code) && !c.negated && ends_with_not(c.text)) {
      c.text = strip_not(c.text);
      c.negated = true;
      changed = true;
      break;
    }
  }
  if (!changed) return s;
  return rebuild(*s, Atomic{std::move(components)});
}

StatementPtr push_node(const StatementPtr& s, std::vector<Diagnostic>& diags) {
  if (std::holds_alternative<Atomic>(s->node)) {
    return mark_leaf(s);
  }
  if (const auto* combo = std::get_if<Combination>(&s->node)) {
    std::vector<StatementPtr> operands;
    bool changed = false;
    for (const StatementPtr& operand : combo->operands) {
      StatementPtr out = push_node(operand, diags);
      changed = changed || out != operand;
      operands.push_back(std::move(out));
    }
    if (!changed) return s;
    return rebuild(*s, Combination{combo->op, std::move(operands)});
  }
  if (const auto* neg = std::get_if<Negation>(&s->node)) {
    StatementPtr operand = push_node(neg->operand, diags);
    if (const auto* atomic = std::get_if<Atomic>(&operand->node)) {
      std::vector<Component> components = atomic->components;
      Component* target = nullptr;
      for (Component& c : components) {
        if (modal_like(c.code)) {
          target = &c;
          break;
        }
      }
      if (!target) {
        diags.push_back(make_diag(Severity::Error, "NoModalToNegate",
                                  "cannot push negation into a statement without a "
                                  "deontic or modal"));
      } else if (!target->negated) {
        target->negated = true;
        auto leaf = std::make_shared<Statement>(*operand);
        leaf->node = Atomic{std::move(components)};
        return leaf;
      }
    }
    if (operand == neg->operand) return s;
    return rebuild(*s, Negation{std::move(operand)});
  }
  const auto& oe = std::get<OrElse>(s->node);
  StatementPtr monitored = push_node(oe.monitored, diags);
  StatementPtr consequential = push_node(oe.consequential, diags);
  if (monitored == oe.monitored && consequential == oe.consequential) return s;
  return rebuild(*s, OrElse{std::move(monitored), std::move(consequential)});
}

}  // namespace

bool TransformResult::ok() const {
  if (!statement) return false;
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

TransformResult decompose_combinations(const StatementPtr& statement) {
  TransformResult result;
  if (!statement) return result;
  result.statement = decompose_node(statement, result.diagnostics);
  return result;
}

StatementPtr project(const StatementPtr& statement, Level target) {
  if (!statement || target == Level::Logico) return statement;
  return project_node(statement, target);
}

std::vector<MonitoredPair> flatten_vertical(const StatementPtr& statement) {
  std::vector<MonitoredPair> pairs;
  if (!statement) return pairs;

  struct Walker {
    std::vector<MonitoredPair>& out;

    void visit_props(const std::vector<PropertyNode>& nodes, int depth) {
      for (const PropertyNode& p : nodes) {
        if (p.nested) visit(p.nested, depth);
        visit_props(p.children, depth);
      }
    }

    void visit(const StatementPtr& s, int depth) {
      if (const auto* atomic = std::get_if<Atomic>(&s->node)) {
        for (const Component& c : atomic->components) {
          if (c.nested) visit(c.nested, depth);
          visit_props(c.properties, depth);
        }
        return;
      }
      if (const auto* combo = std::get_if<Combination>(&s->node)) {
        for (const StatementPtr& operand : combo->operands) visit(operand, depth);
        return;
      }
      if (const auto* neg = std::get_if<Negation>(&s->node)) {
        visit(neg->operand, depth);
        return;
      }
      const auto& oe = std::get<OrElse>(s->node);
      out.push_back(MonitoredPair{oe.monitored, oe.consequential, depth + 1});
      visit(oe.monitored, depth + 1);
      visit(oe.consequential, depth + 1);
    }
  };

  Walker walker{pairs};
  walker.visit(statement, 0);
  return pairs;
}

TransformResult normalize_negation(const StatementPtr& statement, NegationMode mode) {
  TransformResult result;
  if (!statement) return result;
  if (mode == NegationMode::Hoist) {
    result.statement = hoist_node(statement);
  } else {
    result.statement = push_node(statement, result.diagnostics);
  }
  return result;
}

}  // namespace igkit
