#include "igkit/corpus.hpp"

#include <cctype>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "igkit/profile.hpp"
#include "igkit/transform.hpp"
#include "json.hpp"

namespace igkit {

namespace {

using ojson = nlohmann::ordered_json;

// Placeholder an enumeration marker leaves behind so the sentence
// splitter can still see that a colon introduced a list item.
constexpr char kMarker = '\x01';

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_enum_token(std::string_view t) {
  if (t.empty() || t.size() > 6) return false;
  bool digits = true;
  for (char c : t)
    if (c < '0' || c > '9') digits = false;
  if (digits) return t.size() <= 3;
  if (t.size() == 1) return t[0] >= 'a' && t[0] <= 'z';
  for (char c : t)
    if (std::strchr("ivxlcdm", c) == nullptr) return false;
  return true;
}

// Length of an enumeration marker at `pos`, 0 when there is none.
// Bullets and paren markers must be followed by whitespace (or another
// marker) so constructs like "-5" or "205.239(b)" survive.
std::size_t marker_len(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  if (s[pos] == '(') {
    auto close = s.find_first_of("()", pos + 1);
    if (close == std::string_view::npos || s[close] != ')') return 0;
    if (!is_enum_token(s.substr(pos + 1, close - pos - 1))) return 0;
    if (close + 1 < s.size() && !is_space(s[close + 1]) && s[close + 1] != '(') return 0;
    return close - pos + 1;
  }
  static constexpr std::string_view kBullets[] = {"-", "*", "\xE2\x80\xA2", "\xC2\xB7"};
  for (std::string_view b : kBullets) {
    if (s.compare(pos, b.size(), b) != 0) continue;
    std::size_t after = pos + b.size();
    if (after < s.size() && !is_space(s[after])) return 0;
    return b.size();
  }
  return 0;
}

// Replaces markers that open a line with kMarker. Markers appearing
// after a sentence terminator mid-line are handled per segment later.
std::string blank_line_markers(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t line_end = raw.find('\n', i);
    if (line_end == std::string_view::npos) line_end = raw.size();
    std::string_view line = raw.substr(i, line_end - i);
    std::size_t p = 0;
    while (p < line.size()) {
      if (is_space(line[p])) {
        out += line[p];
        ++p;
        continue;
      }
      std::size_t len = marker_len(line, p);
      if (len == 0) break;
      out += kMarker;
      p += len;
    }
    out += line.substr(p);
    if (line_end < raw.size()) out += '\n';
    i = line_end + 1;
  }
  return out;
}

// Trims, strips leftover markers, collapses whitespace runs and folds a
// trailing truncation ellipsis into a period.
std::string clean_segment(std::string_view seg) {
  std::size_t p = 0;
  for (;;) {
    while (p < seg.size() && (is_space(seg[p]) || seg[p] == kMarker)) ++p;
    std::size_t len = marker_len(seg, p);
    if (len == 0) break;
    p += len;
  }
  std::string out;
  out.reserve(seg.size() - p);
  bool pending_space = false;
  for (; p < seg.size(); ++p) {
    char c = seg[p];
    if (c == kMarker) continue;
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  std::size_t end = out.size();
  bool ellipsis = false;
  while (end >= 3 && out.compare(end - 3, 3, "\xE2\x80\xA6") == 0) {
    end -= 3;
    ellipsis = true;
  }
  int dots = 0;
  while (end > 0 && out[end - 1] == '.') {
    --end;
    ++dots;
  }
  if (!ellipsis && dots < 2) return out;
  while (end > 0 && is_space(out[end - 1])) --end;
  if (end == 0) return "";
  out.erase(end);
  out += '.';
  return out;
}

}  // namespace

std::vector<std::string> preprocess(std::string_view raw) {
  std::string text = blank_line_markers(raw);
  std::vector<std::string> segments;
  std::string cur;
  int paren = 0;
  int curly_quote = 0;
  bool straight_quote = false;
  std::size_t i = 0;
  auto flush = [&] {
    std::string cleaned = clean_segment(cur);
    if (!cleaned.empty()) segments.push_back(std::move(cleaned));
    cur.clear();
  };
  while (i < text.size()) {
    if (text.compare(i, 3, "\xE2\x80\x9C") == 0) {
      ++curly_quote;
      cur.append(text, i, 3);
      i += 3;
      continue;
    }
    if (text.compare(i, 3, "\xE2\x80\x9D") == 0) {
      if (curly_quote > 0) --curly_quote;
      cur.append(text, i, 3);
      i += 3;
      continue;
    }
    char c = text[i];
    if (c == '"') {
      straight_quote = !straight_quote;
      cur += c;
      ++i;
      continue;
    }
    if (c == '(') ++paren;
    if (c == ')' && paren > 0) --paren;
    bool outside = paren == 0 && curly_quote == 0 && !straight_quote;
    if (outside && (c == '.' || c == '!' || c == '?')) {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      cur.append(text, i, j - i);
      i = j;
      // A terminator counts only before whitespace; "205.239(b)" stays whole.
      if (j >= text.size() || is_space(text[j])) flush();
      continue;
    }
    if (outside && c == ':') {
      std::size_t j = i + 1;
      while (j < text.size() && is_space(text[j])) ++j;
      // A colon introducing an enumeration item keeps the lead-in attached;
      // one introducing a capitalized clause ends the statement.
      if (j < text.size() && text[j] != kMarker && text[j] >= 'A' && text[j] <= 'Z') {
        cur += '.';
        flush();
        ++i;
        continue;
      }
      cur += c;
      ++i;
      continue;
    }
    cur += c;
    ++i;
  }
  flush();
  return segments;
}

std::size_t FrequencyTable::total_components() const {
  std::size_t n = 0;
  for (const auto& [code, count] : components) n += count;
  for (const auto& [code, count] : implied) n += count;
  return n;
}

namespace {

void tally_statement(const Statement& s, int nest_depth, FrequencyTable& t);

void tally_annotations(const std::vector<SemanticAnnotation>& anns, FrequencyTable& t) {
  for (const auto& a : anns)
    ++t.labels[{a.prefix, a.label.empty() ? a.value : a.label}];
}

void tally_property(const PropertyNode& p, int nest_depth, FrequencyTable& t) {
  tally_annotations(p.annotations, t);
  if (p.nested) {
    ++t.nesting_depth[nest_depth + 1];
    tally_statement(*p.nested, nest_depth + 1, t);
  }
  for (const auto& child : p.children) tally_property(child, nest_depth, t);
}

void tally_component(const Component& c, int nest_depth, FrequencyTable& t) {
  ++(c.implied ? t.implied : t.components)[c.code];
  tally_annotations(c.annotations, t);
  for (const auto& p : c.properties) tally_property(p, nest_depth, t);
  if (c.nested) {
    ++t.nesting_depth[nest_depth + 1];
    tally_statement(*c.nested, nest_depth + 1, t);
  }
}

void tally_statement(const Statement& s, int nest_depth, FrequencyTable& t) {
  if (const auto* a = std::get_if<Atomic>(&s.node)) {
    for (const auto& c : a->components) tally_component(c, nest_depth, t);
  } else if (const auto* combo = std::get_if<Combination>(&s.node)) {
    for (const auto& op : combo->operands) tally_statement(*op, nest_depth, t);
  } else if (const auto* neg = std::get_if<Negation>(&s.node)) {
    tally_statement(*neg->operand, nest_depth, t);
  } else if (const auto* oe = std::get_if<OrElse>(&s.node)) {
    tally_statement(*oe->monitored, nest_depth, t);
    tally_statement(*oe->consequential, nest_depth, t);
  }
}

}  // namespace

FrequencyTable stats(const std::vector<SourceRecord>& corpus) {
  FrequencyTable t;
  for (const auto& record : corpus) {
    if (!record.parsed) continue;
    tally_statement(*record.parsed, 0, t);
    for (const auto& pair : flatten_vertical(record.parsed)) ++t.vertical_depth[pair.depth];
  }
  return t;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

ManifestResult parse_manifest(std::string_view text) {
  CorpusManifest m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line[0] == '#') {
      if (eol == text.size()) break;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      return {std::nullopt, "line " + std::to_string(line_no) + ": expected key = value"};
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "name") {
      m.name = value;
    } else if (key == "profile") {
      m.profile = value;
    } else if (key == "taxonomy") {
      m.taxonomies.push_back(value);
    } else if (key == "document") {
      m.documents.push_back(value);
    } else if (key == "notes") {
      m.notes = m.notes.empty() ? value : m.notes + "\n" + value;
    } else {
      return {std::nullopt, "line " + std::to_string(line_no) + ": unknown key '" + key + "'"};
    }
    if (eol == text.size()) break;
  }
  if (!m.profile.empty()) {
    auto parsed = parse_profile(m.profile);
    if (!parsed.ok()) {
      std::string detail = parsed.diagnostics.empty() ? "invalid profile expression"
                                                      : parsed.diagnostics.front().message;
      return {std::nullopt, "profile: " + detail};
    }
  }
  return {std::move(m), ""};
}

namespace {

ojson statement_to_json(const Statement& s);

ojson annotation_to_json(const SemanticAnnotation& a) {
  ojson j;
  j["prefix"] = a.prefix;
  if (!a.label.empty()) j["label"] = a.label;
  if (!a.value.empty()) j["value"] = a.value;
  return j;
}

ojson property_to_json(const PropertyNode& p) {
  ojson j;
  j["text"] = p.text;
  if (p.dependence == Dependence::Independent) j["dependence"] = "independent";
  if (!p.index_path.empty()) j["index_path"] = p.index_path;
  if (p.group_id) j["group_id"] = std::string(1, *p.group_id);
  if (p.sibling_op) j["sibling_op"] = to_string(*p.sibling_op);
  if (p.before_head) j["before_head"] = true;
  if (p.nested) j["nested"] = statement_to_json(*p.nested);
  if (!p.annotations.empty()) {
    auto arr = ojson::array();
    for (const auto& a : p.annotations) arr.push_back(annotation_to_json(a));
    j["annotations"] = std::move(arr);
  }
  if (!p.children.empty()) {
    auto arr = ojson::array();
    for (const auto& child : p.children) arr.push_back(property_to_json(child));
    j["children"] = std::move(arr);
  }
  return j;
}

ojson component_to_json(const Component& c) {
  ojson j;
  j["code"] = to_string(c.code);
  if (c.alt_code) j["alt_code"] = to_string(*c.alt_code);
  j["text"] = c.text;
  if (c.implied) j["implied"] = true;
  if (c.inferred) j["inferred"] = true;
  if (c.negated) j["negated"] = true;
  if (c.sibling_op) j["sibling_op"] = to_string(*c.sibling_op);
  if (c.op_explicit) j["op_explicit"] = true;
  if (!c.properties.empty()) {
    auto arr = ojson::array();
    for (const auto& p : c.properties) arr.push_back(property_to_json(p));
    j["properties"] = std::move(arr);
  }
  if (c.nested) j["nested"] = statement_to_json(*c.nested);
  if (!c.annotations.empty()) {
    auto arr = ojson::array();
    for (const auto& a : c.annotations) arr.push_back(annotation_to_json(a));
    j["annotations"] = std::move(arr);
  }
  return j;
}

ojson statement_to_json(const Statement& s) {
  ojson j;
  if (const auto* a = std::get_if<Atomic>(&s.node)) {
    j["kind"] = "atomic";
    auto arr = ojson::array();
    for (const auto& c : a->components) arr.push_back(component_to_json(c));
    j["components"] = std::move(arr);
  } else if (const auto* combo = std::get_if<Combination>(&s.node)) {
    switch (combo->op) {
      case LogicalOperator::And: j["kind"] = "and"; break;
      case LogicalOperator::Or: j["kind"] = "or"; break;
      case LogicalOperator::Xor: j["kind"] = "xor"; break;
    }
    auto arr = ojson::array();
    for (const auto& op : combo->operands) arr.push_back(statement_to_json(*op));
    j["operands"] = std::move(arr);
  } else if (const auto* neg = std::get_if<Negation>(&s.node)) {
    j["kind"] = "not";
    j["operand"] = statement_to_json(*neg->operand);
  } else if (const auto* oe = std::get_if<OrElse>(&s.node)) {
    j["kind"] = "or_else";
    j["monitored"] = statement_to_json(*oe->monitored);
    j["consequential"] = statement_to_json(*oe->consequential);
  }
  if (s.governance) j["governance"] = to_string(*s.governance);
  if (s.consequence) j["consequence"] = to_string(*s.consequence);
  if (!s.trailing.empty()) j["trailing"] = s.trailing;
  return j;
}

ojson diagnostic_to_json(const Diagnostic& d) {
  ojson j;
  j["severity"] = to_string(d.severity);
  j["code"] = d.code;
  j["message"] = d.message;
  if (!d.statement_id.empty()) j["statement_id"] = d.statement_id;
  if (d.span) {
    ojson span;
    span["offset"] = d.span->offset;
    span["length"] = d.span->length;
    j["span"] = std::move(span);
  }
  return j;
}

}  // namespace

std::string export_corpus(const std::vector<SourceRecord>& records) {
  ojson root;
  root["schema"] = "igkit-1";
  auto arr = ojson::array();
  for (const auto& r : records) {
    ojson rec;
    rec["id"] = r.id;
    rec["raw"] = r.raw;
    if (r.parsed) rec["statement"] = statement_to_json(*r.parsed);
    if (r.alternate) rec["alternate"] = statement_to_json(*r.alternate);
    if (!r.diagnostics.empty()) {
      auto diags = ojson::array();
      for (const auto& d : r.diagnostics) diags.push_back(diagnostic_to_json(d));
      rec["diagnostics"] = std::move(diags);
    }
    arr.push_back(std::move(rec));
  }
  root["records"] = std::move(arr);
  return root.dump(2) + "\n";
}

namespace {

[[noreturn]] void bad_corpus(const std::string& what) {
  throw std::runtime_error(what);
}

ComponentCode code_from_json(const ojson& j) {
  auto text = j.get<std::string>();
  auto code = code_from_string(text);
  if (!code) bad_corpus("unknown component code '" + text + "'");
  return *code;
}

LogicalOperator op_from_text(const std::string& text) {
  if (text == "AND") return LogicalOperator::And;
  if (text == "OR") return LogicalOperator::Or;
  if (text == "XOR") return LogicalOperator::Xor;
  bad_corpus("unknown operator '" + text + "'");
}

StatementPtr statement_from_json(const ojson& j);

SemanticAnnotation annotation_from_json(const ojson& j) {
  SemanticAnnotation a;
  a.prefix = j.at("prefix").get<std::string>();
  a.label = j.value("label", "");
  a.value = j.value("value", "");
  return a;
}

PropertyNode property_from_json(const ojson& j) {
  PropertyNode p;
  p.text = j.at("text").get<std::string>();
  if (j.value("dependence", "dependent") == "independent") p.dependence = Dependence::Independent;
  if (j.contains("index_path")) p.index_path = j.at("index_path").get<std::vector<int>>();
  if (j.contains("group_id")) {
    auto gid = j.at("group_id").get<std::string>();
    if (gid.size() != 1) bad_corpus("group_id must be a single character");
    p.group_id = gid[0];
  }
  if (j.contains("sibling_op")) p.sibling_op = op_from_text(j.at("sibling_op").get<std::string>());
  p.before_head = j.value("before_head", false);
  if (j.contains("nested")) p.nested = statement_from_json(j.at("nested"));
  for (const auto& a : j.value("annotations", ojson::array()))
    p.annotations.push_back(annotation_from_json(a));
  for (const auto& child : j.value("children", ojson::array()))
    p.children.push_back(property_from_json(child));
  return p;
}

Component component_from_json(const ojson& j) {
  Component c;
  c.code = code_from_json(j.at("code"));
  if (j.contains("alt_code")) c.alt_code = code_from_json(j.at("alt_code"));
  c.text = j.at("text").get<std::string>();
  c.implied = j.value("implied", false);
  c.inferred = j.value("inferred", false);
  c.negated = j.value("negated", false);
  if (j.contains("sibling_op")) c.sibling_op = op_from_text(j.at("sibling_op").get<std::string>());
  c.op_explicit = j.value("op_explicit", false);
  for (const auto& p : j.value("properties", ojson::array()))
    c.properties.push_back(property_from_json(p));
  if (j.contains("nested")) c.nested = statement_from_json(j.at("nested"));
  for (const auto& a : j.value("annotations", ojson::array()))
    c.annotations.push_back(annotation_from_json(a));
  return c;
}

StatementPtr statement_from_json(const ojson& j) {
  auto s = std::make_shared<Statement>();
  auto kind = j.at("kind").get<std::string>();
  if (kind == "atomic") {
    Atomic a;
    for (const auto& c : j.at("components")) a.components.push_back(component_from_json(c));
    s->node = std::move(a);
  } else if (kind == "and" || kind == "or" || kind == "xor") {
    Combination combo;
    combo.op = kind == "and" ? LogicalOperator::And
                             : kind == "or" ? LogicalOperator::Or : LogicalOperator::Xor;
    for (const auto& op : j.at("operands")) combo.operands.push_back(statement_from_json(op));
    if (combo.operands.size() < 2) bad_corpus("combination needs at least two operands");
    s->node = std::move(combo);
  } else if (kind == "not") {
    s->node = Negation{statement_from_json(j.at("operand"))};
  } else if (kind == "or_else") {
    s->node = OrElse{statement_from_json(j.at("monitored")),
                     statement_from_json(j.at("consequential"))};
  } else {
    bad_corpus("unknown statement kind '" + kind + "'");
  }
  if (j.contains("governance")) {
    auto text = j.at("governance").get<std::string>();
    if (text == "monitored") s->governance = Governance::Monitored;
    else if (text == "consequential") s->governance = Governance::Consequential;
    else if (text == "monitoring") s->governance = Governance::Monitoring;
    else bad_corpus("unknown governance '" + text + "'");
  }
  if (j.contains("consequence")) {
    auto text = j.at("consequence").get<std::string>();
    if (text == "existential") s->consequence = ConsequenceType::Existential;
    else if (text == "non-existential") s->consequence = ConsequenceType::NonExistential;
    else bad_corpus("unknown consequence type '" + text + "'");
  }
  s->trailing = j.value("trailing", "");
  return s;
}

Diagnostic diagnostic_from_json(const ojson& j) {
  Diagnostic d;
  auto sev = j.at("severity").get<std::string>();
  if (sev == "error") d.severity = Severity::Error;
  else if (sev == "warning") d.severity = Severity::Warning;
  else if (sev == "info") d.severity = Severity::Info;
  else bad_corpus("unknown severity '" + sev + "'");
  d.code = j.at("code").get<std::string>();
  d.message = j.at("message").get<std::string>();
  d.statement_id = j.value("statement_id", "");
  if (j.contains("span")) {
    Span span;
    span.offset = j.at("span").at("offset").get<std::size_t>();
    span.length = j.at("span").at("length").get<std::size_t>();
    d.span = span;
  }
  return d;
}

}  // namespace

ImportResult import_corpus(std::string_view json_text) {
  ImportResult result;
  ojson root = ojson::parse(json_text, nullptr, false);
  if (root.is_discarded()) {
    result.error = "malformed JSON";
    return result;
  }
  try {
    auto schema = root.at("schema").get<std::string>();
    if (schema != "igkit-1") {
      result.error = "unsupported schema '" + schema + "'";
      return result;
    }
    for (const auto& rec : root.at("records")) {
      SourceRecord r;
      r.id = rec.at("id").get<std::string>();
      r.raw = rec.value("raw", "");
      if (rec.contains("statement")) r.parsed = statement_from_json(rec.at("statement"));
      if (rec.contains("alternate")) r.alternate = statement_from_json(rec.at("alternate"));
      for (const auto& d : rec.value("diagnostics", ojson::array()))
        r.diagnostics.push_back(diagnostic_from_json(d));
      result.records.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    result.records.clear();
    result.error = e.what();
  }
  return result;
}

}  // namespace igkit
