#include "igkit/taxonomy.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace igkit {

namespace {

// Edit distance for nearest-label suggestions; inputs are short codes.
std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t next = std::min({row[j] + 1, row[j - 1] + 1,
                                   diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = row[j];
      row[j] = next;
    }
  }
  return row[b.size()];
}

}  // namespace

std::string to_string(TaxonomyErrorCode code) {
  switch (code) {
    case TaxonomyErrorCode::UnknownPrefix: return "UnknownPrefix";
    case TaxonomyErrorCode::UnknownLabel: return "UnknownLabel";
    case TaxonomyErrorCode::DuplicateCode: return "DuplicateCode";
    case TaxonomyErrorCode::CycleDetected: return "CycleDetected";
    case TaxonomyErrorCode::ReservedPrefixModification: return "ReservedPrefixModification";
    case TaxonomyErrorCode::MalformedDefinition: return "MalformedDefinition";
  }
  return "?";
}

TaxonomyNode* TaxonomyRegistry::add(std::string prefix, std::string code, std::string name,
                  TaxonomyNode* parent, std::vector<std::string> aliases,
                  bool reserved) {
  auto node = std::make_unique<TaxonomyNode>();
  node->prefix = std::move(prefix);
  node->code = std::move(code);
  node->name = std::move(name);
  node->aliases = std::move(aliases);
  node->parent = parent;
  TaxonomyNode* raw = node.get();
  if (parent) parent->children.push_back(raw);
  if (reserved && raw->annotatable()) reserved_.emplace_back(raw->prefix, raw->code);
  nodes_.push_back(std::move(node));
  return raw;
}

TaxonomyRegistry TaxonomyRegistry::clone() const {
  TaxonomyRegistry out;
  std::map<const TaxonomyNode*, TaxonomyNode*> mapped;
  for (const auto& node : nodes_) {
    TaxonomyNode* parent = node->parent ? mapped.at(node->parent) : nullptr;
    mapped[node.get()] = out.add(node->prefix, node->code, node->name, parent, node->aliases);
  }
  out.reserved_ = reserved_;
  return out;
}

const TaxonomyRegistry& TaxonomyRegistry::builtin() {
  static const TaxonomyRegistry reg = [] {
    TaxonomyRegistry r;
    const auto ctx = [&r](std::string code, std::string name, TaxonomyNode* parent) {
      return r.add("ctx", std::move(code), std::move(name), parent, {}, true);
    };
    auto* substantive = ctx("", "Substantive Context", nullptr);
    auto* tmp = ctx("tmp", "Temporal", substantive);
    auto* tim = ctx("tim", "Point in time", tmp);
    ctx("", "Beginning", tim);
    ctx("", "End", tim);
    ctx("tfr", "Time frame", tmp);
    ctx("frq", "Frequency", tmp);
    auto* spt = ctx("spt", "Spatial", substantive);
    auto* loc = ctx("loc", "Location", spt);
    ctx("", "Beginning", loc);
    ctx("", "End", loc);
    ctx("dir", "Direction", spt);
    ctx("pth", "Path", spt);
    auto* dom = ctx("dom", "Domanial", substantive);
    ctx("", "Activity realm", dom);
    ctx("", "Topical realm", dom);
    ctx("", "Existential realm", dom);
    auto* procedural = ctx("", "Procedural Context", nullptr);
    ctx("ord", "Order", procedural);
    auto* met = ctx("met", "Method", procedural);
    ctx("", "Means", met);
    ctx("", "Instrument", met);
    auto* aspirational = ctx("", "Aspirational Context", nullptr);
    ctx("pur", "Purpose/Function", aspirational);
    auto* situational = ctx("", "Situational Context", nullptr);
    ctx("ste", "State", situational);
    ctx("evt", "Event", situational);

    r.add("anim", "animate", "Living entities", nullptr, {}, true);
    r.add("anim", "inanimate", "Non-living entities, both real and mental constructs",
          nullptr, {}, true);

    r.add("metatype", "abstract", "Abstract entities", nullptr, {}, true);
    r.add("metatype", "concrete", "Concrete entities", nullptr, {}, true);

    r.add("role", "originator", "Entity from which action originates", nullptr,
          {"Causer", "Agent"}, true);
    r.add("role", "recipient", "recipient of an artifact/sanction", nullptr, {}, true);
    r.add("role", "possessor", "owner of an object/entity", nullptr, {}, true);
    r.add("role", "experiencer", "observer of action", nullptr, {}, true);
    r.add("role", "beneficiary",
          "beneficiary of action; may not necessarily be action/artifact recipient",
          nullptr, {}, true);
    r.add("role", "position", "organisation or institutional role assumed by involved actor",
          nullptr, {}, true);

    const auto regf = [&r](std::string code, std::string name, TaxonomyNode* parent) {
      return r.add("regfunc", std::move(code), std::move(name), parent, {}, true);
    };
    auto* compliance = regf("compliance-action", "action reflecting compliance behavior", nullptr);
    regf("comply", "action reflecting compliance", compliance);
    regf("violate", "action reflecting violation", compliance);
    auto* monitor = regf("monitor", "action reflecting the institutional function of monitoring",
                         nullptr);
    regf("detect-compliance", "action reflecting the detection of compliance", monitor);
    regf("detect-violation", "action reflecting the detection of violation", monitor);
    auto* enforce = regf("enforce", "action reflecting enforcement acts", nullptr);
    regf("reward", "action reflecting rewarding behaviour", enforce);
    regf("sanction", "action reflecting sanctioning behaviour", enforce);
    auto* response = regf("enforcement-response",
                          "action reflecting responses to enforcement outcomes", nullptr);
    regf("accept", "action reflecting acceptance of enforcement outcome", response);
    auto* reject = regf("reject", "action reflecting rejection of enforcement outcome", response);
    regf("appeal", "action reflecting appeal against enforcement outcome", reject);

    const auto conf = [&r](std::string code, std::string name, TaxonomyNode* parent) {
      return r.add("confunc", std::move(code), std::move(name), parent, {}, true);
    };
    auto* entity = conf("entity", "Entity", nullptr);
    conf("definition", "Definition", entity);
    conf("composition", "Composition", entity);
    conf("organization", "Organization", entity);
    conf("entity-lifecycle", "Entity lifecycle", entity);
    conf("conferral", "Conferral", entity);
    auto* policy = conf("policy", "Policy", nullptr);
    conf("policy-lifecycle", "Policy lifecycle", policy);
    conf("relationship", "Relationship", policy);
    conf("intent", "Intent", policy);
    conf("information", "Information", policy);

    r.add("governance", "monitored", "Monitored", nullptr, {}, true);
    r.add("governance", "consequential", "Consequential", nullptr, {}, true);
    r.add("governance", "monitoring", "Monitoring", nullptr, {}, true);

    r.add("consequence", "existential", "Existential", nullptr, {}, true);
    r.add("consequence", "non-existential", "Non-existential", nullptr, {}, true);
    return r;
  }();
  return reg;
}

const TaxonomyNode* TaxonomyRegistry::find(std::string_view prefix, std::string_view code) const {
  if (code.empty()) return nullptr;
  for (const auto& node : nodes_) {
    if (node->prefix == prefix && node->code == code) return node.get();
  }
  return nullptr;
}

TaxonomyRegistry::ResolveResult TaxonomyRegistry::resolve(std::string_view prefix,
                                                          std::string_view label) const {
  ResolveResult result;
  if (!has_prefix(prefix)) {
    std::ostringstream msg;
    msg << "unknown taxonomy prefix '" << prefix << "'";
    result.error = TaxonomyError{TaxonomyErrorCode::UnknownPrefix, msg.str()};
    return result;
  }
  if (const TaxonomyNode* node = find(prefix, label)) {
    result.node = node;
    return result;
  }
  for (const auto& node : nodes_) {
    if (node->prefix != prefix) continue;
    if (std::find(node->aliases.begin(), node->aliases.end(), label) != node->aliases.end()) {
      result.node = node.get();
      return result;
    }
  }
  const TaxonomyNode* nearest = nullptr;
  std::size_t best = 0;
  for (const auto& node : nodes_) {
    if (node->prefix != prefix || !node->annotatable()) continue;
    std::size_t d = edit_distance(label, node->code);
    if (!nearest || d < best) {
      nearest = node.get();
      best = d;
    }
  }
  std::ostringstream msg;
  msg << "unknown label '" << label << "' under '" << prefix << "'";
  if (nearest) msg << "; closest is '" << nearest->code << "'";
  result.error = TaxonomyError{TaxonomyErrorCode::UnknownLabel, msg.str()};
  return result;
}

std::vector<const TaxonomyNode*> TaxonomyRegistry::ancestors(const TaxonomyNode* node) {
  std::vector<const TaxonomyNode*> path;
  for (const TaxonomyNode* cur = node; cur; cur = cur->parent) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

bool TaxonomyRegistry::has_prefix(std::string_view prefix) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const auto& node) { return node->prefix == prefix; });
}

std::vector<std::string> TaxonomyRegistry::prefixes() const {
  std::vector<std::string> out;
  for (const auto& node : nodes_) {
    if (std::find(out.begin(), out.end(), node->prefix) == out.end())
      out.push_back(node->prefix);
  }
  return out;
}

std::vector<const TaxonomyNode*> TaxonomyRegistry::roots(std::string_view prefix) const {
  std::vector<const TaxonomyNode*> out;
  for (const auto& node : nodes_) {
    if (node->prefix == prefix && !node->parent) out.push_back(node.get());
  }
  return out;
}

std::vector<const TaxonomyNode*> TaxonomyRegistry::nodes(std::string_view prefix) const {
  std::vector<const TaxonomyNode*> out;
  for (const auto& node : nodes_) {
    if (node->prefix == prefix) out.push_back(node.get());
  }
  return out;
}

std::size_t TaxonomyRegistry::coded_count(std::string_view prefix) const {
  std::size_t n = 0;
  for (const auto& node : nodes_) {
    if (node->prefix == prefix && node->annotatable()) ++n;
  }
  return n;
}

TaxonomyMergeResult TaxonomyRegistry::merge(
  const std::vector<TaxonomyEntry>& entries) const {
  TaxonomyMergeResult result;
  const auto fail = [&result](TaxonomyErrorCode code, const std::string& message) {
    result.error = TaxonomyError{code, message};
  };

  std::map<std::pair<std::string, std::string>, const TaxonomyEntry*> batch;
  for (const auto& entry : entries) {
    if (entry.prefix.empty() || entry.code.empty()) {
      fail(TaxonomyErrorCode::MalformedDefinition,
           "taxonomy entries need a non-empty prefix and code");
      return result;
    }
    auto key = std::make_pair(entry.prefix, entry.code);
    if (std::find(reserved_.begin(), reserved_.end(), key) != reserved_.end()) {
      fail(TaxonomyErrorCode::ReservedPrefixModification,
           "'" + entry.prefix + ":" + entry.code + "' is a built-in label");
      return result;
    }
    if (find(entry.prefix, entry.code) || !batch.emplace(key, &entry).second) {
      fail(TaxonomyErrorCode::DuplicateCode,
           "'" + entry.prefix + ":" + entry.code + "' is defined twice");
      return result;
    }
  }
  // Parent chains inside the batch must bottom out in the batch or the
  // existing registry; anything that loops back is a cycle.
  for (const auto& entry : entries) {
    std::set<std::pair<std::string, std::string>> seen;
    const TaxonomyEntry* cur = &entry;
    while (cur && !cur->parent.empty()) {
      if (!seen.insert({cur->prefix, cur->code}).second) {
        fail(TaxonomyErrorCode::CycleDetected,
             "'" + entry.prefix + ":" + entry.code + "' is its own ancestor");
        return result;
      }
      auto it = batch.find({cur->prefix, cur->parent});
      if (it != batch.end()) {
        cur = it->second;
      } else if (find(cur->prefix, cur->parent)) {
        cur = nullptr;
      } else {
        fail(TaxonomyErrorCode::UnknownLabel,
             "parent '" + cur->parent + "' of '" + cur->prefix + ":" + cur->code +
                 "' is not defined");
        return result;
      }
    }
  }

  TaxonomyRegistry merged = clone();
  std::map<std::pair<std::string, std::string>, TaxonomyNode*> added;
  // Recursion-free insertion: loop until every entry has its parent placed.
  std::vector<const TaxonomyEntry*> pending;
  for (const auto& entry : entries) pending.push_back(&entry);
  while (!pending.empty()) {
    std::vector<const TaxonomyEntry*> next;
    for (const TaxonomyEntry* entry : pending) {
      TaxonomyNode* parent = nullptr;
      if (!entry->parent.empty()) {
        auto it = added.find({entry->prefix, entry->parent});
        if (it != added.end()) {
          parent = it->second;
        } else if (const TaxonomyNode* existing = merged.find(entry->prefix, entry->parent)) {
          parent = const_cast<TaxonomyNode*>(existing);
        } else {
          next.push_back(entry);
          continue;
        }
      }
      added[{entry->prefix, entry->code}] =
        merged.add(entry->prefix, entry->code, entry->name, parent);
    }
    pending = std::move(next);
  }
  result.registry = std::move(merged);
  return result;
}

TaxonomyFileResult parse_taxonomy_file(std::string_view json_text) {
  TaxonomyFileResult result;
  const auto fail = [&result](const std::string& message) {
    result.error = TaxonomyError{TaxonomyErrorCode::MalformedDefinition, message};
  };
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    fail("taxonomy file is not valid JSON");
    return result;
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    fail("taxonomy file must be an object with a 'nodes' array");
    return result;
  }
  for (const auto& item : doc["nodes"]) {
    if (!item.is_object()) {
      fail("every entry in 'nodes' must be an object");
      return result;
    }
    TaxonomyEntry entry;
    for (const char* field : {"prefix", "code", "name"}) {
      if (!item.contains(field) || !item[field].is_string()) {
        fail(std::string("taxonomy node is missing string field '") + field + "'");
        return result;
      }
    }
    entry.prefix = item["prefix"].get<std::string>();
    entry.code = item["code"].get<std::string>();
    entry.name = item["name"].get<std::string>();
    if (item.contains("parent")) {
      if (!item["parent"].is_string()) {
        fail("'parent' must be a string when present");
        return result;
      }
      entry.parent = item["parent"].get<std::string>();
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace igkit
