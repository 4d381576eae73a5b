// Seeded random builders for property tests. Trees produced here stay
// within the shapes the canonical serializer can reproduce, so they are
// valid inputs for round-trip and transformation properties.
#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <igkit/model.hpp>
#include <igkit/taxonomy.hpp>

namespace igtest {

struct Rng {
  std::mt19937 engine;

  explicit Rng(unsigned seed) : engine(seed) {}

  int range(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(engine);
  }

  bool chance(int percent) { return range(1, 100) <= percent; }

  template <typename T, std::size_t N>
  const T& pick(const T (&pool)[N]) {
    return pool[static_cast<std::size_t>(range(0, static_cast<int>(N) - 1))];
  }
};

inline const char* const kActors[] = {"farmers",   "inspectors", "certifiers",
                                      "producers", "handlers",   "the operators"};
inline const char* const kDeontics[] = {"must", "may", "shall"};
inline const char* const kVerbs[] = {"submit",  "report",  "maintain", "establish",
                                     "review",  "monitor", "certify",  "inspect"};
inline const char* const kObjects[] = {"records",      "reports", "certificates",
                                       "soil samples", "plans",   "labels"};
inline const char* const kEntities[] = {"the board", "the council", "the committee",
                                        "the registry"};
inline const char* const kConstFns[] = {"is", "constitutes", "means"};
inline const char* const kConstProps[] = {"a supervisory body", "an advisory group",
                                          "a standing unit", "a public office"};
inline const char* const kContexts[] = {"during summer",  "under drought", "after harvest",
                                        "before sunrise", "on request",    "within the region"};
inline const char* const kModifiers[] = {"certified", "regional", "accredited", "elected"};
inline const char* const kCtxLabels[] = {"tim", "tfr", "frq", "loc", "dom", "met"};
inline const char* const kRegfuncLabels[] = {"comply", "monitor", "sanction"};
inline const char* const kConfuncLabels[] = {"definition", "composition", "organization"};

inline igkit::Component comp(igkit::ComponentCode code, std::string text) {
  igkit::Component c;
  c.code = code;
  c.text = std::move(text);
  return c;
}

// Knobs for random_statement. semantic and alternatives push the coding
// to the richest level; with both off the output stays within IG Extended.
struct GenOptions {
  int max_depth = 3;       // statement-level combination depth
  int nest_budget = 2;     // component-level nesting levels
  bool properties = true;
  bool semantic = false;   // taxonomy tags, references, function labels
  bool alternatives = false;  // written component-level operator runs
};

inline igkit::StatementPtr random_statement(Rng& rng, const GenOptions& opt, int depth = 0);

inline void maybe_tag(Rng& rng, igkit::Component& c, const char* prefix, const char* label) {
  if (!rng.chance(40)) return;
  igkit::SemanticAnnotation a;
  a.prefix = prefix;
  a.label = label;
  c.annotations.push_back(std::move(a));
}

inline igkit::PropertyNode leading_prop(std::string text) {
  igkit::PropertyNode p;
  p.text = std::move(text);
  p.before_head = true;
  return p;
}

// One run of same-code alternatives joined by a single written operator.
inline void append_alternatives(Rng& rng, std::vector<igkit::Component>& components,
                                igkit::ComponentCode code, const char* const (&pool)[8]) {
  const igkit::LogicalOperator ops[] = {igkit::LogicalOperator::And, igkit::LogicalOperator::Or,
                                        igkit::LogicalOperator::Xor};
  igkit::LogicalOperator op = ops[rng.range(0, 2)];
  int n = rng.range(2, 3);
  std::string base = rng.pick(pool);
  for (int k = 0; k < n; ++k) {
    igkit::Component c = comp(code, base + " " + std::string(1, static_cast<char>('a' + k)));
    if (k > 0) {
      c.sibling_op = op;
      c.op_explicit = true;
    }
    components.push_back(std::move(c));
  }
}

inline igkit::StatementPtr random_atomic(Rng& rng, const GenOptions& opt, int depth,
                                         std::string trailing) {
  std::vector<igkit::Component> components;
  const bool constitutive = rng.chance(40);
  const bool dual = rng.chance(8);
  const bool nested_allowed = opt.nest_budget > 0 && rng.chance(25);

  if (rng.chance(30)) {
    igkit::Component cac = comp(igkit::ComponentCode::Cac, rng.pick(kContexts));
    if (opt.semantic) maybe_tag(rng, cac, "ctx", rng.pick(kCtxLabels));
    components.push_back(std::move(cac));
  }

  if (dual) {
    igkit::Component a = comp(igkit::ComponentCode::A, rng.pick(kEntities));
    a.alt_code = igkit::ComponentCode::E;
    igkit::Component d = comp(igkit::ComponentCode::D, rng.pick(kDeontics));
    d.alt_code = igkit::ComponentCode::M;
    igkit::Component i = comp(igkit::ComponentCode::I, rng.pick(kVerbs));
    i.alt_code = igkit::ComponentCode::F;
    igkit::Component b = comp(igkit::ComponentCode::Bdir, rng.pick(kObjects));
    b.alt_code = igkit::ComponentCode::P;
    components.push_back(std::move(a));
    components.push_back(std::move(d));
    components.push_back(std::move(i));
    components.push_back(std::move(b));
  } else if (constitutive) {
    igkit::Component e = comp(igkit::ComponentCode::E, rng.pick(kEntities));
    if (opt.properties && rng.chance(35)) {
      e.properties.push_back(leading_prop(rng.pick(kModifiers)));
    }
    if (opt.semantic) maybe_tag(rng, e, "anim", "inanimate");
    components.push_back(std::move(e));
    if (rng.chance(60)) {
      igkit::Component m = comp(igkit::ComponentCode::M, "shall");
      m.negated = rng.chance(15);
      components.push_back(std::move(m));
    }
    igkit::Component f = comp(igkit::ComponentCode::F, rng.pick(kConstFns));
    if (opt.semantic) maybe_tag(rng, f, "confunc", rng.pick(kConfuncLabels));
    components.push_back(std::move(f));
    if (opt.alternatives && rng.chance(40)) {
      append_alternatives(rng, components, igkit::ComponentCode::P, kVerbs);
    } else {
      igkit::Component p = comp(igkit::ComponentCode::P, rng.pick(kConstProps));
      if (opt.semantic && rng.chance(20)) {
        igkit::SemanticAnnotation ref;
        ref.prefix = "polref";
        ref.value = "Section/205.239";
        p.annotations.push_back(std::move(ref));
      }
      components.push_back(std::move(p));
    }
  } else {
    igkit::Component a = comp(igkit::ComponentCode::A, rng.pick(kActors));
    if (opt.properties && rng.chance(35)) {
      a.properties.push_back(leading_prop(rng.pick(kModifiers)));
    }
    if (opt.semantic) maybe_tag(rng, a, "role", "originator");
    components.push_back(std::move(a));
    igkit::Component d = comp(igkit::ComponentCode::D, rng.pick(kDeontics));
    d.negated = rng.chance(15);
    components.push_back(std::move(d));
    if (opt.alternatives && rng.chance(40)) {
      append_alternatives(rng, components, igkit::ComponentCode::I, kVerbs);
    } else {
      igkit::Component i = comp(igkit::ComponentCode::I, rng.pick(kVerbs));
      if (opt.semantic) maybe_tag(rng, i, "regfunc", rng.pick(kRegfuncLabels));
      components.push_back(std::move(i));
    }
    if (nested_allowed && rng.chance(50)) {
      GenOptions inner = opt;
      inner.nest_budget = opt.nest_budget - 1;
      igkit::Component b = comp(igkit::ComponentCode::Bdir, "that");
      b.nested = random_atomic(rng, inner, depth, "");
      components.push_back(std::move(b));
    } else if (rng.chance(80)) {
      igkit::Component b = comp(igkit::ComponentCode::Bdir, rng.pick(kObjects));
      if (opt.semantic) maybe_tag(rng, b, "anim", "inanimate");
      components.push_back(std::move(b));
    }
  }

  if (nested_allowed && !dual && rng.chance(40)) {
    GenOptions inner = opt;
    inner.nest_budget = opt.nest_budget - 1;
    igkit::Component cac = comp(igkit::ComponentCode::Cac, "under the condition that");
    cac.nested = random_atomic(rng, inner, depth, "");
    components.push_back(std::move(cac));
  } else if (rng.chance(30)) {
    igkit::Component cex = comp(igkit::ComponentCode::Cex, rng.pick(kContexts));
    if (opt.semantic) maybe_tag(rng, cex, "ctx", rng.pick(kCtxLabels));
    components.push_back(std::move(cex));
  }

  return igkit::make_atomic(std::move(components), std::move(trailing));
}

inline igkit::StatementPtr random_statement(Rng& rng, const GenOptions& opt, int depth) {
  const bool leaf = depth >= opt.max_depth || rng.chance(45 + depth * 20);
  if (leaf) return random_atomic(rng, opt, depth, ".");
  switch (rng.range(0, 2)) {
    case 0: {
      const igkit::LogicalOperator ops[] = {
          igkit::LogicalOperator::And, igkit::LogicalOperator::Or, igkit::LogicalOperator::Xor};
      igkit::LogicalOperator op = ops[rng.range(0, 2)];
      std::vector<igkit::StatementPtr> operands;
      int n = rng.range(2, 3);
      for (int k = 0; k < n; ++k) operands.push_back(random_statement(rng, opt, depth + 1));
      return igkit::make_combination(op, std::move(operands));
    }
    case 1:
      return igkit::make_negation(random_statement(rng, opt, depth + 1));
    default:
      return igkit::make_or_else(random_statement(rng, opt, depth + 1),
                                 random_statement(rng, opt, depth + 1));
  }
}

// Statement whose only structure is same-code alternative runs sharing one
// operator, plus the per-slot alternative pools for brute-force expansion.
struct AlternativesCase {
  igkit::StatementPtr statement;
  std::vector<std::vector<igkit::Component>> slots;  // source order, singles included
  std::string trailing;
};

inline AlternativesCase random_alternatives(Rng& rng) {
  const igkit::LogicalOperator ops[] = {igkit::LogicalOperator::And, igkit::LogicalOperator::Or,
                                        igkit::LogicalOperator::Xor};
  igkit::LogicalOperator op = ops[rng.range(0, 2)];

  struct Field {
    igkit::ComponentCode code;
    const char* const* pool;
    std::size_t pool_size;
  };
  const Field fields[] = {
      {igkit::ComponentCode::A, kActors, std::size(kActors)},
      {igkit::ComponentCode::D, kDeontics, std::size(kDeontics)},
      {igkit::ComponentCode::I, kVerbs, std::size(kVerbs)},
      {igkit::ComponentCode::Bdir, kObjects, std::size(kObjects)},
  };

  AlternativesCase out;
  out.trailing = ".";
  std::vector<igkit::Component> components;
  for (const Field& field : fields) {
    const char* base = field.pool[static_cast<std::size_t>(
        rng.range(0, static_cast<int>(field.pool_size) - 1))];
    int n = rng.chance(50) ? rng.range(2, 4) : 1;
    std::vector<igkit::Component> alts;
    for (int k = 0; k < n; ++k) {
      std::string text = n == 1 ? std::string(base)
                                : std::string(base) + " " + std::string(1, static_cast<char>('a' + k));
      igkit::Component c = comp(field.code, std::move(text));
      if (k > 0) {
        c.sibling_op = op;
        c.op_explicit = true;
      }
      components.push_back(c);
      c.sibling_op.reset();
      c.op_explicit = false;
      alts.push_back(std::move(c));
    }
    out.slots.push_back(std::move(alts));
  }
  out.statement = igkit::make_atomic(std::move(components), out.trailing);
  return out;
}

// Every atomic statement reachable from the root, in document order.
inline void collect_leaves(const igkit::StatementPtr& s,
                           std::vector<igkit::StatementPtr>& out) {
  if (!s) return;
  if (std::holds_alternative<igkit::Atomic>(s->node)) {
    out.push_back(s);
    return;
  }
  if (const auto* combo = std::get_if<igkit::Combination>(&s->node)) {
    for (const auto& operand : combo->operands) collect_leaves(operand, out);
    return;
  }
  if (const auto* neg = std::get_if<igkit::Negation>(&s->node)) {
    collect_leaves(neg->operand, out);
    return;
  }
  const auto& oe = std::get<igkit::OrElse>(s->node);
  collect_leaves(oe.monitored, out);
  collect_leaves(oe.consequential, out);
}

// Cross product of the slot alternatives by plain enumeration: one atomic
// statement per combination, nested loops realized recursively.
inline std::vector<igkit::StatementPtr> cross_product(const AlternativesCase& c) {
  std::vector<igkit::StatementPtr> out;
  std::vector<std::size_t> choice(c.slots.size(), 0);
  const auto emit = [&]() {
    std::vector<igkit::Component> components;
    for (std::size_t i = 0; i < c.slots.size(); ++i) {
      components.push_back(c.slots[i][choice[i]]);
    }
    out.push_back(igkit::make_atomic(std::move(components), c.trailing));
  };
  const auto recurse = [&](auto&& self, std::size_t slot) -> void {
    if (slot == c.slots.size()) {
      emit();
      return;
    }
    for (std::size_t a = 0; a < c.slots[slot].size(); ++a) {
      choice[slot] = a;
      self(self, slot + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

// Additive taxonomy entry batch: new codes only, parents drawn from nodes
// that already exist (or earlier entries of the same batch).
inline std::vector<igkit::TaxonomyEntry> random_entries(Rng& rng,
                                                        const igkit::TaxonomyRegistry& base,
                                                        int serial) {
  const char* const prefixes[] = {"ctx", "role", "actcat", "measure"};
  std::vector<igkit::TaxonomyEntry> batch;
  int n = rng.range(1, 4);
  for (int k = 0; k < n; ++k) {
    igkit::TaxonomyEntry entry;
    entry.prefix = rng.pick(prefixes);
    entry.code = "gen" + std::to_string(serial) + "x" + std::to_string(k);
    entry.name = "generated node " + entry.code;
    std::vector<std::string> candidates{""};
    for (const igkit::TaxonomyNode* node : base.nodes(entry.prefix)) {
      if (node->annotatable()) candidates.push_back(node->code);
    }
    for (const igkit::TaxonomyEntry& prior : batch) {
      if (prior.prefix == entry.prefix) candidates.push_back(prior.code);
    }
    entry.parent = candidates[static_cast<std::size_t>(
        rng.range(0, static_cast<int>(candidates.size()) - 1))];
    batch.push_back(std::move(entry));
  }
  return batch;
}

}  // namespace igtest
