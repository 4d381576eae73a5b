#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <igkit/model.hpp>
#include <igkit/notation.hpp>

#include "support/generators.hpp"

using namespace igkit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "fixture missing: ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

StatementPtr parse_ok(const std::string& text) {
  ParseResult r = parse_statement(text);
  for (const Diagnostic& d : r.diagnostics) {
    INFO(d.code, ": ", d.message);
    CHECK(d.severity != Severity::Error);
  }
  REQUIRE(r.statement != nullptr);
  return r.statement;
}

const Component& component(const Statement& s, ComponentCode code, std::size_t nth = 0) {
  const auto& atomic = std::get<Atomic>(s.node);
  std::size_t seen = 0;
  for (const Component& c : atomic.components) {
    if (c.code == code && seen++ == nth) return c;
  }
  REQUIRE_MESSAGE(false, "component not found: ", to_string(code));
  static Component none;
  return none;
}

}  // namespace

TEST_CASE("a plain regulative statement parses into its five components") {
  auto s = parse_ok("Organic farmers (A) must (D) commit (I) to organic farming standards (Bdir).");
  const auto& atomic = std::get<Atomic>(s->node);
  REQUIRE(atomic.components.size() == 6);  // implied Cac and Cex appended
  CHECK(component(*s, ComponentCode::A).text == "Organic farmers");
  CHECK(component(*s, ComponentCode::D).text == "must");
  CHECK(component(*s, ComponentCode::I).text == "commit");
  CHECK(component(*s, ComponentCode::Bdir).text == "to organic farming standards");
  CHECK(component(*s, ComponentCode::Cac).implied);
  CHECK(component(*s, ComponentCode::Cex).implied);
  CHECK(s->trailing == ".");
}

TEST_CASE("negation markers and inferred spans") {
  auto s = parse_ok("[Appointing authority] (A) must not (D,NOT) disqualify (I) members (Bdir).");
  CHECK(component(*s, ComponentCode::A).inferred);
  CHECK(component(*s, ComponentCode::A).text == "Appointing authority");
  CHECK(component(*s, ComponentCode::D).negated);
  CHECK(component(*s, ComponentCode::D).text == "must not");
}

TEST_CASE("dual coding keeps both readings") {
  auto s = parse_ok("The board (A/E) may (D/M) review (I/F) cases (Bdir/P).");
  CHECK(component(*s, ComponentCode::A).alt_code == ComponentCode::E);
  CHECK(component(*s, ComponentCode::D).alt_code == ComponentCode::M);
  CHECK(classify(*s) == StatementKind::Polymorphic);
}

TEST_CASE("property hierarchy attachment") {
  auto s = parse_ok("Certified (A,prop) farmers (A) must (D) adhere (I).");
  const Component& a = component(*s, ComponentCode::A);
  REQUIRE(a.properties.size() == 1);
  CHECK(a.properties[0].text == "Certified");
  CHECK(a.properties[0].before_head);
  CHECK(a.properties[0].dependence == Dependence::Dependent);
  CHECK(a.properties[0].index_path.empty());

  SUBCASE("indexed properties on both sides of the head") {
    auto t = parse_ok(
        "The Council (E) consists of (F) elected (P,prop1) officials (P) resident in the "
        "electorate (P,prop2).");
    const Component& p = component(*t, ComponentCode::P);
    REQUIRE(p.properties.size() == 2);
    CHECK(p.properties[0].index_path == std::vector<int>{1});
    CHECK(p.properties[0].before_head);
    CHECK(p.properties[1].index_path == std::vector<int>{2});
    CHECK_FALSE(p.properties[1].before_head);
  }

  SUBCASE("chained indices nest below the first-level property") {
    auto t = parse_ok(
        "A majority (P,prop1,prop1) of the members (P,prop1) of the Council (P) shall (M) "
        "constitute (F) a quorum (E).");
    const Component& p = component(*t, ComponentCode::P);
    CHECK(p.text == "of the Council");
    REQUIRE(p.properties.size() == 1);
    CHECK(p.properties[0].index_path == std::vector<int>{1});
    REQUIRE(p.properties[0].children.size() == 1);
    CHECK(p.properties[0].children[0].index_path == std::vector<int>{1, 1});
  }

  SUBCASE("braced heads push the chain one level down") {
    auto t = parse_ok(
        "( A majority (P,prop1,prop1) of the members (P,prop1) of the Council ) (P) shall (M) "
        "constitute (F) a quorum (E).");
    const Component& p = component(*t, ComponentCode::P);
    REQUIRE(p.properties.size() == 1);
    CHECK(p.properties[0].index_path.empty());
    REQUIRE(p.properties[0].children.size() == 1);
    CHECK(p.properties[0].children[0].index_path == std::vector<int>{1});
  }
}

TEST_CASE("compound groups carry lettered members") {
  auto s = parse_ok(
      "The Committee (E) shall (M) consist of (F) a ( President (P(a)) [AND] Secretary (P(b)) "
      "[AND] qualified (P(c),prop1) Treasurer (P(c)) ) (P) appointed by the public (P,prop).");
  const Component& p = component(*s, ComponentCode::P);
  std::size_t members = 0;
  bool shared_prop = false;
  for (const PropertyNode& node : p.properties) {
    if (node.group_id) ++members;
    if (!node.group_id && node.dependence == Dependence::Dependent) shared_prop = true;
  }
  CHECK(members == 3);
  CHECK(shared_prop);
}

TEST_CASE("semantic annotations parse after the semicolon") {
  auto s = parse_ok("At 8am (Cac;ctx:tim) farmers (A) must (D) log (I) temperatures (Bdir).");
  const Component& cac = component(*s, ComponentCode::Cac);
  REQUIRE(cac.annotations.size() == 1);
  CHECK(cac.annotations[0].prefix == "ctx");
  CHECK(cac.annotations[0].label == "tim");
  CHECK_FALSE(cac.annotations[0].has_value());

  SUBCASE("reference annotations carry a value") {
    auto t = parse_ok("Organizations (E) are (F) entities (P;polref=Section/16-107.5).");
    const Component& p = component(*t, ComponentCode::P);
    REQUIRE(p.annotations.size() == 1);
    CHECK(p.annotations[0].prefix == "polref");
    CHECK(p.annotations[0].value == "Section/16-107.5");
  }
}

TEST_CASE("nested component statements parse from braces") {
  auto s = parse_ok(
      "Organic farmers (A) may (D) sell (I) their produce (Bdir) under the condition that "
      "{ organic farmers (A) apply (I) for certification (Bdir) } (Cac).");
  const Component& cac = component(*s, ComponentCode::Cac);
  REQUIRE(cac.nested != nullptr);
  CHECK(is_atomic(*cac.nested));
  CHECK(component(*cac.nested, ComponentCode::I).text == "apply");
}

TEST_CASE("statement combinations, negation and or else") {
  auto s = parse_ok("( Farmers (A) must (D) report (I). ) [AND] ( Inspectors (A) must (D) verify (I). )");
  const auto& combo = std::get<Combination>(s->node);
  CHECK(combo.op == LogicalOperator::And);
  REQUIRE(combo.operands.size() == 2);

  SUBCASE("statement negation") {
    auto t = parse_ok("[NOT] ( Farmers (A) may (D) burn (I) waste (Bdir). )");
    CHECK(std::holds_alternative<Negation>(t->node));
  }

  SUBCASE("or else attaches the consequence") {
    auto t = parse_ok(
        "Farmers (A) must (D) comply (I) OR ELSE the certifier (A) must (D) revoke (I) "
        "certification (Bdir).");
    const auto& oe = std::get<OrElse>(t->node);
    CHECK(is_atomic(*oe.monitored));
    CHECK(is_atomic(*oe.consequential));
  }

  SUBCASE("or else chains nest on the consequential side") {
    auto t = parse_ok(
        "A (A) must (D) act (I) OR ELSE B (A) must (D) fine (I) A (Bdir) OR ELSE C (A) must (D) "
        "sue (I) B (Bdir).");
    const auto& outer = std::get<OrElse>(t->node);
    CHECK(std::holds_alternative<OrElse>(outer.consequential->node));
  }
}

TEST_CASE("component alternatives keep their operator") {
  auto s = parse_ok("The producer (A) must (D) establish (I) [AND] maintain (I) records (Bdir).");
  const Component& second = component(*s, ComponentCode::I, 1);
  CHECK(second.sibling_op == LogicalOperator::And);
  CHECK(second.op_explicit);
  CHECK_FALSE(is_atomic(*s));
}

TEST_CASE("parse errors are diagnostics, not exceptions") {
  SUBCASE("unknown component code") {
    // Annotation structure (modifiers, semantics) marks coder intent; a bare
    // capitalized word in parens stays prose so acronyms survive.
    ParseResult r = parse_statement("Farmers (Q,prop) act (I).");
    CHECK(!r.ok());
    CHECK(std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                      [](const Diagnostic& d) { return d.code == "UnknownCode"; }));
    ParseResult acro = parse_statement("The Department (USDA) inspectors (A) must (D) act (I).");
    CHECK(acro.ok());
  }
  SUBCASE("unbalanced delimiters") {
    ParseResult r = parse_statement(
        "Farmers (A) must (D) act (I) that { inspectors (A) check (I) (Bdir).");
    CHECK(!r.ok());
    CHECK(std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                      [](const Diagnostic& d) { return d.code == "UnbalancedDelimiter"; }));
  }
  SUBCASE("or else without a consequence") {
    ParseResult r = parse_statement("Farmers (A) must (D) act (I) OR ELSE");
    CHECK(!r.ok());
    CHECK(std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                      [](const Diagnostic& d) { return d.code == "DanglingOrElse"; }));
  }
  SUBCASE("empty input") {
    ParseResult r = parse_statement("   ");
    CHECK(!r.ok());
  }
  SUBCASE("diagnostics carry spans into the source") {
    std::string text = "Farmers (Q,prop) act (I).";
    ParseResult r = parse_statement(text);
    bool spanned = false;
    for (const Diagnostic& d : r.diagnostics) {
      if (d.code != "UnknownCode" || !d.span) continue;
      spanned = true;
      CHECK(d.span->offset < text.size());
      CHECK(d.span->offset + d.span->length <= text.size());
    }
    CHECK(spanned);
  }
}

TEST_CASE("prose parentheses are not mistaken for annotations") {
  auto s = parse_ok("The producer (A) must (D) follow (I) section 205.239(b) of this chapter (Bdir).");
  CHECK(component(*s, ComponentCode::Bdir).text == "section 205.239(b) of this chapter");
}

TEST_CASE("serialize emits canonical shorthand") {
  auto s = parse_ok("Organic  farmers (A)  must (D) commit (I)   to standards (Bdir).");
  CHECK(serialize(s) == "Organic farmers (A) must (D) commit (I) to standards (Bdir).");

  SUBCASE("implied components never serialize") {
    CHECK(serialize(s).find(std::string(kImpliedActivationText)) == std::string::npos);
  }
}

TEST_CASE("round-trip stability on generated trees") {
  igtest::Rng rng(48151623);
  igtest::GenOptions opt;
  opt.semantic = true;
  opt.alternatives = true;
  for (int k = 0; k < 150; ++k) {
    auto t = igtest::random_statement(rng, opt);
    std::string text = serialize(t);
    ParseResult r = parse_statement(text);
    REQUIRE_MESSAGE(r.ok(), "failed to reparse: ", text);
    INFO("text: ", text);
    CHECK(*r.statement == *t);
  }
}

TEST_CASE("documents split on blank lines and keep ids") {
  std::string doc =
      "ID: one\n"
      "Farmers (A) must (D) report (I).\n"
      "\n"
      "Inspectors (A) must (D) verify (I).\n";
  auto records = parse_document(doc);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "one");
  CHECK(records[1].id == "stmt-2");
  CHECK(records[0].ok());
  CHECK(records[1].ok());

  SUBCASE("ALT lines carry the paired coding") {
    std::string poly =
        "ID: pair\n"
        "Members (E) may not (M,NOT) be disqualified (F) for profit (P).\n"
        "ALT: [Authority] (A) must not (D,NOT) disqualify (I) members (Bdir).\n";
    auto recs = parse_document(poly);
    REQUIRE(recs.size() == 1);
    REQUIRE(recs[0].alternate != nullptr);
    CHECK(classify(*recs[0].parsed) == StatementKind::Constitutive);
    CHECK(classify(*recs[0].alternate) == StatementKind::Regulative);
  }

  SUBCASE("duplicate ids are flagged") {
    std::string dup =
        "ID: same\nFarmers (A) must (D) report (I).\n\n"
        "ID: same\nInspectors (A) must (D) verify (I).\n";
    auto recs = parse_document(dup);
    REQUIRE(recs.size() == 2);
    CHECK(std::any_of(recs[1].diagnostics.begin(), recs[1].diagnostics.end(),
                      [](const Diagnostic& d) { return d.code == "DuplicateRecordId"; }));
  }
}

TEST_CASE("golden corpus parses clean and serializes stably") {
  std::string doc = slurp(std::string(IGKIT_TEST_DATA_DIR) + "/golden.ig");
  auto records = parse_document(doc);
  CHECK(records.size() >= 12);
  for (const SourceRecord& rec : records) {
    INFO("record ", rec.id);
    for (const Diagnostic& d : rec.diagnostics) {
      INFO(d.code, ": ", d.message);
      CHECK(d.severity != Severity::Error);
    }
    REQUIRE(rec.parsed != nullptr);
    std::string first = serialize(rec.parsed);
    ParseResult again = parse_statement(first);
    REQUIRE(again.ok());
    CHECK(serialize(again.statement) == first);
  }
}
