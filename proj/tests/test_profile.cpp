#include "doctest.h"

#include <igkit/profile.hpp>

using namespace igkit;

namespace {

FeatureSet fs(std::initializer_list<Feature> features) { return FeatureSet(features); }

}  // namespace

TEST_CASE("baseline feature sets grow monotonically with the level") {
  FeatureSet core = baseline_features(Level::Core);
  FeatureSet extended = baseline_features(Level::Extended);
  FeatureSet logico = baseline_features(Level::Logico);

  CHECK(core == fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::O,
                    Feature::P, Feature::M, Feature::E, Feature::F}));
  for (Feature f : core) CHECK(extended.count(f) == 1);
  for (Feature f : extended) CHECK(logico.count(f) == 1);
  CHECK(extended.count(Feature::A_Ext) == 1);
  CHECK(extended.count(Feature::C_Ext) == 1);
  CHECK(logico.count(Feature::R) == 1);
  CHECK(logico.count(Feature::L) == 1);
  CHECK(logico.count(Feature::S) == 1);
  CHECK(logico.count(Feature::U) == 1);
}

TEST_CASE("feature names round-trip") {
  for (Feature f : {Feature::A, Feature::Bdir, Feature::C_Ext, Feature::Cac_Ext, Feature::U_reg,
                    Feature::L, Feature::O}) {
    auto back = feature_from_string(to_string(f));
    REQUIRE(back.has_value());
    CHECK(*back == f);
  }
  CHECK_FALSE(feature_from_string("Z").has_value());
}

TEST_CASE("general symbols subsume their specializations") {
  CHECK(specializations(Feature::B) == std::vector<Feature>{Feature::Bdir, Feature::Bind});
  CHECK(specializations(Feature::C) == std::vector<Feature>{Feature::Cac, Feature::Cex});
  CHECK(specializations(Feature::A).empty());
  CHECK(general_feature(Feature::Bdir) == Feature::B);
  CHECK(general_feature(Feature::Cex) == Feature::C);
  CHECK_FALSE(general_feature(Feature::A).has_value());
  CHECK(ext_variant(Feature::B) == Feature::B_Ext);
  CHECK(ext_variant(Feature::Cac) == Feature::Cac_Ext);
  CHECK_FALSE(ext_variant(Feature::D).has_value());

  FeatureSet set = fs({Feature::B, Feature::C});
  CHECK(feature_set_includes(set, Feature::Bdir));
  CHECK(feature_set_includes(set, Feature::Cex));
  CHECK_FALSE(feature_set_includes(set, Feature::A));
  // A present specialization answers for its general symbol.
  CHECK(feature_set_includes(fs({Feature::Bdir}), Feature::B));
}

TEST_CASE("the published profile expressions expand to their glosses") {
  struct Case {
    const char* expr;
    const char* canonical;
    FeatureSet expected;
  };
  const FeatureSet core = baseline_features(Level::Core);
  const Case cases[] = {
      {"IG Core+C_Ext", "IG Core+C_Ext",
       fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::O, Feature::P,
           Feature::M, Feature::E, Feature::F, Feature::C_Ext})},
      {"IG Core--O", "IG Core-O",
       fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::P, Feature::M,
           Feature::E, Feature::F})},
      {"IG Core--IO", "IG Core-IO",
       fs({Feature::A, Feature::B, Feature::D, Feature::C, Feature::P, Feature::M, Feature::E,
           Feature::F})},
      {"IG Core+R", "IG Core+R",
       fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::O, Feature::P,
           Feature::M, Feature::E, Feature::F, Feature::R})},
      {"IG Extended-BCex+SU_reg", "IG Extended-BCex+SU_reg",
       fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::O, Feature::P,
           Feature::M, Feature::E, Feature::F, Feature::A_Ext, Feature::Cac_Ext, Feature::P_Ext,
           Feature::E_Ext, Feature::S, Feature::U_reg})},
      {"IG Logico-S", "IG Logico-S",
       fs({Feature::A, Feature::B, Feature::D, Feature::I, Feature::C, Feature::O, Feature::P,
           Feature::M, Feature::E, Feature::F, Feature::A_Ext, Feature::B_Ext, Feature::C_Ext,
           Feature::P_Ext, Feature::E_Ext, Feature::R, Feature::L, Feature::U})},
      {"IG Core-AI+C_ExtSU", "IG Core-AI+C_ExtSU",
       fs({Feature::B, Feature::D, Feature::C, Feature::O, Feature::P, Feature::M, Feature::E,
           Feature::F, Feature::C_Ext, Feature::S, Feature::U})},
  };
  for (const Case& c : cases) {
    INFO("expression: ", c.expr);
    auto r = parse_profile(c.expr);
    REQUIRE(r.ok());
    CHECK(format_profile(*r.profile) == c.canonical);
    CHECK(r.profile->expanded == c.expected);

    // parse . format is the identity on canonical text.
    auto again = parse_profile(format_profile(*r.profile));
    REQUIRE(again.ok());
    CHECK(format_profile(*again.profile) == c.canonical);
    CHECK(again.profile->expanded == r.profile->expanded);
  }
  auto plain = parse_profile("IG Core");
  REQUIRE(plain.ok());
  CHECK(plain.profile->expanded == core);
}

TEST_CASE("expand_features demotes before it deletes") {
  auto r = expand_features(Level::Extended, {Feature::B, Feature::Cex}, {});
  REQUIRE(r.ok());
  CHECK(r.features.count(Feature::B) == 1);        // base symbol survives
  CHECK(r.features.count(Feature::B_Ext) == 0);    // refinement removed
  CHECK(r.features.count(Feature::Cac_Ext) == 1);  // split keeps the sibling
  CHECK(r.features.count(Feature::Cex_Ext) == 0);
  CHECK(r.features.count(Feature::C) == 1);

  SUBCASE("removing twice deletes the base symbol") {
    auto rr = expand_features(Level::Extended, {Feature::B, Feature::B}, {});
    REQUIRE(rr.ok());
    CHECK(rr.features.count(Feature::B_Ext) == 0);
    CHECK(rr.features.count(Feature::B) == 0);
  }
}

TEST_CASE("profile parse failures carry diagnostics") {
  for (const char* bad : {"", "IG", "IG Full", "IG Core+Z", "IG Core-", "IG Core+"}) {
    INFO("expression: " << bad);
    auto r = parse_profile(bad);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.diagnostics.empty());
  }
}

TEST_CASE("alternate spellings normalize") {
  auto a = parse_profile("IG Core+C,Ext");
  REQUIRE(a.ok());
  CHECK(format_profile(*a.profile) == "IG Core+C_Ext");
  auto b = parse_profile("IG Core--O");
  REQUIRE(b.ok());
  CHECK(format_profile(*b.profile) == "IG Core-O");
  // The "IG " prefix is implied when only the level name is written.
  auto c = parse_profile("Core");
  REQUIRE(c.ok());
  CHECK(format_profile(*c.profile) == "IG Core");
}

TEST_CASE("profile_includes applies subsumption to the expansion") {
  auto r = parse_profile("IG Core+C_Ext");
  REQUIRE(r.ok());
  CHECK(profile_includes(*r.profile, Feature::Cac_Ext));
  CHECK(profile_includes(*r.profile, Feature::Bdir));
  CHECK_FALSE(profile_includes(*r.profile, Feature::S));
}
