#include "igkit/profile.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace igkit {

namespace {

constexpr std::array<std::pair<Feature, const char*>, 29> kFeatureNames{{
  {Feature::A, "A"},
  {Feature::B, "B"},
  {Feature::Bdir, "Bdir"},
  {Feature::Bind, "Bind"},
  {Feature::D, "D"},
  {Feature::I, "I"},
  {Feature::C, "C"},
  {Feature::Cac, "Cac"},
  {Feature::Cex, "Cex"},
  {Feature::O, "O"},
  {Feature::P, "P"},
  {Feature::M, "M"},
  {Feature::E, "E"},
  {Feature::F, "F"},
  {Feature::A_Ext, "A_Ext"},
  {Feature::B_Ext, "B_Ext"},
  {Feature::Bdir_Ext, "Bdir_Ext"},
  {Feature::Bind_Ext, "Bind_Ext"},
  {Feature::C_Ext, "C_Ext"},
  {Feature::Cac_Ext, "Cac_Ext"},
  {Feature::Cex_Ext, "Cex_Ext"},
  {Feature::P_Ext, "P_Ext"},
  {Feature::E_Ext, "E_Ext"},
  {Feature::R, "R"},
  {Feature::L, "L"},
  {Feature::S, "S"},
  {Feature::U, "U"},
  {Feature::U_reg, "U_reg"},
  {Feature::U_con, "U_con"},
}};

Diagnostic error(std::string code, std::string message) {
  Diagnostic d;
  d.severity = Severity::Error;
  d.code = std::move(code);
  d.message = std::move(message);
  return d;
}

}  // namespace

std::string to_string(Feature feature) {
  for (const auto& [f, name] : kFeatureNames) {
    if (f == feature) return name;
  }
  return "?";
}

std::optional<Feature> feature_from_string(std::string_view text) {
  for (const auto& [f, name] : kFeatureNames) {
    if (text == name) return f;
  }
  return std::nullopt;
}

const std::vector<Feature>& specializations(Feature feature) {
  static const std::vector<Feature> b{Feature::Bdir, Feature::Bind};
  static const std::vector<Feature> c{Feature::Cac, Feature::Cex};
  static const std::vector<Feature> b_ext{Feature::Bdir_Ext, Feature::Bind_Ext};
  static const std::vector<Feature> c_ext{Feature::Cac_Ext, Feature::Cex_Ext};
  static const std::vector<Feature> u{Feature::U_reg, Feature::U_con};
  static const std::vector<Feature> none;
  switch (feature) {
    case Feature::B: return b;
    case Feature::C: return c;
    case Feature::B_Ext: return b_ext;
    case Feature::C_Ext: return c_ext;
    case Feature::U: return u;
    default: return none;
  }
}

std::optional<Feature> general_feature(Feature feature) {
  switch (feature) {
    case Feature::Bdir:
    case Feature::Bind: return Feature::B;
    case Feature::Cac:
    case Feature::Cex: return Feature::C;
    case Feature::Bdir_Ext:
    case Feature::Bind_Ext: return Feature::B_Ext;
    case Feature::Cac_Ext:
    case Feature::Cex_Ext: return Feature::C_Ext;
    case Feature::U_reg:
    case Feature::U_con: return Feature::U;
    default: return std::nullopt;
  }
}

std::optional<Feature> ext_variant(Feature feature) {
  switch (feature) {
    case Feature::A: return Feature::A_Ext;
    case Feature::B: return Feature::B_Ext;
    case Feature::Bdir: return Feature::Bdir_Ext;
    case Feature::Bind: return Feature::Bind_Ext;
    case Feature::C: return Feature::C_Ext;
    case Feature::Cac: return Feature::Cac_Ext;
    case Feature::Cex: return Feature::Cex_Ext;
    case Feature::P: return Feature::P_Ext;
    case Feature::E: return Feature::E_Ext;
    default: return std::nullopt;
  }
}

FeatureSet baseline_features(Level level) {
  FeatureSet features{Feature::A, Feature::B, Feature::D, Feature::I, Feature::C,
            Feature::O, Feature::P, Feature::M, Feature::E, Feature::F};
  if (level == Level::Core) return features;
  features.insert({Feature::A_Ext, Feature::B_Ext, Feature::C_Ext, Feature::P_Ext,
                   Feature::E_Ext});
  if (level == Level::Extended) return features;
  features.insert({Feature::R, Feature::L, Feature::S, Feature::U});
  return features;
}

namespace {

// Replaces a general symbol by its specializations so one of them can be
// removed while the siblings stay.
void split_general(FeatureSet& set, Feature general) {
  set.erase(general);
  for (Feature spec : specializations(general)) set.insert(spec);
}

bool remove_feature(FeatureSet& set, Feature feature) {
  std::vector<Feature> variants;
  if (auto ext = ext_variant(feature)) variants.push_back(*ext);
  variants.push_back(feature);
  for (Feature variant : variants) {
    if (set.count(variant)) {
      set.erase(variant);
      return true;
    }
    if (auto general = general_feature(variant); general && set.count(*general)) {
      split_general(set, *general);
      set.erase(variant);
      return true;
    }
  }
  return false;
}

}  // namespace

ExpandResult expand_features(Level baseline, const std::vector<Feature>& removed,
                             const std::vector<Feature>& added) {
  ExpandResult result;
  result.features = baseline_features(baseline);
  for (Feature feature : removed) {
    if (!remove_feature(result.features, feature)) {
      result.diagnostics.push_back(
        error("RemovalNotInBaseline", "'" + to_string(feature) +
                                          "' is not part of the IG " +
                                          to_string(baseline) + " baseline"));
    }
  }
  for (Feature feature : added) {
    bool present = result.features.count(feature) > 0;
    if (auto general = general_feature(feature)) present |= result.features.count(*general) > 0;
    if (std::find(removed.begin(), removed.end(), feature) != removed.end()) {
      result.diagnostics.push_back(
        error("AdditionAlreadyPresent",
              "'" + to_string(feature) + "' appears on both sides of the profile"));
    } else if (present) {
      result.diagnostics.push_back(error(
        "AdditionAlreadyPresent",
        "'" + to_string(feature) + "' is already covered by the profile"));
    } else {
      result.features.insert(feature);
    }
  }
  return result;
}

namespace {

std::size_t match_feature_run(std::string_view text, std::size_t pos, Feature& out) {
  std::size_t best_len = 0;
  for (const auto& [f, name] : kFeatureNames) {
    std::string_view symbol = name;
    std::string comma_form;
    // The Ext suffix is printed both as "_Ext" and ",Ext".
    if (auto us = symbol.find("_Ext"); us != std::string_view::npos) {
      comma_form = std::string(symbol.substr(0, us)) + ",Ext";
    }
    for (std::string_view candidate : {symbol, std::string_view(comma_form)}) {
      if (candidate.empty() || candidate.size() <= best_len) continue;
      if (text.compare(pos, candidate.size(), candidate) == 0) {
        out = f;
        best_len = candidate.size();
      }
    }
  }
  return best_len;
}

bool parse_feature_run(std::string_view text, std::vector<Feature>& out,
                       std::vector<Diagnostic>& diagnostics) {
  if (text.empty()) {
    diagnostics.push_back(error("UnknownFeatureSymbol", "operator with no feature symbols"));
    return false;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    Feature feature{};
    std::size_t len = match_feature_run(text, pos, feature);
    if (len == 0) {
      diagnostics.push_back(error("UnknownFeatureSymbol",
                    "cannot read a feature symbol at '" +
                      std::string(text.substr(pos)) + "'"));
      return false;
    }
    out.push_back(feature);
    pos += len;
  }
  return true;
}

}  // namespace

ProfileResult parse_profile(std::string_view expr) {
  ProfileResult result;
  std::string_view rest = expr;
  const auto trim = [](std::string_view& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  };
  trim(rest);
  if (rest.substr(0, 2) == "IG") {
    rest.remove_prefix(2);
    trim(rest);
  }

  std::size_t cut = rest.find_first_of("-+");
  std::string_view level_word = rest.substr(0, cut == std::string_view::npos ? rest.size() : cut);
  trim(level_word);
  auto level = level_from_string(level_word);
  if (!level) {
    result.diagnostics.push_back(
      error("UnknownBaseline", "'" + std::string(level_word) + "' is not a coding level"));
    return result;
  }

  Profile profile;
  profile.baseline = *level;
  std::string_view tail = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut);
  if (!tail.empty() && tail.front() == '-') {
    tail.remove_prefix(tail.size() > 1 && tail[1] == '-' ? 2 : 1);
    std::size_t plus = tail.find('+');
    std::string_view run = tail.substr(0, plus == std::string_view::npos ? tail.size() : plus);
    tail = plus == std::string_view::npos ? std::string_view{} : tail.substr(plus);
    if (!parse_feature_run(run, profile.removed, result.diagnostics)) return result;
  }
  if (!tail.empty() && tail.front() == '+') {
    tail.remove_prefix(1);
    if (!parse_feature_run(tail, profile.added, result.diagnostics)) return result;
  }

  ExpandResult expanded = expand_features(profile.baseline, profile.removed, profile.added);
  result.diagnostics.insert(result.diagnostics.end(), expanded.diagnostics.begin(),
                            expanded.diagnostics.end());
  if (!expanded.ok()) return result;
  profile.expanded = std::move(expanded.features);
  result.profile = std::move(profile);
  return result;
}

std::string format_profile(const Profile& profile) {
  std::ostringstream out;
  out << "IG " << to_string(profile.baseline);
  const auto emit = [&out](char sep, std::vector<Feature> features) {
    if (features.empty()) return;
    std::sort(features.begin(), features.end());
    out << sep;
    for (Feature f : features) out << to_string(f);
  };
  emit('-', profile.removed);
  emit('+', profile.added);
  return out.str();
}

bool feature_set_includes(const FeatureSet& set, Feature feature) {
  if (set.count(feature)) return true;
  if (auto general = general_feature(feature); general && set.count(*general)) return true;
  for (Feature spec : specializations(feature)) {
    if (set.count(spec)) return true;
  }
  return false;
}

bool profile_includes(const Profile& profile, Feature feature) {
  return feature_set_includes(profile.expanded, feature);
}

}  // namespace igkit
