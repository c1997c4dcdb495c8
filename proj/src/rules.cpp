#include <fstream>
#include <nlohmann/json.hpp>

#include "sur/rules.hpp"

namespace sur::clf {

namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void check_sur_key(const std::string& key, const std::filesystem::path& path) {
  if (key.empty()) {
    throw InvalidInputError(path.string() + ": empty SUR type key");
  }
  for (char c : key) {
    if (!(std::islower(static_cast<unsigned char>(c)) != 0 ||
          std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '_')) {
      throw InvalidInputError(path.string() + ": SUR type '" + key +
                              "' must be lowercase snake_case");
    }
  }
}

} // namespace

TagPattern TagPattern::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw InvalidInputError("tag pattern '" + text +
                            "' must look like key=value");
  }
  return TagPattern{text.substr(0, eq), text.substr(eq + 1)};
}

bool TagPattern::matches(const osm::TagMap& tags) const {
  auto it = tags.find(key);
  if (it == tags.end()) return false;
  return value == "*" || it->second == value;
}

RuleSet RuleSet::load(const std::filesystem::path& description_json,
                      const std::filesystem::path& mapping_json) {
  RuleSet rules;

  const json desc = read_json_file(description_json);
  if (!desc.is_object()) {
    throw ParseError(description_json.string() + ": expected an object");
  }
  for (const auto& [sur, patterns] : desc.items()) {
    check_sur_key(sur, description_json);
    if (!patterns.is_array() || patterns.empty()) {
      throw InvalidInputError(description_json.string() + ": rule for '" +
                              sur + "' must be a non-empty pattern list");
    }
    std::vector<TagPattern> parsed;
    for (const json& p : patterns) {
      parsed.push_back(TagPattern::parse(p.get<std::string>()));
    }
    rules.description_rules.emplace(sur, std::move(parsed));
  }

  const json mapping = read_json_file(mapping_json);
  if (!mapping.is_object()) {
    throw ParseError(mapping_json.string() + ": expected an object");
  }
  for (const auto& [sur, pattern] : mapping.items()) {
    check_sur_key(sur, mapping_json);
    rules.mapping_rules.emplace(sur,
                                TagPattern::parse(pattern.get<std::string>()));
  }
  return rules;
}

std::string space_name(SpaceType space) {
  switch (space) {
    case SpaceType::kInside: return "inside";
    case SpaceType::kOutside: return "outside";
    case SpaceType::kUnknown: return "unknown";
  }
  return "?";
}

VisionRuleSet VisionRuleSet::load(const std::filesystem::path& vision_json) {
  const json doc = read_json_file(vision_json);
  if (!doc.is_object()) {
    throw ParseError(vision_json.string() + ": expected an object");
  }
  VisionRuleSet rules;
  for (const auto& [sur, spaces] : doc.items()) {
    check_sur_key(sur, vision_json);
    if (!spaces.is_object()) {
      throw InvalidInputError(vision_json.string() + ": entry for '" + sur +
                              "' must map inside/outside to a pattern");
    }
    for (const auto& [space, pattern] : spaces.items()) {
      SpaceType st;
      if (space == "inside") {
        st = SpaceType::kInside;
      } else if (space == "outside") {
        st = SpaceType::kOutside;
      } else {
        throw InvalidInputError(vision_json.string() + ": space '" + space +
                                "' must be inside or outside");
      }
      rules.entries[sur].emplace(st,
                                 TagPattern::parse(pattern.get<std::string>()));
    }
  }
  return rules;
}

std::optional<TagPattern> VisionRuleSet::find(const std::string& sur_type,
                                              SpaceType space) const {
  auto it = entries.find(sur_type);
  if (it == entries.end()) return std::nullopt;
  auto jt = it->second.find(space);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

ClassifierConstants ClassifierConstants::load(
    const std::filesystem::path& constants_json) {
  const json doc = read_json_file(constants_json);
  if (!doc.is_object()) {
    throw ParseError(constants_json.string() + ": expected an object");
  }
  ClassifierConstants c;
  auto get = [&doc](const char* key, double fallback) {
    return doc.contains(key) ? doc.at(key).get<double>() : fallback;
  };
  c.pip_inside = get("pip_inside", c.pip_inside);
  c.pip_outside = get("pip_outside", c.pip_outside);
  c.description_match = get("description_match", c.description_match);
  c.description_mismatch = get("description_mismatch", c.description_mismatch);
  c.mapping_match = get("mapping_match", c.mapping_match);
  c.mapping_mismatch = get("mapping_mismatch", c.mapping_mismatch);
  c.vision_match = get("vision_match", c.vision_match);
  c.vision_mismatch = get("vision_mismatch", c.vision_mismatch);
  c.orientation_in_view = get("orientation_in_view", c.orientation_in_view);
  c.orientation_behind = get("orientation_behind", c.orientation_behind);
  c.orientation_half_angle_deg =
      get("orientation_half_angle_deg", c.orientation_half_angle_deg);
  c.orientation_max_range_m =
      get("orientation_max_range_m", c.orientation_max_range_m);
  return c;
}

} // namespace sur::clf
