#ifndef SUR_RULES_HPP
#define SUR_RULES_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sur/errors.hpp"
#include "sur/osm.hpp"

// Declarative SUR-to-tag knowledge consumed by the tag-based classifiers,
// plus the score constants of all classifiers. Everything here is plain
// editable data (see rules/ in the repo) and immutable after load.

namespace sur::clf {

// "key=value" pattern against an OSM tag map; value "*" matches any value.
struct TagPattern {
  std::string key;
  std::string value;

  static TagPattern parse(const std::string& text);
  bool matches(const osm::TagMap& tags) const;
  std::string to_string() const { return key + "=" + value; }
};

// description_rules: one-to-many (a SUR type may plausibly sit on several
// polygon types). mapping_rules: one-to-one (a SUR type that near-uniquely
// identifies its polygon type).
struct RuleSet {
  std::map<std::string, std::vector<TagPattern>> description_rules;
  std::map<std::string, TagPattern> mapping_rules;

  static RuleSet load(const std::filesystem::path& description_json,
                      const std::filesystem::path& mapping_json);
};

enum class SpaceType { kInside, kOutside, kUnknown };

std::string space_name(SpaceType space);

// (sur_type, inside|outside) -> expected polygon tag.
struct VisionRuleSet {
  std::map<std::string, std::map<SpaceType, TagPattern>> entries;

  static VisionRuleSet load(const std::filesystem::path& vision_json);
  std::optional<TagPattern> find(const std::string& sur_type,
                                 SpaceType space) const;
};

// Score constants for all classifiers, overridable via rules/constants.json
// (missing keys keep their defaults).
struct ClassifierConstants {
  double pip_inside = 100.0;
  double pip_outside = -75.0;
  double description_match = 100.0;
  double description_mismatch = -50.0;
  double mapping_match = 100.0;
  double mapping_mismatch = -75.0;
  double vision_match = 75.0;
  double vision_mismatch = -50.0;
  double orientation_in_view = 75.0;
  double orientation_behind = -50.0;
  double orientation_half_angle_deg = 30.0;
  double orientation_max_range_m = 500.0;

  static ClassifierConstants load(const std::filesystem::path& constants_json);
};

} // namespace sur::clf

#endif // SUR_RULES_HPP
