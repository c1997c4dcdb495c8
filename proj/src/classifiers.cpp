#include <algorithm>
#include <cmath>

#include "sur/classifiers.hpp"

namespace sur::clf {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

double linear_distance_score(double distance_m, double radius_m) {
  return 100.0 - 200.0 * distance_m / radius_m;
}

// Shared aggregation of the tag-based classifiers: per SUR type the rule
// lookup yields match/mismatch/neutral, the final score is the mean over
// all SUR types of the observation.
template <typename PerSur>
WeakScore mean_over_sur_types(const std::vector<std::string>& sur_types,
                              PerSur&& contribution) {
  if (sur_types.empty()) return WeakScore{0.0};
  double sum = 0.0;
  for (const std::string& sur : sur_types) sum += contribution(sur);
  return clamp_score(sum / static_cast<double>(sur_types.size()));
}

} // namespace

WeakScore clamp_score(double value) {
  return WeakScore{std::clamp(value, kScoreMin, kScoreMax)};
}

ScoreContext ScoreContext::make(data::SurObservation observation,
                                double candidate_radius_m,
                                SpaceType indoor_outdoor) {
  if (!(candidate_radius_m > 0.0)) {
    throw InvalidInputError("score context: radius must be positive");
  }
  ScoreContext ctx;
  ctx.origin = observation.location;
  ctx.observation = std::move(observation);
  ctx.candidate_radius_m = candidate_radius_m;
  ctx.indoor_outdoor = indoor_outdoor;
  return ctx;
}

WeakScore score_dist_centroid(const ScoreContext& ctx,
                              const osm::CandidatePolygon& candidate) {
  const double d = geo::distance(geo::centroid(candidate.geometry),
                                 geo::PlanarPoint{0.0, 0.0});
  return clamp_score(linear_distance_score(d, ctx.candidate_radius_m));
}

WeakScore score_dist_edge(const ScoreContext& ctx,
                          const osm::CandidatePolygon& candidate) {
  const double d =
      geo::min_dist_to_edges(candidate.geometry, geo::PlanarPoint{0.0, 0.0});
  return clamp_score(linear_distance_score(d, ctx.candidate_radius_m));
}

WeakScore score_dist_vertex(const ScoreContext& ctx,
                            const osm::CandidatePolygon& candidate) {
  const double d = geo::min_dist_to_vertices(candidate.geometry,
                                             geo::PlanarPoint{0.0, 0.0});
  return clamp_score(linear_distance_score(d, ctx.candidate_radius_m));
}

WeakScore score_point_in_polygon(const ScoreContext& /*ctx*/,
                                 const osm::CandidatePolygon& candidate,
                                 const ClassifierConstants& constants) {
  return geo::contains(candidate.geometry, geo::PlanarPoint{0.0, 0.0})
             ? WeakScore{constants.pip_inside}
             : WeakScore{constants.pip_outside};
}

WeakScore score_sur_description(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const RuleSet& rules,
                                const ClassifierConstants& constants) {
  return mean_over_sur_types(
      ctx.observation.sur_types, [&](const std::string& sur) {
        auto it = rules.description_rules.find(sur);
        if (it == rules.description_rules.end()) return 0.0;
        for (const TagPattern& p : it->second) {
          if (p.matches(candidate.tags)) return constants.description_match;
        }
        return constants.description_mismatch;
      });
}

WeakScore score_sur_osm_mapping(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const RuleSet& rules,
                                const ClassifierConstants& constants) {
  return mean_over_sur_types(
      ctx.observation.sur_types, [&](const std::string& sur) {
        auto it = rules.mapping_rules.find(sur);
        if (it == rules.mapping_rules.end()) return 0.0;
        return it->second.matches(candidate.tags) ? constants.mapping_match
                                                  : constants.mapping_mismatch;
      });
}

WeakScore score_orientation(const ScoreContext& ctx,
                            const osm::CandidatePolygon& candidate,
                            const ClassifierConstants& constants) {
  if (!ctx.observation.heading_deg.has_value()) return WeakScore{0.0};

  // Heading is degrees clockwise from north: north = +y, east = +x.
  const double heading_rad = *ctx.observation.heading_deg * kDegToRad;
  const double dir_x = std::sin(heading_rad);
  const double dir_y = std::cos(heading_rad);
  const double cos_half =
      std::cos(constants.orientation_half_angle_deg * kDegToRad);

  bool any_in_cone = false;
  bool all_behind = true;
  auto inspect = [&](const geo::PlanarPoint& p, bool is_vertex) {
    const double r = std::hypot(p.x, p.y);
    const double along = p.x * dir_x + p.y * dir_y;
    if (r <= 1e-9) {
      any_in_cone = true; // the camera stands on this point
      if (is_vertex) all_behind = false;
      return;
    }
    if (r <= constants.orientation_max_range_m && along >= cos_half * r) {
      any_in_cone = true;
    }
    if (is_vertex && along >= 0.0) all_behind = false;
  };

  for (const geo::PlanarPoint& v : candidate.geometry.outer().vertices()) {
    inspect(v, true);
  }
  for (const geo::Ring& h : candidate.geometry.holes()) {
    for (const geo::PlanarPoint& v : h.vertices()) inspect(v, true);
  }
  inspect(geo::centroid(candidate.geometry), false);

  if (any_in_cone) return clamp_score(constants.orientation_in_view);
  if (all_behind) return clamp_score(constants.orientation_behind);
  return WeakScore{0.0};
}

WeakScore score_computer_vision(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const VisionRuleSet& rules,
                                const ClassifierConstants& constants) {
  if (ctx.indoor_outdoor == SpaceType::kUnknown) return WeakScore{0.0};
  return mean_over_sur_types(
      ctx.observation.sur_types, [&](const std::string& sur) {
        const std::optional<TagPattern> rule =
            rules.find(sur, ctx.indoor_outdoor);
        if (!rule.has_value()) return 0.0;
        return rule->matches(candidate.tags) ? constants.vision_match
                                             : constants.vision_mismatch;
      });
}

} // namespace sur::clf
