#ifndef SUR_CLASSIFIERS_HPP
#define SUR_CLASSIFIERS_HPP

#include "sur/dataset.hpp"
#include "sur/osm.hpp"
#include "sur/rules.hpp"

// The weak classifiers. Each maps (observation context, candidate polygon)
// to a score in [-100, 100] with zero neutral. All of them are pure
// functions over immutable inputs and therefore thread-safe.

namespace sur::clf {

inline constexpr double kScoreMax = 100.0;
inline constexpr double kScoreMin = -100.0;

struct WeakScore {
  double value = 0.0;
};

WeakScore clamp_score(double value);

// Per-observation scoring context. Candidates are expected in the local
// frame centered on the observation (the projection origin).
struct ScoreContext {
  data::SurObservation observation;
  geo::GeoPoint origin; // always == observation.location
  double candidate_radius_m = osm::kDefaultCandidateRadiusM;
  SpaceType indoor_outdoor = SpaceType::kUnknown;

  static ScoreContext make(data::SurObservation observation,
                           double candidate_radius_m = osm::kDefaultCandidateRadiusM,
                           SpaceType indoor_outdoor = SpaceType::kUnknown);
};

// Distance classifiers: linear from +100 at d=0 to -100 at d=radius, clamped.
WeakScore score_dist_centroid(const ScoreContext& ctx,
                              const osm::CandidatePolygon& candidate);
WeakScore score_dist_edge(const ScoreContext& ctx,
                          const osm::CandidatePolygon& candidate);
WeakScore score_dist_vertex(const ScoreContext& ctx,
                            const osm::CandidatePolygon& candidate);

// Exactly two-valued: contains -> pip_inside, else pip_outside.
WeakScore score_point_in_polygon(const ScoreContext& ctx,
                                 const osm::CandidatePolygon& candidate,
                                 const ClassifierConstants& constants);

// Per SUR type of the observation: match -> reward, ruled mismatch ->
// penalty, no rule -> 0; the score is the mean over the SUR types.
WeakScore score_sur_description(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const RuleSet& rules,
                                const ClassifierConstants& constants);
WeakScore score_sur_osm_mapping(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const RuleSet& rules,
                                const ClassifierConstants& constants);

// View-cone test along the camera heading: any vertex or the centroid in
// the cone -> reward; polygon entirely behind the camera -> penalty;
// no heading -> 0.
WeakScore score_orientation(const ScoreContext& ctx,
                            const osm::CandidatePolygon& candidate,
                            const ClassifierConstants& constants);

// Deterministic color heuristic on a 4x4 grid: sky-like upper cells plus
// vegetation-green cells count as outdoor evidence. No image or an
// undecodable image yields kUnknown (never an error).
SpaceType classify_indoor_outdoor(const std::optional<std::string>& image_path,
                                  std::string* diagnostic = nullptr);

// Tag check against the (sur_type, inside|outside) vision rules; unknown
// space type is neutral.
WeakScore score_computer_vision(const ScoreContext& ctx,
                                const osm::CandidatePolygon& candidate,
                                const VisionRuleSet& rules,
                                const ClassifierConstants& constants);

} // namespace sur::clf

#endif // SUR_CLASSIFIERS_HPP
