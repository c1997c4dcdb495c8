#include "sur/geojson.hpp"

namespace sur::data {

namespace {

using nlohmann::ordered_json;

ordered_json ring_coordinates(const geo::Ring& ring,
                              const geo::GeoPoint& origin) {
  ordered_json out = ordered_json::array();
  for (const geo::PlanarPoint& p : ring.vertices()) {
    const geo::GeoPoint g = geo::unproject(origin, p);
    out.push_back({g.lon, g.lat});
  }
  const geo::GeoPoint first = geo::unproject(origin, ring.vertices().front());
  out.push_back({first.lon, first.lat}); // rings are closed in GeoJSON
  return out;
}

// Construction normalizes the outer ring counter-clockwise and holes
// clockwise, which is exactly the right-hand rule GeoJSON asks for.
ordered_json polygon_geometry(const geo::AreaPolygon& poly,
                              const geo::GeoPoint& origin) {
  ordered_json coords = ordered_json::array();
  coords.push_back(ring_coordinates(poly.outer(), origin));
  for (const geo::Ring& hole : poly.holes()) {
    coords.push_back(ring_coordinates(hole, origin));
  }
  return {{"type", "Polygon"}, {"coordinates", std::move(coords)}};
}

ordered_json point_feature(const SurObservation& obs) {
  ordered_json props;
  props["role"] = "observation";
  props["id"] = obs.id;
  props["sur_types"] = obs.sur_types;
  if (obs.heading_deg.has_value()) props["heading"] = *obs.heading_deg;
  if (obs.image_path.has_value()) props["image"] = *obs.image_path;
  return {{"type", "Feature"},
          {"geometry",
           {{"type", "Point"},
            {"coordinates", {obs.location.lon, obs.location.lat}}}},
          {"properties", std::move(props)}};
}

ordered_json tags_json(const osm::TagMap& tags) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : tags) out[k] = v;
  return out;
}

} // namespace

ordered_json export_geojson(
    const SurObservation& observation,
    const std::vector<ensemble::ScoredCandidate>& ranked,
    const geo::GeoPoint& origin, std::optional<std::size_t> chosen_index) {
  ordered_json features = ordered_json::array();
  features.push_back(point_feature(observation));

  const std::optional<std::size_t> chosen =
      chosen_index.has_value() ? chosen_index
      : ranked.empty()         ? std::nullopt
                               : std::optional<std::size_t>(0);

  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const ensemble::ScoredCandidate& sc = ranked[i];
    ordered_json props;
    props["role"] = "candidate";
    props["rank"] = i + 1;
    props["score"] = sc.total;
    props["provenance"] = sc.candidate.provenance.to_string();
    props["chosen"] = chosen.has_value() && *chosen == i;
    props["tags"] = tags_json(sc.candidate.tags);
    ordered_json weak = ordered_json::object();
    for (std::size_t k = 0; k < ensemble::kClassifierCount; ++k) {
      weak[std::string(ensemble::kClassifierNames[k])] =
          sc.weak_scores[k].value;
    }
    props["weak_scores"] = std::move(weak);
    features.push_back({{"type", "Feature"},
                        {"geometry", polygon_geometry(sc.candidate.geometry, origin)},
                        {"properties", std::move(props)}});
  }

  if (observation.ground_truth.has_value()) {
    const geo::AreaPolygon gt = *ground_truth_polygon(observation, origin);
    features.push_back({{"type", "Feature"},
                        {"geometry", polygon_geometry(gt, origin)},
                        {"properties", {{"role", "ground_truth"}}}});
  }

  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

ordered_json candidates_geojson(
    const geo::GeoPoint& center,
    const std::vector<osm::CandidatePolygon>& candidates) {
  ordered_json features = ordered_json::array();
  features.push_back(
      {{"type", "Feature"},
       {"geometry", {{"type", "Point"}, {"coordinates", {center.lon, center.lat}}}},
       {"properties", {{"role", "query"}}}});
  for (const osm::CandidatePolygon& cand : candidates) {
    features.push_back({{"type", "Feature"},
                        {"geometry", polygon_geometry(cand.geometry, center)},
                        {"properties",
                         {{"role", "candidate"},
                          {"provenance", cand.provenance.to_string()},
                          {"tags", tags_json(cand.tags)}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

} // namespace sur::data
