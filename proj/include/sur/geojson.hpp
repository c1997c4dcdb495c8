#ifndef SUR_GEOJSON_HPP
#define SUR_GEOJSON_HPP

#include "sur/ensemble.hpp"

// RFC 7946 GeoJSON export for inspection: the observation point, the ranked
// candidate polygons and the ground truth, back-projected to WGS84.

namespace sur::data {

// FeatureCollection with one Point feature for the observation, one Polygon
// feature per candidate (properties: score, rank, provenance, chosen) and
// the ground-truth polygon when present. `chosen_index` defaults to the
// top-ranked candidate.
nlohmann::ordered_json export_geojson(
    const SurObservation& observation,
    const std::vector<ensemble::ScoredCandidate>& ranked,
    const geo::GeoPoint& origin,
    std::optional<std::size_t> chosen_index = std::nullopt);

// Candidate set without scores (the `candidates` CLI output): the query
// point plus one Polygon feature per candidate.
nlohmann::ordered_json candidates_geojson(
    const geo::GeoPoint& center,
    const std::vector<osm::CandidatePolygon>& candidates);

} // namespace sur::data

#endif // SUR_GEOJSON_HPP
