#include <fstream>
#include <set>

#include "sur/dataset.hpp"

namespace sur::data {

namespace {

using nlohmann::json;

std::vector<geo::GeoPoint> parse_geojson_ring(const json& ring) {
  if (!ring.is_array() || ring.size() < 4) {
    throw InvalidInputError("ground_truth: ring needs at least 4 positions");
  }
  std::vector<geo::GeoPoint> out;
  out.reserve(ring.size());
  for (const json& pos : ring) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
        !pos[1].is_number()) {
      throw InvalidInputError("ground_truth: position must be [lon, lat]");
    }
    out.push_back(geo::GeoPoint{pos[1].get<double>(), pos[0].get<double>()});
  }
  // GeoJSON rings repeat the first position; we store them open.
  const geo::GeoPoint& first = out.front();
  const geo::GeoPoint& last = out.back();
  if (first.lat == last.lat && first.lon == last.lon) out.pop_back();
  return out;
}

json ring_to_geojson(const std::vector<geo::GeoPoint>& ring) {
  json out = json::array();
  for (const geo::GeoPoint& p : ring) out.push_back({p.lon, p.lat});
  out.push_back({ring.front().lon, ring.front().lat}); // close
  return out;
}

} // namespace

void validate_observation(const SurObservation& obs) {
  if (obs.id.empty()) throw InvalidInputError("sample: empty id");
  if (!obs.location.is_valid()) {
    throw InvalidInputError("sample " + obs.id + ": invalid coordinates");
  }
  if (obs.sur_types.empty()) {
    throw InvalidInputError("sample " + obs.id + ": sur_types must not be empty");
  }
  for (const std::string& t : obs.sur_types) {
    if (t.empty()) {
      throw InvalidInputError("sample " + obs.id + ": empty SUR type");
    }
  }
  if (obs.heading_deg.has_value() &&
      !(*obs.heading_deg >= 0.0 && *obs.heading_deg < 360.0)) {
    throw InvalidInputError("sample " + obs.id +
                            ": heading must be in [0, 360)");
  }
  if (obs.ground_truth.has_value()) {
    if (obs.ground_truth->empty()) {
      throw InvalidInputError("sample " + obs.id + ": empty ground truth");
    }
    ground_truth_polygon(obs, obs.location); // validates ring geometry
  }
}

std::optional<geo::AreaPolygon> ground_truth_polygon(
    const SurObservation& obs, const geo::GeoPoint& origin) {
  if (!obs.ground_truth.has_value()) return std::nullopt;
  auto project_ring = [&origin](const std::vector<geo::GeoPoint>& ring) {
    std::vector<geo::PlanarPoint> pts;
    pts.reserve(ring.size());
    for (const geo::GeoPoint& p : ring) pts.push_back(geo::project(origin, p));
    return geo::Ring(std::move(pts));
  };
  const auto& rings = *obs.ground_truth;
  geo::Ring outer = project_ring(rings.front());
  std::vector<geo::Ring> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) {
    holes.push_back(project_ring(rings[i]));
  }
  return geo::AreaPolygon(std::move(outer), std::move(holes));
}

SurObservation parse_sample(const nlohmann::json& record,
                            const std::filesystem::path& base_dir) {
  if (!record.is_object()) throw InvalidInputError("sample: not an object");

  SurObservation obs;
  obs.id = record.value("id", std::string{});
  if (!record.contains("lat") || !record.contains("lon") ||
      !record["lat"].is_number() || !record["lon"].is_number()) {
    throw InvalidInputError("sample " + obs.id + ": missing lat/lon");
  }
  obs.location =
      geo::GeoPoint{record["lat"].get<double>(), record["lon"].get<double>()};

  if (record.contains("sur_types")) {
    if (!record["sur_types"].is_array()) {
      throw InvalidInputError("sample " + obs.id + ": sur_types must be a list");
    }
    for (const json& t : record["sur_types"]) {
      if (!t.is_string()) {
        throw InvalidInputError("sample " + obs.id +
                                ": SUR types must be strings");
      }
      obs.sur_types.push_back(t.get<std::string>());
    }
  }

  if (record.contains("heading")) {
    if (!record["heading"].is_number()) {
      throw InvalidInputError("sample " + obs.id + ": heading must be a number");
    }
    obs.heading_deg = record["heading"].get<double>();
  }

  if (record.contains("image")) {
    if (!record["image"].is_string()) {
      throw InvalidInputError("sample " + obs.id + ": image must be a path");
    }
    obs.image_path =
        (base_dir / record["image"].get<std::string>()).string();
  }

  if (record.contains("ground_truth")) {
    const json& gt = record["ground_truth"];
    if (!gt.is_object() || gt.value("type", "") != "Polygon" ||
        !gt.contains("coordinates") || !gt["coordinates"].is_array() ||
        gt["coordinates"].empty()) {
      throw InvalidInputError("sample " + obs.id +
                              ": ground_truth must be a GeoJSON Polygon");
    }
    std::vector<std::vector<geo::GeoPoint>> rings;
    for (const json& ring : gt["coordinates"]) {
      rings.push_back(parse_geojson_ring(ring));
    }
    obs.ground_truth = std::move(rings);
  }

  validate_observation(obs);
  return obs;
}

nlohmann::json sample_to_json(const SurObservation& obs) {
  json record;
  record["id"] = obs.id;
  record["lat"] = obs.location.lat;
  record["lon"] = obs.location.lon;
  record["sur_types"] = obs.sur_types;
  if (obs.heading_deg.has_value()) record["heading"] = *obs.heading_deg;
  if (obs.image_path.has_value()) record["image"] = *obs.image_path;
  if (obs.ground_truth.has_value()) {
    json coords = json::array();
    for (const auto& ring : *obs.ground_truth) {
      coords.push_back(ring_to_geojson(ring));
    }
    record["ground_truth"] = {{"type", "Polygon"},
                              {"coordinates", std::move(coords)}};
  }
  return record;
}

LoadResult load_dataset(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw DataError("dataset manifest not found: " + manifest_path.string());
  }

  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ParseError("corrupt manifest " + manifest_path.string() + ": " +
                     e.what());
  }
  if (!manifest.is_object() || !manifest.contains("samples") ||
      !manifest["samples"].is_array()) {
    throw ParseError("manifest " + manifest_path.string() +
                     ": expected an object with a samples array");
  }

  LoadResult result;
  result.dataset.name =
      manifest.value("name", dir.filename().string());

  std::set<std::string> seen_ids;
  std::size_t index = 0;
  for (const json& record : manifest["samples"]) {
    std::string fallback = "samples[" + std::to_string(index) + "]";
    ++index;
    try {
      SurObservation obs = parse_sample(record, dir);
      if (!seen_ids.insert(obs.id).second) {
        throw InvalidInputError("duplicate sample id '" + obs.id + "'");
      }
      result.dataset.samples.push_back(std::move(obs));
    } catch (const Error& e) {
      std::string id = record.is_object()
                           ? record.value("id", fallback)
                           : fallback;
      result.skipped.push_back(SampleError{std::move(id), e.what()});
    }
  }
  return result;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["name"] = dataset.name;
  json samples = json::array();
  for (const SurObservation& obs : dataset.samples) {
    samples.push_back(sample_to_json(obs));
  }
  manifest["samples"] = std::move(samples);

  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out) {
    throw DataError("cannot write manifest: " + manifest_path.string());
  }
  out << manifest.dump(2) << '\n';
}

} // namespace sur::data
