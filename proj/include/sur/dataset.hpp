#ifndef SUR_DATASET_HPP
#define SUR_DATASET_HPP

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sur/geometry.hpp"

// Observation samples and their manifest format. A dataset directory holds
// one UTF-8 JSON manifest (manifest.json):
//
//   { "name": "...",
//     "samples": [ { "id": "...", "lat": .., "lon": ..,
//                    "sur_types": ["no_smoking", ...],
//                    "heading": 0-360 (optional),
//                    "image": "relative/path.jpg" (optional),
//                    "ground_truth": GeoJSON Polygon (optional) } ] }
//
// Datasets are immutable after load and safe for concurrent reads.

namespace sur::data {

// One point observation of a space usage rule.
struct SurObservation {
  std::string id;
  geo::GeoPoint location;
  std::vector<std::string> sur_types;    // non-empty, e.g. "no_smoking"
  std::optional<double> heading_deg;     // [0, 360) clockwise from north
  std::optional<std::string> image_path; // resolved against the dataset dir
  // Ground-truth polygon rings in WGS84; first ring outer, rest holes.
  std::optional<std::vector<std::vector<geo::GeoPoint>>> ground_truth;
};

// Throws InvalidInputError when a field violates its contract. Ring
// validity of the ground truth is checked by projecting and constructing
// the polygon.
void validate_observation(const SurObservation& obs);

// Ground truth projected into a local frame, or nullopt when absent.
std::optional<geo::AreaPolygon> ground_truth_polygon(
    const SurObservation& obs, const geo::GeoPoint& origin);

struct Dataset {
  std::string name;
  std::vector<SurObservation> samples;
};

struct SampleError {
  std::string sample_id; // id when present, else "samples[i]"
  std::string message;
};

struct LoadResult {
  Dataset dataset;
  std::vector<SampleError> skipped;
};

// Parses one sample record. `base_dir` anchors relative image paths.
SurObservation parse_sample(const nlohmann::json& record,
                            const std::filesystem::path& base_dir);
nlohmann::json sample_to_json(const SurObservation& obs);

// Loads a dataset directory. A missing or corrupt manifest is fatal
// (DataError/ParseError); an invalid sample is skipped and reported.
LoadResult load_dataset(const std::filesystem::path& dir);

// Writes dir/manifest.json. Coordinates survive a save/load round trip to
// within 1e-7 degrees.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

} // namespace sur::data

#endif // SUR_DATASET_HPP
