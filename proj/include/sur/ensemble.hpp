#ifndef SUR_ENSEMBLE_HPP
#define SUR_ENSEMBLE_HPP

#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string_view>

#include "sur/classifiers.hpp"

// The strong classifier: weighted sum of the weak scores, argmax over the
// candidate set, and the fitness function the trainer optimizes.

namespace sur::ensemble {

inline constexpr std::size_t kClassifierCount = 8;
inline constexpr double kMaxWeight = 10.0;

enum class Classifier : std::size_t {
  kDistCentroid = 0,
  kDistEdge = 1,
  kDistVertex = 2,
  kPointInPolygon = 3,
  kSurDescription = 4,
  kSurOsmMapping = 5,
  kOrientation = 6,
  kComputerVision = 7,
};

inline constexpr std::array<std::string_view, kClassifierCount>
    kClassifierNames = {"dist_centroid",   "dist_edge",
                        "dist_vertex",     "point_in_polygon",
                        "sur_description", "sur_osm_mapping",
                        "orientation",     "computer_vision"};

// One nonnegative weight per weak classifier, at least one positive, all
// capped at kMaxWeight. The genome of the genetic algorithm.
class WeightVector {
public:
  explicit WeightVector(std::array<double, kClassifierCount> weights);

  static WeightVector equal(); // all ones
  static WeightVector one_hot(Classifier which, double weight = 1.0);

  const std::array<double, kClassifierCount>& values() const {
    return weights_;
  }
  double operator[](Classifier which) const {
    return weights_[static_cast<std::size_t>(which)];
  }
  double operator[](std::size_t i) const { return weights_[i]; }

  // Ordered classifier-name -> weight map; `load` accepts either that map
  // directly or a document with a "weights" member.
  nlohmann::ordered_json to_json() const;
  static WeightVector from_json(const nlohmann::json& doc);
  static WeightVector load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path,
            const nlohmann::json& provenance = {}) const;

private:
  std::array<double, kClassifierCount> weights_;
};

// Reported weights for the six classifiers with published values;
// point_in_polygon and orientation default to 1.0 (unreported upstream).
WeightVector default_weights();

struct ScoredCandidate {
  osm::CandidatePolygon candidate;
  std::array<clf::WeakScore, kClassifierCount> weak_scores;
  double total = 0.0;
  // Cached tie-break inputs.
  bool contains_observation = false;
  double area_m2 = 0.0;
};

// Deterministic ranking: total descending, then candidates containing the
// observation first, then smaller area, then ascending provenance id.
bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b);

// Bundles the rule data and constants behind the eight classifiers.
class ScoringEngine {
public:
  ScoringEngine(clf::RuleSet rules, clf::VisionRuleSet vision_rules,
                clf::ClassifierConstants constants);

  // Loads description.json, mapping.json, vision.json and constants.json
  // from a rules directory.
  static ScoringEngine load(const std::filesystem::path& rules_dir);

  std::array<clf::WeakScore, kClassifierCount> weak_scores(
      const clf::ScoreContext& ctx, const osm::CandidatePolygon& candidate) const;

  // Every candidate scored by all classifiers, sorted best-first.
  std::vector<ScoredCandidate> score_all(
      const clf::ScoreContext& ctx,
      const std::vector<osm::CandidatePolygon>& candidates,
      const WeightVector& weights) const;

  // Argmax of the weighted total; nullopt on an empty candidate set.
  std::optional<ScoredCandidate> select_polygon(
      const clf::ScoreContext& ctx,
      const std::vector<osm::CandidatePolygon>& candidates,
      const WeightVector& weights) const;

  // Argmax of a single weak classifier's score (same tie-break); the
  // baseline path for per-classifier evaluation rows.
  std::optional<ScoredCandidate> select_single(
      const clf::ScoreContext& ctx,
      const std::vector<osm::CandidatePolygon>& candidates,
      Classifier which) const;

  const clf::RuleSet& rules() const { return rules_; }
  const clf::VisionRuleSet& vision_rules() const { return vision_rules_; }
  const clf::ClassifierConstants& constants() const { return constants_; }

private:
  clf::RuleSet rules_;
  clf::VisionRuleSet vision_rules_;
  clf::ClassifierConstants constants_;
};

// Everything fitness evaluation needs, precomputed once per training run:
// weak scores, the intersection ratio against ground truth and the
// tie-break fields per (sample, candidate). Weak scores do not depend on
// the weights, so the genetic algorithm only recomputes weighted totals.
struct CachedCandidate {
  std::array<double, kClassifierCount> weak_scores{};
  double r = 0.0; // intersection ratio against the sample's ground truth
  bool contains_observation = false;
  double area_m2 = 0.0;
  int provenance_kind = 0;
  std::int64_t provenance_id = 0;
};

struct CachedSample {
  std::string id;
  std::vector<CachedCandidate> candidates;
};

struct TrainingCache {
  std::vector<CachedSample> samples;

  // Requires ground truth on every sample (DataError otherwise).
  static TrainingCache build(const data::Dataset& dataset,
                             const osm::OsmData& world,
                             const ScoringEngine& engine,
                             double candidate_radius_m = osm::kDefaultCandidateRadiusM);

  // Index of the candidate the weighted argmax picks, or -1 when empty.
  static std::ptrdiff_t select_index(const CachedSample& sample,
                                     const WeightVector& weights);
};

// Mean intersection ratio of the weighted selection over the samples;
// samples with no selectable candidate contribute 0. Always in [0, 1].
double fitness(const WeightVector& weights, const TrainingCache& cache);
double fitness(const WeightVector& weights, const data::Dataset& training,
               const osm::OsmData& world, const ScoringEngine& engine,
               double candidate_radius_m = osm::kDefaultCandidateRadiusM);

} // namespace sur::ensemble

#endif // SUR_ENSEMBLE_HPP
