#include <algorithm>
#include <cmath>
#include <fstream>

#include "sur/ensemble.hpp"
#include "sur/evaluation.hpp"

namespace sur::ensemble {

namespace {

struct RankKey {
  double total = 0.0;
  bool contains_observation = false;
  double area_m2 = 0.0;
  int provenance_kind = 0;
  std::int64_t provenance_id = 0;
};

// Strict weak order shared by every selection path. Ties on the total are
// broken toward candidates containing the observation, then smaller area,
// then ascending provenance id (kind disambiguates equal ids).
bool rank_before(const RankKey& a, const RankKey& b) {
  if (a.total != b.total) return a.total > b.total;
  if (a.contains_observation != b.contains_observation) {
    return a.contains_observation;
  }
  if (a.area_m2 != b.area_m2) return a.area_m2 < b.area_m2;
  if (a.provenance_id != b.provenance_id) {
    return a.provenance_id < b.provenance_id;
  }
  return a.provenance_kind < b.provenance_kind;
}

RankKey key_of(const ScoredCandidate& c) {
  return RankKey{c.total, c.contains_observation, c.area_m2,
                 static_cast<int>(c.candidate.provenance.kind),
                 c.candidate.provenance.id};
}

} // namespace

WeightVector::WeightVector(std::array<double, kClassifierCount> weights)
    : weights_(weights) {
  bool any_positive = false;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0 || w > kMaxWeight) {
      throw InvariantError("weight vector: weights must be in [0, " +
                           std::to_string(kMaxWeight) + "]");
    }
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive) {
    throw InvariantError("weight vector: at least one weight must be positive");
  }
}

WeightVector WeightVector::equal() {
  std::array<double, kClassifierCount> w;
  w.fill(1.0);
  return WeightVector(w);
}

WeightVector WeightVector::one_hot(Classifier which, double weight) {
  std::array<double, kClassifierCount> w{};
  w[static_cast<std::size_t>(which)] = weight;
  return WeightVector(w);
}

nlohmann::ordered_json WeightVector::to_json() const {
  nlohmann::ordered_json out;
  for (std::size_t i = 0; i < kClassifierCount; ++i) {
    out[std::string(kClassifierNames[i])] = weights_[i];
  }
  return out;
}

WeightVector WeightVector::from_json(const nlohmann::json& doc) {
  const nlohmann::json& map =
      doc.is_object() && doc.contains("weights") ? doc.at("weights") : doc;
  if (!map.is_object()) {
    throw ParseError("weights: expected a classifier-name -> weight map");
  }
  std::array<double, kClassifierCount> w{};
  for (std::size_t i = 0; i < kClassifierCount; ++i) {
    const std::string name(kClassifierNames[i]);
    if (!map.contains(name) || !map.at(name).is_number()) {
      throw ParseError("weights: missing or non-numeric '" + name + "'");
    }
    w[i] = map.at(name).get<double>();
  }
  for (const auto& [name, value] : map.items()) {
    if (std::find(kClassifierNames.begin(), kClassifierNames.end(), name) ==
        kClassifierNames.end()) {
      throw ParseError("weights: unknown classifier '" + name + "'");
    }
  }
  return WeightVector(w);
}

WeightVector WeightVector::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open weights file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

void WeightVector::save(const std::filesystem::path& path,
                        const nlohmann::json& provenance) const {
  nlohmann::ordered_json doc;
  doc["weights"] = to_json();
  if (!provenance.is_null() && !provenance.empty()) {
    doc["provenance"] = provenance;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write weights file: " + path.string());
  out << doc.dump(2) << '\n';
}

WeightVector default_weights() {
  std::array<double, kClassifierCount> w{};
  w[static_cast<std::size_t>(Classifier::kDistCentroid)] = 0.5;
  w[static_cast<std::size_t>(Classifier::kDistEdge)] = 2.8;
  w[static_cast<std::size_t>(Classifier::kDistVertex)] = 0.5;
  w[static_cast<std::size_t>(Classifier::kPointInPolygon)] = 1.0;
  w[static_cast<std::size_t>(Classifier::kSurDescription)] = 4.3;
  w[static_cast<std::size_t>(Classifier::kSurOsmMapping)] = 3.5;
  w[static_cast<std::size_t>(Classifier::kOrientation)] = 1.0;
  w[static_cast<std::size_t>(Classifier::kComputerVision)] = 1.0;
  return WeightVector(w);
}

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  return rank_before(key_of(a), key_of(b));
}

ScoringEngine::ScoringEngine(clf::RuleSet rules, clf::VisionRuleSet vision_rules,
                             clf::ClassifierConstants constants)
    : rules_(std::move(rules)),
      vision_rules_(std::move(vision_rules)),
      constants_(constants) {}

ScoringEngine ScoringEngine::load(const std::filesystem::path& rules_dir) {
  return ScoringEngine(
      clf::RuleSet::load(rules_dir / "description.json",
                         rules_dir / "mapping.json"),
      clf::VisionRuleSet::load(rules_dir / "vision.json"),
      clf::ClassifierConstants::load(rules_dir / "constants.json"));
}

std::array<clf::WeakScore, kClassifierCount> ScoringEngine::weak_scores(
    const clf::ScoreContext& ctx, const osm::CandidatePolygon& candidate) const {
  return {
      clf::score_dist_centroid(ctx, candidate),
      clf::score_dist_edge(ctx, candidate),
      clf::score_dist_vertex(ctx, candidate),
      clf::score_point_in_polygon(ctx, candidate, constants_),
      clf::score_sur_description(ctx, candidate, rules_, constants_),
      clf::score_sur_osm_mapping(ctx, candidate, rules_, constants_),
      clf::score_orientation(ctx, candidate, constants_),
      clf::score_computer_vision(ctx, candidate, vision_rules_, constants_),
  };
}

std::vector<ScoredCandidate> ScoringEngine::score_all(
    const clf::ScoreContext& ctx,
    const std::vector<osm::CandidatePolygon>& candidates,
    const WeightVector& weights) const {
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const osm::CandidatePolygon& cand : candidates) {
    ScoredCandidate sc{cand, weak_scores(ctx, cand), 0.0, false, 0.0};
    for (std::size_t i = 0; i < kClassifierCount; ++i) {
      sc.total += weights[i] * sc.weak_scores[i].value;
    }
    sc.contains_observation =
        geo::contains(cand.geometry, geo::PlanarPoint{0.0, 0.0});
    sc.area_m2 = geo::polygon_area(cand.geometry);
    scored.push_back(std::move(sc));
  }
  std::sort(scored.begin(), scored.end(),
            [](const ScoredCandidate& a, const ScoredCandidate& b) {
              return ranks_before(a, b);
            });
  return scored;
}

std::optional<ScoredCandidate> ScoringEngine::select_polygon(
    const clf::ScoreContext& ctx,
    const std::vector<osm::CandidatePolygon>& candidates,
    const WeightVector& weights) const {
  std::vector<ScoredCandidate> scored = score_all(ctx, candidates, weights);
  if (scored.empty()) return std::nullopt;
  return std::move(scored.front());
}

std::optional<ScoredCandidate> ScoringEngine::select_single(
    const clf::ScoreContext& ctx,
    const std::vector<osm::CandidatePolygon>& candidates,
    Classifier which) const {
  // Rank by the one classifier's score alone.
  std::vector<ScoredCandidate> scored =
      score_all(ctx, candidates, WeightVector::one_hot(which));
  if (scored.empty()) return std::nullopt;
  return std::move(scored.front());
}

TrainingCache TrainingCache::build(const data::Dataset& dataset,
                                   const osm::OsmData& world,
                                   const ScoringEngine& engine,
                                   double candidate_radius_m) {
  TrainingCache cache;
  cache.samples.reserve(dataset.samples.size());
  for (const data::SurObservation& obs : dataset.samples) {
    if (!obs.ground_truth.has_value()) {
      throw DataError("training sample '" + obs.id + "' lacks ground truth");
    }
    const geo::AreaPolygon target =
        *data::ground_truth_polygon(obs, obs.location);

    const clf::ScoreContext ctx = clf::ScoreContext::make(
        obs, candidate_radius_m, clf::classify_indoor_outdoor(obs.image_path));
    const std::vector<osm::CandidatePolygon> candidates =
        osm::candidates_within(world, obs.location, candidate_radius_m);

    CachedSample sample;
    sample.id = obs.id;
    sample.candidates.reserve(candidates.size());
    for (const osm::CandidatePolygon& cand : candidates) {
      CachedCandidate cc;
      const auto scores = engine.weak_scores(ctx, cand);
      for (std::size_t i = 0; i < kClassifierCount; ++i) {
        cc.weak_scores[i] = scores[i].value;
      }
      cc.r = eval::intersection_ratio(target, cand.geometry);
      cc.contains_observation =
          geo::contains(cand.geometry, geo::PlanarPoint{0.0, 0.0});
      cc.area_m2 = geo::polygon_area(cand.geometry);
      cc.provenance_kind = static_cast<int>(cand.provenance.kind);
      cc.provenance_id = cand.provenance.id;
      sample.candidates.push_back(cc);
    }
    cache.samples.push_back(std::move(sample));
  }
  return cache;
}

std::ptrdiff_t TrainingCache::select_index(const CachedSample& sample,
                                           const WeightVector& weights) {
  std::ptrdiff_t best = -1;
  RankKey best_key;
  for (std::size_t j = 0; j < sample.candidates.size(); ++j) {
    const CachedCandidate& c = sample.candidates[j];
    double total = 0.0;
    for (std::size_t i = 0; i < kClassifierCount; ++i) {
      total += weights[i] * c.weak_scores[i];
    }
    const RankKey key{total, c.contains_observation, c.area_m2,
                      c.provenance_kind, c.provenance_id};
    if (best < 0 || rank_before(key, best_key)) {
      best = static_cast<std::ptrdiff_t>(j);
      best_key = key;
    }
  }
  return best;
}

double fitness(const WeightVector& weights, const TrainingCache& cache) {
  if (cache.samples.empty()) {
    throw DataError("fitness: empty training set");
  }
  double sum = 0.0;
  for (const CachedSample& sample : cache.samples) {
    const std::ptrdiff_t idx = TrainingCache::select_index(sample, weights);
    if (idx >= 0) sum += sample.candidates[static_cast<std::size_t>(idx)].r;
  }
  return sum / static_cast<double>(cache.samples.size());
}

double fitness(const WeightVector& weights, const data::Dataset& training,
               const osm::OsmData& world, const ScoringEngine& engine,
               double candidate_radius_m) {
  return fitness(weights,
                 TrainingCache::build(training, world, engine,
                                      candidate_radius_m));
}

} // namespace sur::ensemble
