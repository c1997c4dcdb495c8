#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sur/ga.hpp"
#include "synthetic.hpp"

using namespace sur;
using ensemble::Classifier;
using ensemble::WeightVector;

namespace {

const ensemble::ScoringEngine& engine() {
  static const ensemble::ScoringEngine e =
      ensemble::ScoringEngine::load(SUR_RULES_DIR);
  return e;
}

data::SurObservation make_obs(std::vector<std::string> sur_types) {
  data::SurObservation obs;
  obs.id = "t";
  obs.location = geo::GeoPoint{53.55, 10.0};
  obs.sur_types = std::move(sur_types);
  return obs;
}

clf::ScoreContext make_ctx(std::vector<std::string> sur_types) {
  return clf::ScoreContext::make(make_obs(std::move(sur_types)));
}

osm::CandidatePolygon cand(geo::AreaPolygon geometry, osm::TagMap tags,
                           std::int64_t id) {
  return osm::CandidatePolygon{std::move(geometry), std::move(tags),
                               osm::Provenance{osm::EntityKind::kWay, id, 0.0}};
}

} // namespace

TEST_CASE("WeightVector: invariants") {
  std::array<double, 8> zeros{};
  CHECK_THROWS_AS(WeightVector{zeros}, InvariantError);

  std::array<double, 8> negative{};
  negative[2] = -0.1;
  CHECK_THROWS_AS(WeightVector{negative}, InvariantError);

  std::array<double, 8> oversized{};
  oversized[0] = ensemble::kMaxWeight + 0.1;
  CHECK_THROWS_AS(WeightVector{oversized}, InvariantError);

  CHECK_NOTHROW(WeightVector::one_hot(Classifier::kDistEdge));
  CHECK_NOTHROW(WeightVector::equal());
}

TEST_CASE("WeightVector: JSON round trip and file persistence") {
  const WeightVector w = ensemble::default_weights();
  const WeightVector back = WeightVector::from_json(w.to_json());
  CHECK(back.values() == w.values());

  const auto dir = std::filesystem::temp_directory_path() / "sur_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / "weights.json";
  w.save(path, {{"note", "test"}});
  CHECK(WeightVector::load(path).values() == w.values());

  CHECK_THROWS_AS(WeightVector::from_json(nlohmann::json{{"bogus", 1.0}}),
                  ParseError);
}

TEST_CASE("default_weights: published values, documented fallbacks") {
  const WeightVector w = ensemble::default_weights();
  CHECK(w[Classifier::kDistCentroid] == 0.5);
  CHECK(w[Classifier::kDistEdge] == 2.8);
  CHECK(w[Classifier::kDistVertex] == 0.5);
  CHECK(w[Classifier::kSurDescription] == 4.3);
  CHECK(w[Classifier::kSurOsmMapping] == 3.5);
  CHECK(w[Classifier::kComputerVision] == 1.0);
  // Unreported upstream; fixed artifact defaults.
  CHECK(w[Classifier::kPointInPolygon] == 1.0);
  CHECK(w[Classifier::kOrientation] == 1.0);
}

TEST_CASE("score_all: one-hot point-in-polygon products") {
  const auto ctx = make_ctx({"no_smoking"});
  std::vector<osm::CandidatePolygon> candidates;
  candidates.push_back(cand(oracles::rect(-10, -10, 10, 10), {{"building", "yes"}}, 1));
  candidates.push_back(cand(oracles::rect(50, 50, 70, 70), {{"building", "yes"}}, 2));

  const auto scored = engine().score_all(
      ctx, candidates, WeightVector::one_hot(Classifier::kPointInPolygon));
  REQUIRE(scored.size() == 2);
  CHECK(scored[0].total == doctest::Approx(100.0));
  CHECK(scored[0].candidate.provenance.id == 1);
  CHECK(scored[1].total == doctest::Approx(-75.0));
}

TEST_CASE("score_all: linearity and per-candidate independence") {
  const auto ctx = make_ctx({"no_swimming"});
  std::vector<osm::CandidatePolygon> candidates;
  candidates.push_back(cand(oracles::rect(-20, -20, 20, 20), {{"natural", "water"}}, 1));
  candidates.push_back(cand(oracles::rect(100, 0, 150, 50), {{"leisure", "park"}}, 2));

  const WeightVector w = ensemble::default_weights();
  const auto scored = engine().score_all(ctx, candidates, w);

  // Doubling all weights doubles every total.
  std::array<double, 8> doubled{};
  for (std::size_t i = 0; i < 8; ++i) doubled[i] = 2.0 * w[i];
  const auto scored2 = engine().score_all(ctx, candidates, WeightVector(doubled));
  REQUIRE(scored2.size() == scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    CHECK(scored2[i].total == doctest::Approx(2.0 * scored[i].total));
    CHECK(scored2[i].candidate.provenance.id == scored[i].candidate.provenance.id);
  }

  // Totals are per-candidate; adding a third candidate changes nothing.
  auto more = candidates;
  more.push_back(cand(oracles::rect(-200, 100, -100, 200), {{"amenity", "bank"}}, 3));
  const auto scored3 = engine().score_all(ctx, more, w);
  for (const auto& before : scored) {
    const auto it = std::find_if(scored3.begin(), scored3.end(),
                                 [&before](const auto& sc) {
                                   return sc.candidate.provenance.id ==
                                          before.candidate.provenance.id;
                                 });
    REQUIRE(it != scored3.end());
    CHECK(it->total == before.total);
  }

  // Output is sorted best-first.
  for (std::size_t i = 0; i + 1 < scored3.size(); ++i) {
    CHECK_FALSE(ensemble::ranks_before(scored3[i + 1], scored3[i]));
  }
}

TEST_CASE("select_polygon: empty, singleton and tie-breaking") {
  const auto ctx = make_ctx({"no_smoking"});

  CHECK_FALSE(engine().select_polygon(ctx, {}, WeightVector::equal()).has_value());

  std::vector<osm::CandidatePolygon> one;
  one.push_back(cand(oracles::rect(0, 0, 10, 10), {{"building", "yes"}}, 7));
  const auto picked = engine().select_polygon(ctx, one, WeightVector::equal());
  REQUIRE(picked.has_value());
  CHECK(picked->candidate.provenance.id == 7);

  // Equal totals: the candidate containing the observation wins.
  const WeightVector vertex_only = WeightVector::one_hot(Classifier::kDistVertex);
  std::vector<osm::CandidatePolygon> tie;
  tie.push_back(cand(oracles::rect(-150, -150, -50, -50), {{"building", "yes"}}, 1));
  tie.push_back(cand(oracles::rect(-50, -50, 50, 50), {{"building", "yes"}}, 2));
  const auto by_contains = engine().select_polygon(ctx, tie, vertex_only);
  REQUIRE(by_contains.has_value());
  CHECK(by_contains->candidate.provenance.id == 2);

  // Equal totals, neither contains: the smaller polygon wins.
  const WeightVector pip_only = WeightVector::one_hot(Classifier::kPointInPolygon);
  std::vector<osm::CandidatePolygon> area_tie;
  area_tie.push_back(cand(oracles::rect(100, 0, 300, 200), {{"building", "yes"}}, 1));
  area_tie.push_back(cand(oracles::rect(100, 0, 150, 50), {{"building", "yes"}}, 2));
  const auto by_area = engine().select_polygon(ctx, area_tie, pip_only);
  REQUIRE(by_area.has_value());
  CHECK(by_area->candidate.provenance.id == 2);

  // Equal everything: ascending provenance id.
  std::vector<osm::CandidatePolygon> id_tie;
  id_tie.push_back(cand(oracles::rect(100, 0, 150, 50), {{"building", "yes"}}, 9));
  id_tie.push_back(cand(oracles::rect(100, 100, 150, 150), {{"building", "yes"}}, 4));
  const auto by_id = engine().select_polygon(ctx, id_tie, pip_only);
  REQUIRE(by_id.has_value());
  CHECK(by_id->candidate.provenance.id == 4);
}

TEST_CASE("select_polygon: invariant under positive weight scaling") {
  std::mt19937_64 rng(3100);
  std::uniform_real_distribution<double> offset(-400.0, 400.0);
  std::uniform_real_distribution<double> size(10.0, 150.0);
  // Base weights in [0, 1] so every scaled copy stays within the cap.
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.05, 4.0);
  const std::vector<osm::TagMap> tags = {{{"natural", "water"}},
                                         {{"leisure", "park"}},
                                         {{"building", "yes"}}};

  for (int trial = 0; trial < 100; ++trial) {
    const auto ctx = make_ctx({"no_swimming", "no_dogs"});
    std::vector<osm::CandidatePolygon> candidates;
    const int n = 2 + static_cast<int>(trial % 5);
    for (int j = 0; j < n; ++j) {
      const double cx = offset(rng);
      const double cy = offset(rng);
      const double s = size(rng);
      candidates.push_back(cand(oracles::rect(cx - s, cy - s, cx + s, cy + s),
                                tags[static_cast<std::size_t>(j) % tags.size()],
                                10 + j));
    }
    std::array<double, 8> w{};
    for (double& x : w) x = weight(rng);
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
      w[0] = 1.0;
    }
    const double c = scale(rng);
    std::array<double, 8> cw{};
    for (std::size_t i = 0; i < 8; ++i) cw[i] = c * w[i];

    const auto a = engine().select_polygon(ctx, candidates, WeightVector(w));
    const auto b = engine().select_polygon(ctx, candidates, WeightVector(cw));
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->candidate.provenance.id == b->candidate.provenance.id);
  }
}

TEST_CASE("fitness: arithmetic on a hand-built cache") {
  ensemble::TrainingCache cache;
  auto make_sample = [](const std::string& id, std::vector<double> rs) {
    ensemble::CachedSample s;
    s.id = id;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      ensemble::CachedCandidate c;
      c.weak_scores.fill(0.0);
      c.weak_scores[0] = j == 0 ? 100.0 : -100.0; // classifier 0 prefers j=0
      c.r = rs[j];
      c.area_m2 = 1.0;
      c.provenance_id = static_cast<std::int64_t>(j);
      s.candidates.push_back(c);
    }
    return s;
  };
  cache.samples.push_back(make_sample("a", {1.0, 0.0}));
  cache.samples.push_back(make_sample("b", {0.5, 0.0}));

  const WeightVector w = WeightVector::one_hot(Classifier::kDistCentroid);
  CHECK(ensemble::fitness(w, cache) == doctest::Approx(0.75));

  // A sample with no candidates contributes zero.
  cache.samples.push_back(ensemble::CachedSample{"empty", {}});
  CHECK(ensemble::fitness(w, cache) == doctest::Approx(0.5));

  CHECK_THROWS_AS(ensemble::fitness(w, ensemble::TrainingCache{}), DataError);
}

TEST_CASE("TrainingCache: requires ground truth") {
  data::Dataset dataset;
  dataset.name = "no_gt";
  dataset.samples.push_back(make_obs({"no_smoking"}));
  osm::OsmData world;
  CHECK_THROWS_AS(
      ensemble::TrainingCache::build(dataset, world, engine()), DataError);
}

TEST_CASE("GaConfig: validation and JSON") {
  ensemble::GaConfig config;
  CHECK_NOTHROW(config.validate());

  ensemble::GaConfig bad = config;
  bad.population_size = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = config;
  bad.elitism_count = config.population_size;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = config;
  bad.crossover_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);

  const ensemble::GaConfig loaded =
      ensemble::GaConfig::from_json(config.to_json());
  CHECK(loaded.population_size == config.population_size);
  CHECK(loaded.rng_seed == config.rng_seed);
  // Partial documents keep defaults.
  const auto partial =
      ensemble::GaConfig::from_json(nlohmann::json{{"generations", 7}});
  CHECK(partial.generations == 7);
  CHECK(partial.population_size == config.population_size);
}

TEST_CASE("train: deterministic from the seed, monotone under elitism") {
  const ensemble::TrainingCache cache = synthetic::make_oracle_cache(20, 6);
  ensemble::GaConfig config;
  config.population_size = 24;
  config.generations = 12;
  config.rng_seed = 31337;

  const ensemble::TrainResult a = ensemble::train(config, cache);
  const ensemble::TrainResult b = ensemble::train(config, cache);
  CHECK(a.weights.values() == b.weights.values());
  CHECK(a.best_fitness == b.best_fitness);
  REQUIRE(a.history.size() == config.generations + 1);
  REQUIRE(b.history.size() == a.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].best == b.history[i].best);
    CHECK(a.history[i].mean == b.history[i].mean);
  }
  for (std::size_t i = 0; i + 1 < a.history.size(); ++i) {
    CHECK(a.history[i + 1].best >= a.history[i].best); // elitism
  }
  CHECK(a.trace_csv() == b.trace_csv());
  CHECK(a.trace_csv().rfind("generation,best,mean\n", 0) == 0);
}

TEST_CASE("train: synthetic oracle benchmark") {
  const ensemble::TrainingCache cache = synthetic::make_oracle_cache();

  // Brute force over one-hot weight vectors: the oracle classifier is a
  // fitness-1.0 optimum and strictly the best single classifier.
  double oracle_fitness = -1.0;
  double best_other = -1.0;
  for (std::size_t k = 0; k < ensemble::kClassifierCount; ++k) {
    const double f = ensemble::fitness(
        WeightVector::one_hot(static_cast<Classifier>(k)), cache);
    if (k == synthetic::kOracleIndex) {
      oracle_fitness = f;
    } else {
      best_other = std::max(best_other, f);
    }
  }
  CHECK(oracle_fitness == doctest::Approx(1.0));
  CHECK(oracle_fitness > best_other);

  ensemble::GaConfig config; // defaults, but the short published example run
  config.generations = 50;
  config.rng_seed = 2042;
  const ensemble::TrainResult result = ensemble::train(config, cache);

  CHECK(result.best_fitness >= 0.95);
  CHECK(result.best_fitness <= oracle_fitness + 1e-12);
  const auto& w = result.weights.values();
  for (std::size_t k = 0; k < ensemble::kClassifierCount; ++k) {
    if (k != synthetic::kOracleIndex) {
      CHECK(w[synthetic::kOracleIndex] > w[k]);
    }
  }
}

TEST_CASE("cache selection agrees with the live scoring path") {
  // Same world scored through the engine and through a cache built on it.
  const auto ctx = make_ctx({"no_swimming", "no_smoking"});
  std::vector<osm::CandidatePolygon> candidates;
  candidates.push_back(cand(oracles::rect(-60, -60, 40, 40), {{"natural", "water"}}, 1));
  candidates.push_back(cand(oracles::rect(30, 30, 90, 90), {{"building", "yes"}}, 2));
  candidates.push_back(cand(oracles::rect(-200, 100, -100, 200), {{"leisure", "park"}}, 3));

  ensemble::CachedSample sample;
  sample.id = "x";
  for (const auto& c : candidates) {
    ensemble::CachedCandidate cc;
    const auto scores = engine().weak_scores(ctx, c);
    for (std::size_t i = 0; i < 8; ++i) cc.weak_scores[i] = scores[i].value;
    cc.contains_observation = geo::contains(c.geometry, {0, 0});
    cc.area_m2 = geo::polygon_area(c.geometry);
    cc.provenance_kind = static_cast<int>(c.provenance.kind);
    cc.provenance_id = c.provenance.id;
    sample.candidates.push_back(cc);
  }

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> weight(0.0, ensemble::kMaxWeight);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 8> w{};
    for (double& x : w) x = weight(rng);
    const WeightVector weights(w);
    const auto live = engine().select_polygon(ctx, candidates, weights);
    const auto idx = ensemble::TrainingCache::select_index(sample, weights);
    REQUIRE(live.has_value());
    REQUIRE(idx >= 0);
    CHECK(sample.candidates[static_cast<std::size_t>(idx)].provenance_id ==
          live->candidate.provenance.id);
  }
}
