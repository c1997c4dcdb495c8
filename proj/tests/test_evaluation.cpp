#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sur/evaluation.hpp"
#include "world_builder.hpp"

using namespace sur;
using ensemble::Classifier;
using ensemble::WeightVector;

namespace {

const ensemble::ScoringEngine& engine() {
  static const ensemble::ScoringEngine e =
      ensemble::ScoringEngine::load(SUR_RULES_DIR);
  return e;
}

data::SurObservation obs_at(const std::string& id, double x_m, double y_m,
                            std::vector<std::string> sur_types,
                            std::optional<std::vector<geo::GeoPoint>> gt_ring =
                                std::nullopt) {
  data::SurObservation obs;
  obs.id = id;
  obs.location = geo::GeoPoint{std::stod(testworld::deg(y_m)),
                               std::stod(testworld::deg(x_m))};
  obs.sur_types = std::move(sur_types);
  if (gt_ring.has_value()) {
    obs.ground_truth = {{std::move(*gt_ring)}};
  }
  return obs;
}

} // namespace

TEST_CASE("intersection_ratio: closed forms") {
  const auto unit = oracles::rect(0, 0, 1, 1);
  CHECK(eval::intersection_ratio(unit, unit) == doctest::Approx(1.0).epsilon(1e-9));

  const auto far = oracles::rect(5, 5, 6, 6);
  CHECK(eval::intersection_ratio(unit, far) == doctest::Approx(0.0));

  // Half-overlapping unit squares: 2 * 0.5 / 2.
  const auto shifted = oracles::rect(0.5, 0, 1.5, 1);
  CHECK(eval::intersection_ratio(unit, shifted) ==
        doctest::Approx(0.5).epsilon(1e-9));

  // Unit square inside a 2x2 square: 2 * 1 / 5.
  const auto big = oracles::rect(-0.5, -0.5, 1.5, 1.5);
  CHECK(eval::intersection_ratio(unit, big) ==
        doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("intersection_ratio: symmetric, bounded, translation-invariant") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto a = oracles::star_polygon(rng, 11, 0.5, 1.5);
    const auto b =
        oracles::star_polygon(rng, 9, 0.5, 1.5, {offset(rng), offset(rng)});
    const double r_ab = eval::intersection_ratio(a, b);
    const double r_ba = eval::intersection_ratio(b, a);
    CHECK(r_ab == doctest::Approx(r_ba).epsilon(1e-9));
    CHECK(r_ab >= 0.0);
    CHECK(r_ab <= 1.0);

    const auto a2 = oracles::translated(a, 321.0, -77.0);
    const auto b2 = oracles::translated(b, 321.0, -77.0);
    CHECK(eval::intersection_ratio(a2, b2) ==
          doctest::Approx(r_ab).epsilon(1e-9));

    // Full overlap with unequal areas stays below 1.
    const auto grown = oracles::scaled(a, 2.0);
    CHECK(eval::intersection_ratio(a, grown) < 1.0);
  }
}

TEST_CASE("evaluate: perfect dataset scores 100% everywhere") {
  testworld::WorldBuilder w;
  w.square(1, 100, -50, -50, 50, 50, {{"leisure", "park"}});
  const osm::OsmData world = w.parse();

  data::Dataset dataset;
  dataset.name = "perfect";
  dataset.samples.push_back(obs_at(
      "s1", 0, 0, {"no_dogs"}, testworld::square_ring_geo(-50, -50, 50, 50)));
  dataset.samples.push_back(obs_at(
      "s2", 10, 10, {"no_dogs"}, testworld::square_ring_geo(-50, -50, 50, 50)));

  const auto report = eval::evaluate(
      dataset, world, engine(),
      {{"default", ensemble::default_weights()}});
  REQUIRE(report.rows.size() == 1);
  const auto& row = report.rows[0];
  CHECK(row.mean_r_pct == doctest::Approx(100.0).epsilon(1e-9));
  for (const auto& tc : row.correct) {
    CHECK(tc.count == dataset.samples.size());
  }
  CHECK(row.count_r75 == dataset.samples.size());
  CHECK(row.count_r100 == dataset.samples.size());
  for (const auto& s : row.samples) {
    CHECK(s.chosen == "way/100");
    CHECK(s.r == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("evaluate: threshold counting on R = {0.6, 0.4}") {
  // One 100 m square candidate per sample, shifted against its ground truth
  // so the intersection ratio is exactly the x-overlap fraction.
  testworld::WorldBuilder w;
  w.square(1, 100, 40, -50, 140, 50, {{"leisure", "park"}});     // R = 0.6
  w.square(10, 101, 2060, -50, 2160, 50, {{"leisure", "park"}}); // R = 0.4
  const osm::OsmData world = w.parse();

  data::Dataset dataset;
  dataset.name = "thresholds";
  dataset.samples.push_back(obs_at(
      "a", 50, 0, {"no_dogs"}, testworld::square_ring_geo(0, -50, 100, 50)));
  dataset.samples.push_back(
      obs_at("b", 2050, 0, {"no_dogs"},
             testworld::square_ring_geo(2000, -50, 2100, 50)));

  const auto report = eval::evaluate(dataset, world, engine(),
                                     {{"w", ensemble::default_weights()}});
  const auto& row = report.rows[0];
  CHECK(row.mean_r_pct == doctest::Approx(50.0).epsilon(1e-6));

  auto count_at = [&row](int pct) {
    for (const auto& tc : row.correct) {
      if (tc.threshold_pct == pct) return tc.count;
    }
    return std::size_t(999);
  };
  CHECK(count_at(50) == 1);
  CHECK(count_at(45) == 1);
  CHECK(count_at(40) == 2); // 0.4 counts at its own threshold
  CHECK(count_at(5) == 2);
  CHECK(row.count_r75 == 0);
  CHECK(row.count_r100 == 0);

  // correct@t is monotone non-increasing in t.
  for (std::size_t i = 0; i + 1 < row.correct.size(); ++i) {
    CHECK(row.correct[i].count >= row.correct[i + 1].count);
  }
}

TEST_CASE("evaluate: sample order does not change the aggregate") {
  testworld::WorldBuilder w;
  w.square(1, 100, 40, -50, 140, 50, {{"leisure", "park"}});
  w.square(10, 101, 2060, -50, 2160, 50, {{"leisure", "park"}});
  const osm::OsmData world = w.parse();

  data::Dataset forward;
  forward.name = "fw";
  forward.samples.push_back(obs_at(
      "a", 50, 0, {"no_dogs"}, testworld::square_ring_geo(0, -50, 100, 50)));
  forward.samples.push_back(
      obs_at("b", 2050, 0, {"no_dogs"},
             testworld::square_ring_geo(2000, -50, 2100, 50)));
  data::Dataset backward;
  backward.name = "bw";
  backward.samples = {forward.samples[1], forward.samples[0]};

  const std::vector<eval::Configuration> configs = {
      {"w", ensemble::default_weights()}};
  const auto a = eval::evaluate(forward, world, engine(), configs);
  const auto b = eval::evaluate(backward, world, engine(), configs);
  CHECK(a.rows[0].mean_r_pct == doctest::Approx(b.rows[0].mean_r_pct));
  for (std::size_t i = 0; i < a.rows[0].correct.size(); ++i) {
    CHECK(a.rows[0].correct[i].count == b.rows[0].correct[i].count);
  }
}

TEST_CASE("evaluate: missing ground truth names the sample") {
  testworld::WorldBuilder w;
  w.square(1, 100, -50, -50, 50, 50, {{"leisure", "park"}});
  const osm::OsmData world = w.parse();

  data::Dataset dataset;
  dataset.name = "broken";
  dataset.samples.push_back(obs_at("nogt", 0, 0, {"no_dogs"}));

  try {
    eval::evaluate(dataset, world, engine(),
                   {{"w", ensemble::default_weights()}});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("nogt") != std::string::npos);
  }
}

TEST_CASE("evaluate: one-hot weights equal the single-classifier path") {
  testworld::WorldBuilder w;
  w.square(1, 100, -120, -60, -20, 40, {{"natural", "water"}});
  w.square(10, 101, 30, 30, 130, 130, {{"leisure", "park"}});
  w.square(20, 102, -10, -210, 90, -110, {{"building", "yes"}});
  w.node(50, 200, 200, {{"railway", "station"}});
  const osm::OsmData world = w.parse();

  data::Dataset dataset;
  dataset.name = "equivalence";
  const auto gt = testworld::square_ring_geo(30, 30, 130, 130);
  dataset.samples.push_back(obs_at("p1", 0, 0, {"no_swimming"}, gt));
  dataset.samples.push_back(obs_at("p2", 40, 40, {"no_dogs"}, gt));
  dataset.samples.push_back(obs_at("p3", -60, 10, {"no_smoking"}, gt));

  for (std::size_t k = 0; k < ensemble::kClassifierCount; ++k) {
    const auto which = static_cast<Classifier>(k);
    const auto report = eval::evaluate(
        dataset, world, engine(),
        {{"one_hot", WeightVector::one_hot(which)}, {"single", which}});
    REQUIRE(report.rows.size() == 2);
    for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
      CHECK(report.rows[0].samples[s].chosen == report.rows[1].samples[s].chosen);
      CHECK(report.rows[0].samples[s].r == doctest::Approx(report.rows[1].samples[s].r));
    }
  }
}

TEST_CASE("baseline_configurations: eight singles plus equal weights") {
  const auto configs = eval::baseline_configurations();
  REQUIRE(configs.size() == ensemble::kClassifierCount + 1);
  CHECK(configs.front().label == "dist_centroid");
  CHECK(configs.back().label == "equal_weights");
  CHECK(std::holds_alternative<WeightVector>(configs.back().method));
}

TEST_CASE("render_report: text layout") {
  eval::EvalReport empty;
  empty.dataset = "none";
  empty.sample_count = 0;
  const std::string header_only =
      eval::render_report(empty, eval::ReportFormat::kText);
  CHECK(header_only.find("configuration") != std::string::npos);
  CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 2);

  eval::EvalReport two;
  two.dataset = "demo";
  two.sample_count = 4;
  for (const char* label : {"alpha", "beta"}) {
    eval::ConfigurationRow row;
    row.label = label;
    row.mean_r_pct = 61.34;
    for (std::size_t i = 0; i < eval::kThresholdsPct.size(); ++i) {
      row.correct[i] = {eval::kThresholdsPct[i], 3, 75.0};
    }
    two.rows.push_back(row);
  }
  const std::string text = eval::render_report(two, eval::ReportFormat::kText);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4); // title + header + 2
  CHECK(text.find("alpha") != std::string::npos);
  CHECK(text.find("61.3") != std::string::npos); // one decimal place
}

TEST_CASE("render_report: CSV and JSON carry identical values") {
  testworld::WorldBuilder w;
  w.square(1, 100, 40, -50, 140, 50, {{"leisure", "park"}});
  w.square(10, 101, -170, -50, -70, 50, {{"natural", "water"}});
  const osm::OsmData world = w.parse();

  data::Dataset dataset;
  dataset.name = "csvjson";
  dataset.samples.push_back(obs_at(
      "a", 50, 0, {"no_dogs"}, testworld::square_ring_geo(0, -50, 100, 50)));
  dataset.samples.push_back(
      obs_at("b", -80, 0, {"no_swimming"},
             testworld::square_ring_geo(-170, -50, -70, 50)));

  const auto report = eval::evaluate(
      dataset, world, engine(),
      {{"trained", ensemble::default_weights()},
       {"centroid", Classifier::kDistCentroid}});

  const std::string csv = eval::render_report(report, eval::ReportFormat::kCsv);
  const auto doc = nlohmann::json::parse(
      eval::render_report(report, eval::ReportFormat::kJson));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line); // header
  std::size_t row_index = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> cells;
    while (std::getline(fields, field, ',')) cells.push_back(field);
    REQUIRE(cells.size() == 2 + 2 * eval::kThresholdsPct.size() + 2);

    const auto& jrow = doc["configurations"][row_index];
    CHECK(cells[0] == jrow["label"].get<std::string>());
    CHECK(std::stod(cells[1]) == jrow["mean_r_pct"].get<double>());
    for (std::size_t t = 0; t < eval::kThresholdsPct.size(); ++t) {
      CHECK(std::stoull(cells[2 + 2 * t]) ==
            jrow["correct"][t]["count"].get<std::size_t>());
      CHECK(std::stod(cells[3 + 2 * t]) ==
            jrow["correct"][t]["pct"].get<double>());
    }
    CHECK(std::stoull(cells[cells.size() - 2]) ==
          jrow["count_r75"].get<std::size_t>());
    CHECK(std::stoull(cells[cells.size() - 1]) ==
          jrow["count_r100"].get<std::size_t>());
    ++row_index;
  }
  CHECK(row_index == report.rows.size());

  // JSON additionally carries the per-sample rows.
  CHECK(doc["configurations"][0]["samples"].size() == dataset.samples.size());
}
