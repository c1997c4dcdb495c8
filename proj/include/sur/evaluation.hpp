#ifndef SUR_EVALUATION_HPP
#define SUR_EVALUATION_HPP

#include <variant>

#include "sur/ensemble.hpp"

// The intersection-ratio metric, whole-dataset evaluation across weight
// configurations and single-classifier baselines, and report rendering.

namespace sur::eval {

// R = 2 * A_inter / (A_target + A_candidate); 1 iff the regions coincide,
// 0 iff they are disjoint. Symmetric and translation-invariant.
double intersection_ratio(const geo::AreaPolygon& target,
                          const geo::AreaPolygon& candidate);

// A labeled way to pick a polygon: a full weight vector, or one weak
// classifier on its own (a Table-style baseline row).
struct Configuration {
  std::string label;
  std::variant<ensemble::WeightVector, ensemble::Classifier> method;
};

// All eight single-classifier baselines plus equal weights.
std::vector<Configuration> baseline_configurations();

inline constexpr std::array<int, 10> kThresholdsPct = {5,  10, 15, 20, 25,
                                                       30, 35, 40, 45, 50};

struct ThresholdCount {
  int threshold_pct = 0;
  std::size_t count = 0;
  double pct = 0.0;
};

struct SampleOutcome {
  std::string sample_id;
  std::string chosen; // provenance, or "-" when nothing was selected
  double r = 0.0;
};

struct ConfigurationRow {
  std::string label;
  double mean_r_pct = 0.0;
  std::array<ThresholdCount, kThresholdsPct.size()> correct{};
  std::size_t count_r75 = 0;
  std::size_t count_r100 = 0;
  std::vector<SampleOutcome> samples;
};

struct EvalReport {
  std::string dataset;
  std::size_t sample_count = 0;
  std::vector<ConfigurationRow> rows;
};

// Runs every configuration over the dataset. Every sample must carry
// ground truth (DataError naming the sample otherwise); a sample where
// nothing is selected scores R = 0.
EvalReport evaluate(const data::Dataset& dataset, const osm::OsmData& world,
                    const ensemble::ScoringEngine& engine,
                    const std::vector<Configuration>& configurations,
                    double candidate_radius_m = osm::kDefaultCandidateRadiusM);

enum class ReportFormat { kText, kCsv, kJson };

// Text mirrors the usual results-table layout (one decimal place); CSV and
// JSON carry full-precision values, CSV without the per-sample rows.
std::string render_report(const EvalReport& report, ReportFormat format);

} // namespace sur::eval

#endif // SUR_EVALUATION_HPP
