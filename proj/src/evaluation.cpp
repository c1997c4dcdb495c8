#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "sur/evaluation.hpp"

namespace sur::eval {

namespace {

// Guards threshold comparisons against representation noise in R.
constexpr double kCountTol = 1e-9;

std::string format_pct(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << value;
  return out.str();
}

} // namespace

double intersection_ratio(const geo::AreaPolygon& target,
                          const geo::AreaPolygon& candidate) {
  const double area_target = geo::polygon_area(target);
  const double area_candidate = geo::polygon_area(candidate);
  if (!(area_target > 0.0) || !(area_candidate > 0.0)) {
    throw DegenerateGeometryError("intersection_ratio: zero-area polygon");
  }
  const double inter = geo::intersection_area(target, candidate);
  return 2.0 * inter / (area_target + area_candidate);
}

std::vector<Configuration> baseline_configurations() {
  std::vector<Configuration> configs;
  for (std::size_t i = 0; i < ensemble::kClassifierCount; ++i) {
    configs.push_back(Configuration{
        std::string(ensemble::kClassifierNames[i]),
        static_cast<ensemble::Classifier>(i)});
  }
  configs.push_back(
      Configuration{"equal_weights", ensemble::WeightVector::equal()});
  return configs;
}

EvalReport evaluate(const data::Dataset& dataset, const osm::OsmData& world,
                    const ensemble::ScoringEngine& engine,
                    const std::vector<Configuration>& configurations,
                    double candidate_radius_m) {
  for (const data::SurObservation& obs : dataset.samples) {
    if (!obs.ground_truth.has_value()) {
      throw DataError("evaluate: sample '" + obs.id + "' lacks ground truth");
    }
  }

  EvalReport report;
  report.dataset = dataset.name;
  report.sample_count = dataset.samples.size();

  // Candidates, contexts and ground truth are configuration-independent.
  struct Prepared {
    clf::ScoreContext ctx;
    std::vector<osm::CandidatePolygon> candidates;
    geo::AreaPolygon target;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(dataset.samples.size());
  for (const data::SurObservation& obs : dataset.samples) {
    prepared.push_back(Prepared{
        clf::ScoreContext::make(obs, candidate_radius_m,
                                clf::classify_indoor_outdoor(obs.image_path)),
        osm::candidates_within(world, obs.location, candidate_radius_m),
        *data::ground_truth_polygon(obs, obs.location)});
  }

  for (const Configuration& config : configurations) {
    ConfigurationRow row;
    row.label = config.label;
    row.samples.reserve(prepared.size());

    double r_sum = 0.0;
    for (const Prepared& p : prepared) {
      std::optional<ensemble::ScoredCandidate> chosen;
      if (std::holds_alternative<ensemble::WeightVector>(config.method)) {
        chosen = engine.select_polygon(
            p.ctx, p.candidates, std::get<ensemble::WeightVector>(config.method));
      } else {
        chosen = engine.select_single(
            p.ctx, p.candidates, std::get<ensemble::Classifier>(config.method));
      }

      SampleOutcome outcome;
      outcome.sample_id = p.ctx.observation.id;
      if (chosen.has_value()) {
        outcome.chosen = chosen->candidate.provenance.to_string();
        outcome.r = intersection_ratio(p.target, chosen->candidate.geometry);
      } else {
        outcome.chosen = "-";
        outcome.r = 0.0;
      }
      r_sum += outcome.r;
      row.samples.push_back(std::move(outcome));
    }

    const double n = static_cast<double>(report.sample_count);
    row.mean_r_pct = report.sample_count == 0 ? 0.0 : 100.0 * r_sum / n;
    for (std::size_t t = 0; t < kThresholdsPct.size(); ++t) {
      const double threshold = kThresholdsPct[t] / 100.0;
      std::size_t count = 0;
      for (const SampleOutcome& s : row.samples) {
        if (s.r + kCountTol >= threshold) ++count;
      }
      row.correct[t] = ThresholdCount{
          kThresholdsPct[t], count,
          report.sample_count == 0 ? 0.0 : 100.0 * count / n};
    }
    for (const SampleOutcome& s : row.samples) {
      if (s.r + kCountTol >= 0.75) ++row.count_r75;
      if (s.r + kCountTol >= 1.0) ++row.count_r100;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string render_text(const EvalReport& report) {
  std::ostringstream out;
  out << "Dataset: " << report.dataset << " (" << report.sample_count
      << " samples)\n";

  const int label_width = [&report] {
    std::size_t w = 13;
    for (const ConfigurationRow& row : report.rows) {
      w = std::max(w, row.label.size());
    }
    return static_cast<int>(w);
  }();

  out << std::left << std::setw(label_width) << "configuration" << std::right
      << std::setw(9) << "mean R%";
  for (int t : kThresholdsPct) {
    out << std::setw(8) << ("@" + std::to_string(t) + "%");
  }
  out << std::setw(8) << ">=75%" << std::setw(8) << "=100%" << '\n';

  for (const ConfigurationRow& row : report.rows) {
    out << std::left << std::setw(label_width) << row.label << std::right
        << std::setw(9) << format_pct(row.mean_r_pct);
    for (const ThresholdCount& tc : row.correct) {
      out << std::setw(8) << tc.count;
    }
    out << std::setw(8) << row.count_r75 << std::setw(8) << row.count_r100
        << '\n';
  }
  return out.str();
}

std::string render_csv(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "configuration,mean_r_pct";
  for (int t : kThresholdsPct) {
    out << ",correct_" << t << ",pct_" << t;
  }
  out << ",count_r75,count_r100\n";
  for (const ConfigurationRow& row : report.rows) {
    out << row.label << ',' << row.mean_r_pct;
    for (const ThresholdCount& tc : row.correct) {
      out << ',' << tc.count << ',' << tc.pct;
    }
    out << ',' << row.count_r75 << ',' << row.count_r100 << '\n';
  }
  return out.str();
}

nlohmann::ordered_json report_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["dataset"] = report.dataset;
  doc["sample_count"] = report.sample_count;
  doc["configurations"] = nlohmann::ordered_json::array();
  for (const ConfigurationRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["label"] = row.label;
    r["mean_r_pct"] = row.mean_r_pct;
    r["correct"] = nlohmann::ordered_json::array();
    for (const ThresholdCount& tc : row.correct) {
      r["correct"].push_back({{"threshold_pct", tc.threshold_pct},
                              {"count", tc.count},
                              {"pct", tc.pct}});
    }
    r["count_r75"] = row.count_r75;
    r["count_r100"] = row.count_r100;
    r["samples"] = nlohmann::ordered_json::array();
    for (const SampleOutcome& s : row.samples) {
      r["samples"].push_back(
          {{"id", s.sample_id}, {"chosen", s.chosen}, {"r", s.r}});
    }
    doc["configurations"].push_back(std::move(r));
  }
  return doc;
}

} // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText: return render_text(report);
    case ReportFormat::kCsv: return render_csv(report);
    case ReportFormat::kJson: return report_json(report).dump(2) + "\n";
  }
  throw InvalidInputError("render_report: unknown format");
}

} // namespace sur::eval
