#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sur/dataset.hpp"
#include "sur/evaluation.hpp"
#include "sur/ga.hpp"
#include "sur/geojson.hpp"
#include "sur/osm.hpp"

namespace {

sur::data::SurObservation load_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw sur::DataError("cannot open sample file: " + path.string());
  nlohmann::json record;
  try {
    in >> record;
  } catch (const nlohmann::json::exception& e) {
    throw sur::ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return sur::data::parse_sample(record, path.parent_path());
}

sur::data::Dataset load_dataset_reporting(const std::filesystem::path& dir) {
  sur::data::LoadResult loaded = sur::data::load_dataset(dir);
  for (const sur::data::SampleError& err : loaded.skipped) {
    std::cerr << "warning: skipped sample " << err.sample_id << ": "
              << err.message << '\n';
  }
  return std::move(loaded.dataset);
}

int run_candidates(const std::string& osm_path, double lat, double lon,
                   double radius) {
  const sur::osm::OsmData world = sur::osm::load_osm_file(osm_path);
  const sur::geo::GeoPoint center{lat, lon};
  const auto candidates = sur::osm::candidates_within(world, center, radius);
  std::cout << sur::data::candidates_geojson(center, candidates).dump(2)
            << '\n';
  return 0;
}

int run_score(const std::string& osm_path, const std::string& sample_path,
              const std::string& weights_path, const std::string& rules_dir,
              double radius) {
  const sur::osm::OsmData world = sur::osm::load_osm_file(osm_path);
  const sur::data::SurObservation obs = load_sample_file(sample_path);
  const sur::ensemble::WeightVector weights =
      sur::ensemble::WeightVector::load(weights_path);
  const sur::ensemble::ScoringEngine engine =
      sur::ensemble::ScoringEngine::load(rules_dir);

  std::string diag;
  const sur::clf::SpaceType space =
      sur::clf::classify_indoor_outdoor(obs.image_path, &diag);
  if (!diag.empty()) std::cerr << "warning: " << diag << '\n';

  const auto ctx = sur::clf::ScoreContext::make(obs, radius, space);
  const auto candidates =
      sur::osm::candidates_within(world, obs.location, radius);
  const auto ranked = engine.score_all(ctx, candidates, weights);
  std::cout << sur::data::export_geojson(obs, ranked, obs.location).dump(2)
            << '\n';
  return 0;
}

int run_train(const std::string& osm_path, const std::string& dataset_dir,
              const std::string& config_path, const std::string& out_path,
              std::string trace_path, const std::string& rules_dir,
              double radius) {
  const sur::osm::OsmData world = sur::osm::load_osm_file(osm_path);
  const sur::data::Dataset dataset = load_dataset_reporting(dataset_dir);
  const sur::ensemble::ScoringEngine engine =
      sur::ensemble::ScoringEngine::load(rules_dir);
  const sur::ensemble::GaConfig config =
      config_path.empty() ? sur::ensemble::GaConfig{}
                          : sur::ensemble::GaConfig::load(config_path);

  const sur::ensemble::TrainResult result =
      sur::ensemble::train(config, dataset, world, engine, radius);

  nlohmann::json provenance;
  provenance["ga_config"] = config.to_json();
  provenance["dataset"] = dataset.name;
  provenance["best_fitness"] = result.best_fitness;
  result.weights.save(out_path, provenance);

  if (trace_path.empty()) {
    trace_path = std::filesystem::path(out_path)
                     .replace_extension()
                     .string() +
                 "_trace.csv";
  }
  std::ofstream trace(trace_path);
  if (!trace) throw sur::DataError("cannot write trace: " + trace_path);
  trace << result.trace_csv();

  std::cerr << "trained on " << dataset.samples.size()
            << " samples, best fitness " << result.best_fitness << '\n'
            << "weights -> " << out_path << ", trace -> " << trace_path
            << '\n';
  return 0;
}

int run_eval(const std::string& osm_path, const std::string& dataset_dir,
             const std::vector<std::string>& weights_paths, bool baselines,
             const std::string& format, const std::string& rules_dir,
             double radius) {
  const sur::osm::OsmData world = sur::osm::load_osm_file(osm_path);
  const sur::data::Dataset dataset = load_dataset_reporting(dataset_dir);
  const sur::ensemble::ScoringEngine engine =
      sur::ensemble::ScoringEngine::load(rules_dir);

  std::vector<sur::eval::Configuration> configs;
  for (const std::string& path : weights_paths) {
    configs.push_back(sur::eval::Configuration{
        std::filesystem::path(path).stem().string(),
        sur::ensemble::WeightVector::load(path)});
  }
  if (baselines) {
    for (auto& config : sur::eval::baseline_configurations()) {
      configs.push_back(std::move(config));
    }
  }
  if (configs.empty()) {
    configs.push_back(sur::eval::Configuration{
        "default_weights", sur::ensemble::default_weights()});
  }

  const sur::eval::EvalReport report =
      sur::eval::evaluate(dataset, world, engine, configs, radius);

  sur::eval::ReportFormat fmt = sur::eval::ReportFormat::kText;
  if (format == "csv") {
    fmt = sur::eval::ReportFormat::kCsv;
  } else if (format == "json") {
    fmt = sur::eval::ReportFormat::kJson;
  }
  std::cout << sur::eval::render_report(report, fmt);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Associate space-usage-rule observations with map polygons"};
  app.require_subcommand(1);

  std::string osm_path;
  std::string sample_path;
  std::string weights_path;
  std::string dataset_dir;
  std::string config_path;
  std::string out_path = "weights.json";
  std::string trace_path;
  std::string rules_dir = "rules";
  std::string format = "text";
  std::vector<std::string> weights_paths;
  bool baselines = false;
  double lat = 0.0;
  double lon = 0.0;
  double radius = sur::osm::kDefaultCandidateRadiusM;

  CLI::App* candidates =
      app.add_subcommand("candidates", "Candidate polygons around a point");
  candidates->add_option("--osm", osm_path, "OSM XML file")
      ->required()
      ->check(CLI::ExistingFile);
  candidates->add_option("--lat", lat, "Latitude (degrees)")->required();
  candidates->add_option("--lon", lon, "Longitude (degrees)")->required();
  candidates->add_option("--radius", radius, "Candidate radius (meters)");

  CLI::App* score =
      app.add_subcommand("score", "Rank candidates for one observation");
  score->add_option("--osm", osm_path, "OSM XML file")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--sample", sample_path, "Sample record (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--weights", weights_path, "Weights file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--rules", rules_dir, "Rules directory");
  score->add_option("--radius", radius, "Candidate radius (meters)");

  CLI::App* train =
      app.add_subcommand("train", "Learn classifier weights from a dataset");
  train->add_option("--osm", osm_path, "OSM XML file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--dataset", dataset_dir, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--config", config_path, "GA config (JSON)")
      ->check(CLI::ExistingFile);
  train->add_option("--out", out_path, "Output weights file");
  train->add_option("--trace", trace_path,
                    "Fitness trace CSV (default: <out>_trace.csv)");
  train->add_option("--rules", rules_dir, "Rules directory");
  train->add_option("--radius", radius, "Candidate radius (meters)");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate configurations against a dataset");
  eval_cmd->add_option("--osm", osm_path, "OSM XML file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--dataset", dataset_dir, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--weights", weights_paths,
                       "Weights file(s); label = file stem");
  eval_cmd->add_flag("--baselines", baselines,
                     "Add single-classifier and equal-weight rows");
  eval_cmd->add_option("--format", format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  eval_cmd->add_option("--rules", rules_dir, "Rules directory");
  eval_cmd->add_option("--radius", radius, "Candidate radius (meters)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (candidates->parsed()) {
      return run_candidates(osm_path, lat, lon, radius);
    }
    if (score->parsed()) {
      return run_score(osm_path, sample_path, weights_path, rules_dir, radius);
    }
    if (train->parsed()) {
      return run_train(osm_path, dataset_dir, config_path, out_path,
                       trace_path, rules_dir, radius);
    }
    if (eval_cmd->parsed()) {
      return run_eval(osm_path, dataset_dir, weights_paths, baselines, format,
                      rules_dir, radius);
    }
  } catch (const sur::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
