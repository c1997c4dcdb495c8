#ifndef SUR_GA_HPP
#define SUR_GA_HPP

#include <filesystem>

#include "sur/ensemble.hpp"

// Genetic algorithm over the weight vector: tournament selection,
// arithmetic crossover, Gaussian mutation, elitism. Fully reproducible
// from rng_seed; the per-individual randomness is derived from
// (rng_seed, generation, index), so results do not depend on evaluation
// order.

namespace sur::ensemble {

struct GaConfig {
  std::size_t population_size = 64;
  std::size_t generations = 100;
  std::size_t tournament_size = 4;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  double mutation_sigma = 0.5;
  std::size_t elitism_count = 2;
  std::uint64_t rng_seed = 1;

  void validate() const; // InvalidInputError on violation

  nlohmann::json to_json() const;
  static GaConfig from_json(const nlohmann::json& doc);
  static GaConfig load(const std::filesystem::path& path);
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct TrainResult {
  WeightVector weights;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history; // one row per generation, 0 first

  // "generation,best,mean" rows.
  std::string trace_csv() const;
};

TrainResult train(const GaConfig& config, const TrainingCache& cache);
TrainResult train(const GaConfig& config, const data::Dataset& training,
                  const osm::OsmData& world, const ScoringEngine& engine,
                  double candidate_radius_m = osm::kDefaultCandidateRadiusM);

} // namespace sur::ensemble

#endif // SUR_GA_HPP
