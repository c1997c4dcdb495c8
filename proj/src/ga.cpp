#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "sur/ga.hpp"

namespace sur::ensemble {

namespace {

using Genome = std::array<double, kClassifierCount>;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, generation, individual); breeding results
// therefore do not depend on evaluation order.
std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t generation,
                           std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ (generation + 1) * 0xD1B54A32D192ED03ULL);
  return std::mt19937_64(splitmix64(b ^ (index + 1) * 0x8CB92BA72F3D8DD7ULL));
}

bool all_zero(const Genome& g) {
  return std::all_of(g.begin(), g.end(), [](double w) { return w == 0.0; });
}

void repair_if_zero(Genome& g, std::mt19937_64& rng) {
  if (!all_zero(g)) return;
  std::uniform_int_distribution<std::size_t> pick(0, kClassifierCount - 1);
  std::uniform_real_distribution<double> value(0.0, kMaxWeight);
  const std::size_t idx = pick(rng);
  double w = 0.0;
  while (w <= 0.0) w = value(rng);
  g[idx] = w;
}

Genome random_genome(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(0.0, kMaxWeight);
  Genome g;
  for (double& w : g) w = value(rng);
  repair_if_zero(g, rng);
  return g;
}

// Winner of a k-way tournament: best fitness, ties to the lower index.
std::size_t tournament(const std::vector<double>& fitnesses,
                       std::size_t tournament_size, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fitnesses.size() - 1);
  std::size_t best = pick(rng);
  for (std::size_t i = 1; i < tournament_size; ++i) {
    const std::size_t challenger = pick(rng);
    if (fitnesses[challenger] > fitnesses[best] ||
        (fitnesses[challenger] == fitnesses[best] && challenger < best)) {
      best = challenger;
    }
  }
  return best;
}

} // namespace

void GaConfig::validate() const {
  if (population_size < 2) {
    throw InvalidInputError("ga config: population_size must be >= 2");
  }
  if (elitism_count >= population_size) {
    throw InvalidInputError("ga config: elitism_count must be < population_size");
  }
  if (tournament_size < 1) {
    throw InvalidInputError("ga config: tournament_size must be >= 1");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0) ||
      !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw InvalidInputError("ga config: rates must be in [0, 1]");
  }
  if (!(mutation_sigma >= 0.0)) {
    throw InvalidInputError("ga config: mutation_sigma must be >= 0");
  }
}

nlohmann::json GaConfig::to_json() const {
  return {{"population_size", population_size},
          {"generations", generations},
          {"tournament_size", tournament_size},
          {"crossover_rate", crossover_rate},
          {"mutation_rate", mutation_rate},
          {"mutation_sigma", mutation_sigma},
          {"elitism_count", elitism_count},
          {"rng_seed", rng_seed}};
}

GaConfig GaConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("ga config: expected an object");
  GaConfig c;
  c.population_size = doc.value("population_size", c.population_size);
  c.generations = doc.value("generations", c.generations);
  c.tournament_size = doc.value("tournament_size", c.tournament_size);
  c.crossover_rate = doc.value("crossover_rate", c.crossover_rate);
  c.mutation_rate = doc.value("mutation_rate", c.mutation_rate);
  c.mutation_sigma = doc.value("mutation_sigma", c.mutation_sigma);
  c.elitism_count = doc.value("elitism_count", c.elitism_count);
  c.rng_seed = doc.value("rng_seed", c.rng_seed);
  c.validate();
  return c;
}

GaConfig GaConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ga config: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

std::string TrainResult::trace_csv() const {
  std::ostringstream out;
  out << "generation,best,mean\n";
  out << std::setprecision(17);
  for (const GenerationStats& s : history) {
    out << s.generation << ',' << s.best << ',' << s.mean << '\n';
  }
  return out.str();
}

TrainResult train(const GaConfig& config, const TrainingCache& cache) {
  config.validate();
  if (cache.samples.empty()) {
    throw DataError("train: empty training set");
  }

  std::vector<Genome> population(config.population_size);
  for (std::size_t i = 0; i < population.size(); ++i) {
    std::mt19937_64 rng = stream_for(config.rng_seed, 0, i);
    population[i] = random_genome(rng);
  }

  std::vector<GenerationStats> history;
  history.reserve(config.generations + 1);
  Genome best_genome = population.front();
  double best_fitness = -1.0;

  std::vector<double> fitnesses(population.size());
  for (std::size_t generation = 0;; ++generation) {
    double sum = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) {
      fitnesses[i] = fitness(WeightVector(population[i]), cache);
      sum += fitnesses[i];
      if (fitnesses[i] > best_fitness) {
        best_fitness = fitnesses[i];
        best_genome = population[i];
      }
    }
    const double gen_best = *std::max_element(fitnesses.begin(), fitnesses.end());
    history.push_back(GenerationStats{
        generation, gen_best, sum / static_cast<double>(population.size())});

    if (generation == config.generations) break;

    // Rank for elitism: fitness descending, ties to the lower index.
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&fitnesses](std::size_t a, std::size_t b) {
                       return fitnesses[a] > fitnesses[b];
                     });

    std::vector<Genome> next;
    next.reserve(population.size());
    for (std::size_t i = 0; i < config.elitism_count; ++i) {
      next.push_back(population[order[i]]);
    }

    for (std::size_t i = next.size(); i < population.size(); ++i) {
      std::mt19937_64 rng = stream_for(config.rng_seed, generation + 1, i);
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      const Genome& parent_a =
          population[tournament(fitnesses, config.tournament_size, rng)];
      const Genome& parent_b =
          population[tournament(fitnesses, config.tournament_size, rng)];

      Genome child = parent_a;
      if (unit(rng) < config.crossover_rate) {
        const double lambda = unit(rng);
        for (std::size_t k = 0; k < kClassifierCount; ++k) {
          child[k] = lambda * parent_a[k] + (1.0 - lambda) * parent_b[k];
        }
      }

      std::normal_distribution<double> noise(0.0, config.mutation_sigma);
      for (double& gene : child) {
        if (unit(rng) < config.mutation_rate) {
          gene = std::clamp(gene + noise(rng), 0.0, kMaxWeight);
        }
      }
      repair_if_zero(child, rng);
      next.push_back(child);
    }
    population = std::move(next);
  }

  return TrainResult{WeightVector(best_genome), best_fitness,
                     std::move(history)};
}

TrainResult train(const GaConfig& config, const data::Dataset& training,
                  const osm::OsmData& world, const ScoringEngine& engine,
                  double candidate_radius_m) {
  return train(config,
               TrainingCache::build(training, world, engine,
                                    candidate_radius_m));
}

} // namespace sur::ensemble
