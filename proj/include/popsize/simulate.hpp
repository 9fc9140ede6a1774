#ifndef POPSIZE_SIMULATE_HPP
#define POPSIZE_SIMULATE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "popsize/estimators.hpp"

namespace popsize {

// PRNG stream identifier reported alongside simulation output. Counts
// are drawn by Poisson inversion from per-unit splitmix64 substreams,
// so identical (seed, n_pop, components) give identical populations on
// every platform.
inline constexpr const char *kPrngStream = "splitmix64-v1";

/// splitmix64: 64-bit state, one mix per output word.
class Splitmix64 {
public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // uniform in [0, 1), 53 random bits
  double next_double();

  // finalizer only, for deriving substream seeds
  static std::uint64_t mix(std::uint64_t z);

private:
  std::uint64_t state_;
};

struct SimulatedUnit {
  double true_lambda = 0.0;
  std::int64_t count = 0;
  bool observed = false;   // count >= 1
};

struct SimulatedPopulation {
  std::int64_t true_n = 0;
  std::vector<SimulatedUnit> units;
  std::uint64_t seed = 0;

  std::int64_t n_observed() const;
  FrequencyTable observed_table() const;
};

struct MixtureComponent {
  double weight = 0.0;
  double lambda = 0.0;
};

// One Poisson draw by inversion of the CDF; rates above 30 are split
// into independent Poisson(lambda/m) chunks so e^{-lambda} never
// underflows the inversion start.
std::int64_t poisson_draw(double lambda, Splitmix64 &rng);

SimulatedPopulation simulate_poisson(std::int64_t n_pop, double lambda,
                                     std::uint64_t seed);

SimulatedPopulation
simulate_mixture(std::int64_t n_pop,
                 const std::vector<MixtureComponent> &components,
                 std::uint64_t seed);

// Build the zero-truncated table from the observed units and run the
// named homogeneous estimator on it.
PopulationEstimate truncate_and_estimate(const SimulatedPopulation &pop,
                                         Method method);

} // namespace popsize

#endif
