#include "popsize/simulate.hpp"

#include <cmath>

#include "popsize/errors.hpp"

namespace popsize {

std::uint64_t Splitmix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Splitmix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double Splitmix64::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::int64_t SimulatedPopulation::n_observed() const {
  std::int64_t n = 0;
  for (const SimulatedUnit &u : units)
    n += u.observed ? 1 : 0;
  return n;
}

FrequencyTable SimulatedPopulation::observed_table() const {
  std::vector<int> counts;
  for (const SimulatedUnit &u : units)
    if (u.observed)
      counts.push_back(static_cast<int>(u.count));
  return table_from_counts(counts);
}

namespace {

// substream seed for unit i of population seed: two finalizer rounds so
// neighbouring seeds and neighbouring units decorrelate
std::uint64_t unit_stream_seed(std::uint64_t seed, std::int64_t i) {
  const std::uint64_t a =
      Splitmix64::mix(seed + 0x9e3779b97f4a7c15ULL *
                                 (static_cast<std::uint64_t>(i) + 1));
  return Splitmix64::mix(a ^ 0xd1b54a32d192ed03ULL);
}

std::int64_t poisson_inversion_small(double lambda, Splitmix64 &rng) {
  const double u = rng.next_double();
  double p = std::exp(-lambda);
  double cdf = p;
  std::int64_t k = 0;
  while (u >= cdf && k < 400) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

} // namespace

std::int64_t poisson_draw(double lambda, Splitmix64 &rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("poisson_draw: lambda must be positive and finite");
  if (lambda <= 30.0)
    return poisson_inversion_small(lambda, rng);
  const int chunks = static_cast<int>(std::ceil(lambda / 30.0));
  const double part = lambda / chunks;
  std::int64_t total = 0;
  for (int c = 0; c < chunks; ++c)
    total += poisson_inversion_small(part, rng);
  return total;
}

SimulatedPopulation simulate_poisson(std::int64_t n_pop, double lambda,
                                     std::uint64_t seed) {
  return simulate_mixture(n_pop, {{1.0, lambda}}, seed);
}

SimulatedPopulation
simulate_mixture(std::int64_t n_pop,
                 const std::vector<MixtureComponent> &components,
                 std::uint64_t seed) {
  if (n_pop < 1)
    throw DomainError("simulate_mixture: population size must be >= 1");
  if (components.empty())
    throw DomainError("simulate_mixture: no components");
  double weight_sum = 0.0;
  for (const MixtureComponent &c : components) {
    if (!(c.weight > 0.0))
      throw DomainError("simulate_mixture: weights must be positive");
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda))
      throw DomainError("simulate_mixture: rates must be positive and "
                        "finite");
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw DomainError("simulate_mixture: weights must sum to 1");

  SimulatedPopulation pop;
  pop.true_n = n_pop;
  pop.seed = seed;
  pop.units.resize(static_cast<std::size_t>(n_pop));
  for (std::int64_t i = 0; i < n_pop; ++i) {
    Splitmix64 rng(unit_stream_seed(seed, i));
    const double u = rng.next_double();
    double cum = 0.0;
    const MixtureComponent *chosen = &components.back();
    for (const MixtureComponent &c : components) {
      cum += c.weight;
      if (u < cum) {
        chosen = &c;
        break;
      }
    }
    SimulatedUnit &unit = pop.units[static_cast<std::size_t>(i)];
    unit.true_lambda = chosen->lambda;
    unit.count = poisson_draw(chosen->lambda, rng);
    unit.observed = unit.count >= 1;
  }
  return pop;
}

PopulationEstimate truncate_and_estimate(const SimulatedPopulation &pop,
                                         Method method) {
  const FrequencyTable table = pop.observed_table();
  switch (method) {
  case Method::Zelterman:
    return zelterman_estimate(table);
  case Method::Chao:
    return chao_estimate(table);
  case Method::ZTPoissonMLE:
    return zt_poisson_mle(table).second;
  default:
    throw UsageError("truncate_and_estimate: regression methods need "
                     "covariates; use a homogeneous method");
  }
}

} // namespace popsize
