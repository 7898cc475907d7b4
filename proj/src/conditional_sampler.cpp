#include "mtdup/conditional_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mtdup/control_stream.hpp"

namespace mtdup {

EventIndices event_indices(const GeneratorParams& params, std::uint64_t anchor,
                           unsigned k) {
  const std::uint64_t e = std::uint64_t{1} << k;
  return {anchor + e * (params.m - 1), anchor + e * (params.n - 1)};
}

bool event_holds(const GeneratorParams& params, const GeneratorState& state,
                 std::uint64_t anchor, unsigned k) {
  MersenneTwister mt(params, state);
  const EventIndices idx = event_indices(params, anchor, k);
  const std::uint64_t near = mt.word_at(idx.near);
  return near == mt.word_at(idx.far);
}

ConditionalSampler::ConditionalSampler(const TwistAlgebra& algebra, EventSet given,
                                       std::size_t position)
    : params_(algebra.params()),
      given_(std::move(given)),
      position_(position),
      constraint_(algebra.joint_constraint(given_)) {
  const std::size_t window = constraint_.window;
  if (position_ < 1 || position_ + window > params_.n) {
    throw std::out_of_range("plant window of " + std::to_string(window) +
                            " words at position " + std::to_string(position_) +
                            " does not fit in the state");
  }
  anchor_ = window == 0 ? position_ : position_ + window - 1;
  if (window > 0) basis_ = gf2::left_kernel_basis(constraint_.matrix);
}

PlantedState ConditionalSampler::sample(std::uint64_t entropy_seed,
                                        std::uint64_t trial) const {
  ControlStream entropy = ControlStream::substream(entropy_seed, trial);
  const std::uint64_t mask = params_.word_mask();
  PlantedState out;
  out.state.words.resize(params_.n);
  for (auto& word : out.state.words) word = entropy.next64() & mask;
  out.state.cursor = params_.n;
  out.state.origin = 0;
  out.anchor = anchor_;
  const std::size_t window = constraint_.window;
  if (window > 0) {
    const gf2::BitVector v =
        gf2::sample_span(basis_, constraint_.matrix.rows(), entropy);
    const std::vector<std::uint64_t> newest_first = constraint_.window_words(v);
    for (std::size_t j = 0; j < window; ++j) {
      out.state.words[position_ + window - 1 - j] = newest_first[j];
    }
  }
  return out;
}

double binomial_z(std::uint64_t hits, std::uint64_t trials, double p) {
  if (trials == 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * p * (1.0 - p));
  if (sd == 0.0) return static_cast<double>(hits) == n * p ? 0.0 : INFINITY;
  return (static_cast<double>(hits) - n * p) / sd;
}

ConditionalReport conditional_frequency(const TwistAlgebra& algebra,
                                        const EventSet& given, unsigned check,
                                        std::uint64_t trials,
                                        std::uint64_t entropy_seed,
                                        const ConditionalOptions& options) {
  ConditionalReport rep;
  rep.generator = algebra.params().name;
  rep.given = given;
  rep.check = check;
  rep.trials = trials;
  rep.entropy_seed = entropy_seed;
  rep.position = options.position;
  rep.exact_expectation = algebra.conditional_probability(given, {check});
  if (rep.exact_expectation.exponent > ConditionalOptions::kMinExpectationExponent &&
      !options.long_run) {
    throw std::invalid_argument(
        "expected conditional frequency " + rep.exact_expectation.power_string() +
        " is below 2^-20; use the exact calculator (prob) or request a long run");
  }
  const ConditionalSampler sampler(algebra, given, options.position);
  const GeneratorParams& params = algebra.params();

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t hits = 0;
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      PlantedState ps = sampler.sample(entropy_seed, trial);
      MersenneTwister mt(params, std::move(ps.state));
      const EventIndices idx = event_indices(params, ps.anchor, check);
      const std::uint64_t near = mt.word_at(idx.near);
      if (near == mt.word_at(idx.far)) ++hits;
    }
    return hits;
  };

  const unsigned workers = options.workers == 0 ? 1 : options.workers;
  if (workers == 1 || trials < workers) {
    rep.hits = run_range(0, trials);
  } else {
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    for (unsigned wi = 0; wi < workers; ++wi) {
      const std::uint64_t begin = trials * wi / workers;
      const std::uint64_t end = trials * (wi + 1) / workers;
      pool.emplace_back([&, wi, begin, end] { partial[wi] = run_range(begin, end); });
    }
    for (auto& th : pool) th.join();
    for (auto h : partial) rep.hits += h;
  }

  if (trials > 0) {
    rep.frequency = static_cast<double>(rep.hits) / static_cast<double>(trials);
    rep.z_score = binomial_z(rep.hits, trials, rep.exact_expectation.value());
  }
  return rep;
}

}  // namespace mtdup
