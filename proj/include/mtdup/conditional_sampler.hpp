#pragma once

// Constrained state planting: draws generator states that satisfy a given
// set of lagged-equality events exactly, uniformly among such states, and
// measures how often another event follows.

#include <cstdint>
#include <string>

#include "mtdup/gf2.hpp"
#include "mtdup/mt_engine.hpp"
#include "mtdup/twist_algebra.hpp"

namespace mtdup {

struct PlantedState {
  GeneratorState state;
  /// Absolute index i of the newest window word x_i.
  std::uint64_t anchor = 0;
};

/// x_{i + 2^k (m-1)} and x_{i + 2^k (n-1)}: the two sides of event E_k.
struct EventIndices {
  std::uint64_t near = 0;
  std::uint64_t far = 0;
};
EventIndices event_indices(const GeneratorParams& params, std::uint64_t anchor,
                           unsigned k);

/// Runs `state` forward and tests E_k at `anchor`.
bool event_holds(const GeneratorParams& params, const GeneratorState& state,
                 std::uint64_t anchor, unsigned k);

class ConditionalSampler {
 public:
  static constexpr std::size_t kDefaultPlantPosition = 1;

  /// Throws std::out_of_range when the constraint window does not fit in
  /// state words [position, n).
  ConditionalSampler(const TwistAlgebra& algebra, EventSet given,
                     std::size_t position = kDefaultPlantPosition);

  /// State for trial `trial` under `entropy_seed`: unconstrained words from
  /// the control stream, the window uniform over the constraint's kernel.
  /// Bit-for-bit reproducible from (given, position, seed, trial).
  PlantedState sample(std::uint64_t entropy_seed, std::uint64_t trial) const;

  const ConstraintSystem& constraint() const { return constraint_; }
  const EventSet& given() const { return given_; }
  std::size_t position() const { return position_; }
  std::uint64_t anchor() const { return anchor_; }
  std::size_t kernel_dimension() const { return basis_.size(); }

 private:
  GeneratorParams params_;
  EventSet given_;
  std::size_t position_;
  std::uint64_t anchor_;
  ConstraintSystem constraint_;
  std::vector<gf2::BitVector> basis_;
};

struct ConditionalOptions {
  std::size_t position = ConditionalSampler::kDefaultPlantPosition;
  unsigned workers = 1;
  /// Allow expectations below kMinExpectation.
  bool long_run = false;
  static constexpr unsigned kMinExpectationExponent = 20;
};

struct ConditionalReport {
  std::string generator;
  EventSet given;
  unsigned check = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  std::uint64_t entropy_seed = 0;
  std::size_t position = 0;
  DyadicProb exact_expectation;
  double frequency = 0.0;
  double z_score = 0.0;

  friend bool operator==(const ConditionalReport&, const ConditionalReport&) = default;
};

/// Throws std::invalid_argument when the exact expectation is below
/// 2^-20 and options.long_run is not set.
ConditionalReport conditional_frequency(const TwistAlgebra& algebra,
                                        const EventSet& given, unsigned check,
                                        std::uint64_t trials,
                                        std::uint64_t entropy_seed,
                                        const ConditionalOptions& options = {});

/// Binomial z-score of `hits` out of `trials` against probability p.
double binomial_z(std::uint64_t hits, std::uint64_t trials, double p);

}  // namespace mtdup
