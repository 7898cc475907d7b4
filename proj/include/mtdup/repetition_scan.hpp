#pragma once

// Modified repetition test.
//
// Outputs are memorized from index 0 of a run; the run ends at the first
// index r whose value equals an earlier value of the same run, and r is the
// run-length.  The generator is never re-initialized between runs.  Under
// the default convention the duplicate-closing output becomes index 0 of
// the next run, so an E_0 duplicate (lag n-m) followed by E_1 produces a
// next run of length exactly n-1 = 623.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtdup/control_stream.hpp"
#include "mtdup/mt_engine.hpp"

namespace mtdup {

enum class GeneratorKind { mt32, mt64, control };
enum class RunConvention {
  reuse_closing,  ///< closing output is index 0 of the next run; length = index
  fresh_start,    ///< next run starts after it; length = number of draws
};

std::string to_string(GeneratorKind kind);
std::string to_string(RunConvention convention);
GeneratorKind parse_generator_kind(const std::string& s);
RunConvention parse_convention(const std::string& s);

/// MT19937 lags: E_0 duplicates have lag n - m = 227 and the chained run has
/// length n - 1 = 623; both double with each event index.
struct LagPattern {
  std::uint64_t lag_base = 227;
  std::uint64_t length_base = 623;
  unsigned levels = 6;
};

struct RunLengthHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;  ///< run_length -> runs
  std::uint64_t overflow = 0;                     ///< runs longer than r_max
  std::uint64_t total_runs = 0;
  std::uint64_t r_max = 0;
  std::string generator_id;
  std::uint64_t seed = 0;
  std::string convention = "reuse_closing";
  bool tempered = true;
  unsigned word_bits = 32;
  /// k -> runs terminated by a duplicate at lag lag_base * 2^k.
  std::map<unsigned, std::uint64_t> doubling_lags;
  /// k -> runs of length length_base * 2^k that immediately follow a run
  /// terminated at lag lag_base * 2^k.
  std::map<unsigned, std::uint64_t> chains;

  std::uint64_t count(std::uint64_t run_length) const {
    auto it = counts.find(run_length);
    return it == counts.end() ? 0 : it->second;
  }
  /// Sum of all buckets including overflow equals total_runs.
  bool consistent() const;
  /// Additive merge; throws std::invalid_argument if r_max or word_bits differ.
  void merge(const RunLengthHistogram& other);

  friend bool operator==(const RunLengthHistogram&, const RunLengthHistogram&) = default;
};

/// Per-run duplicate detector: open addressing keyed by value, reset by
/// generation stamps instead of clearing.  Each slot packs value (32 bits),
/// run index (24 bits) and stamp (8 bits), so run indices must stay below
/// 2^24.
class RunMemory {
 public:
  static constexpr unsigned kInitialLogCapacity = 18;
  static constexpr std::uint32_t kMaxIndex = (1u << 24) - 1;

  RunMemory();
  /// Index of an earlier occurrence of `value`, or inserts (value, index).
  std::optional<std::uint32_t> find_or_insert(std::uint32_t value, std::uint32_t index) {
    const std::size_t mask = capacity() - 1;
    std::size_t pos = home(value);
    for (;;) {
      const std::uint64_t slot = slots_[pos];
      if ((slot & 0xFF) != stamp_) break;
      if ((slot >> 32) == value) return static_cast<std::uint32_t>((slot >> 8) & kMaxIndex);
      pos = (pos + 1) & mask;
    }
    slots_[pos] = (std::uint64_t{value} << 32) | (std::uint64_t{index} << 8) | stamp_;
    if (++size_ * 2 > capacity()) grow();
    return std::nullopt;
  }
  /// Forgets all entries.  The logical capacity returns to its initial
  /// value; storage grown by a long run is kept for later runs.
  void reset();
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return std::size_t{1} << log_capacity_; }

 private:
  void grow();
  void next_stamp();
  std::size_t home(std::uint32_t value) const {
    return static_cast<std::size_t>((value * 0x9E3779B97F4A7C15ull) >> (64 - log_capacity_));
  }

  std::vector<std::uint64_t> slots_;  ///< physical storage >= capacity()
  std::vector<std::uint64_t> spill_;
  unsigned log_capacity_;
  std::uint64_t stamp_ = 1;
  std::size_t size_ = 0;
};

/// Streaming scanner; feed() one output at a time.
class RunScanner {
 public:
  struct Snapshot {
    RunLengthHistogram histogram;
    std::vector<std::uint32_t> pending;  ///< outputs of the unfinished run
    std::uint64_t previous_lag = 0;      ///< 0 when no lag to chain from
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
  };

  RunScanner(std::uint64_t r_max, RunConvention convention, bool annotate_lags,
             LagPattern pattern = {});

  /// Returns the run-length when this output closes a run.
  std::optional<std::uint64_t> feed(std::uint32_t value);

  const RunLengthHistogram& histogram() const { return hist_; }
  RunLengthHistogram& histogram() { return hist_; }

  Snapshot snapshot() const;
  static RunScanner restore(const Snapshot& snap, bool annotate_lags,
                            LagPattern pattern = {});

 private:
  void record(std::uint64_t length, std::uint64_t lag);
  void start_run_with(std::uint32_t value);

  std::uint64_t r_max_;
  RunConvention convention_;
  bool annotate_;
  LagPattern pattern_;
  RunLengthHistogram hist_;
  RunMemory memory_;
  std::vector<std::uint32_t> run_;
  std::uint64_t previous_lag_ = 0;
};

struct ScanConfig {
  std::uint64_t num_runs = 0;
  std::uint64_t r_max = 2'100'000;
  GeneratorKind generator = GeneratorKind::mt32;
  std::uint64_t seed = 5489;
  bool tempered = true;
  bool annotate_lags = true;
  RunConvention convention = RunConvention::reuse_closing;

  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

/// 32-bit output stream for the scanner.  MT19937-64 contributes the high
/// 32 bits of each (tempered or untempered) 64-bit word.
class OutputStream {
 public:
  OutputStream(GeneratorKind kind, std::uint64_t seed, bool tempered);
  std::uint32_t next();

  /// Generator position: MT state words, or the control counter.
  GeneratorState mt_state() const { return mt_ ? mt_->state() : GeneratorState{}; }
  std::uint64_t control_counter() const { return control_.counter(); }
  void restore(const GeneratorState& mt_state, std::uint64_t control_counter);

 private:
  GeneratorKind kind_;
  bool tempered_;
  std::optional<MersenneTwister> mt_;
  ControlStream control_;
};

/// Everything needed to continue a scan bit-for-bit.
struct ScanCheckpoint {
  ScanConfig config;
  RunScanner::Snapshot scanner;
  GeneratorState mt_state;  ///< empty for the control generator
  std::uint64_t control_counter = 0;

  friend bool operator==(const ScanCheckpoint&, const ScanCheckpoint&) = default;
};

class ScanSession {
 public:
  /// Throws std::invalid_argument when r_max == 0.
  explicit ScanSession(const ScanConfig& config);
  static ScanSession resume(const ScanCheckpoint& checkpoint);

  /// Feeds outputs until `runs` runs (overflow included) are recorded.
  void run_until(std::uint64_t runs);
  ScanCheckpoint checkpoint() const;
  const RunLengthHistogram& histogram() const { return scanner_.histogram(); }
  const ScanConfig& config() const { return config_; }

 private:
  ScanSession(const ScanConfig& config, RunScanner scanner);

  ScanConfig config_;
  RunScanner scanner_;
  OutputStream stream_;
};

/// Runs config.num_runs runs from the seeded generator.
RunLengthHistogram scan(const ScanConfig& config);

/// Exact first-collision law for ideal uniform words of `word_bits` bits:
/// P(R = r) = (r / 2^b) prod_{j=1}^{r-1} (1 - j / 2^b), evaluated in log
/// space.
struct Baseline {
  std::uint64_t total_runs = 0;
  std::uint64_t r_max = 0;
  unsigned word_bits = 32;
  std::vector<double> expected;  ///< expected[r] = total_runs * P(R = r)
  double overflow_expected = 0;  ///< total_runs * P(R > r_max)
  long double log10_tail = 0;    ///< log10 P(R > r_max)

  double at(std::uint64_t r) const { return r < expected.size() ? expected[r] : 0.0; }
  /// Zeros between the decimal point and the first significant digit of
  /// P(R > r_max).
  unsigned tail_zeros() const;
};

Baseline expected_distribution(std::uint64_t total_runs, std::uint64_t r_max,
                               unsigned word_bits,
                               RunConvention convention = RunConvention::reuse_closing);

/// E[R] under the reuse convention, by summing P(R > r).
double baseline_mean(unsigned word_bits);

struct SpikeRow {
  std::uint64_t run_length = 0;
  std::uint64_t observed = 0;
  double expected = 0;
  double ratio = 0;
  double z = 0;
  std::uint64_t bound = 0;  ///< Poisson 5-sigma upper bound on the count
  bool exceeds_bound() const { return observed > bound; }
};

struct SpikeReport {
  std::vector<SpikeRow> rows;  ///< 622..624, 1245..1247, 2491..2493
  SpikeRow max_ratio;          ///< over buckets with expected >= 1
  SpikeRow max_z;
};

/// Expected counts for lengths missing from `expected` fall back to
/// `fallback` (when given).
SpikeReport spike_report(const RunLengthHistogram& hist,
                         const std::map<std::uint64_t, double>& expected,
                         const Baseline* fallback = nullptr);
SpikeReport spike_report(const RunLengthHistogram& hist, const Baseline& baseline);

/// Poisson z-score (observed - expected) / sqrt(expected).
double poisson_z(std::uint64_t observed, double expected);

/// One-sided normal tail beyond 5 standard deviations.
inline constexpr double kFiveSigmaTail = 2.866515718791939e-7;

/// P(X >= k) for X ~ Poisson(mean).
double poisson_sf(std::uint64_t k, double mean);

/// Smallest count c with P(X > c) <= tail for X ~ Poisson(mean).  Unlike
/// the z-score this stays meaningful for expected counts far below 1.
std::uint64_t poisson_upper_bound(double mean, double tail = kFiveSigmaTail);

struct PlantedSpikeReport {
  std::uint64_t trials = 0;
  std::uint64_t entropy_seed = 0;
  std::uint64_t len_622 = 0;
  std::uint64_t len_623 = 0;
  std::uint64_t len_624 = 0;
  double frequency_of_623 = 0;
  double frequency_of_622 = 0;
  double frequency_of_624 = 0;
  double expected_623 = 0;           ///< (1/2) prod_{j=1}^{622} (1 - j/2^32)
  double no_early_duplicate = 0;     ///< the product alone
  double z_score = 0;
};

/// Plants E_0-satisfying MT19937 states and scans the run that starts at
/// the E_0 duplicate-closing output.
PlantedSpikeReport planted_spike_trial(std::uint64_t trials, std::uint64_t entropy_seed);

}  // namespace mtdup
