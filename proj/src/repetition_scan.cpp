#include "mtdup/repetition_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mtdup/conditional_sampler.hpp"
#include "mtdup/twist_algebra.hpp"

namespace mtdup {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::mt32: return "mt32";
    case GeneratorKind::mt64: return "mt64";
    case GeneratorKind::control: return "control";
  }
  return "?";
}

std::string to_string(RunConvention convention) {
  return convention == RunConvention::reuse_closing ? "reuse_closing" : "fresh_start";
}

GeneratorKind parse_generator_kind(const std::string& s) {
  if (s == "mt32" || s == "mt19937") return GeneratorKind::mt32;
  if (s == "mt64" || s == "mt19937_64") return GeneratorKind::mt64;
  if (s == "control") return GeneratorKind::control;
  throw std::invalid_argument("unknown generator '" + s + "'");
}

RunConvention parse_convention(const std::string& s) {
  if (s == "reuse_closing" || s == "reuse") return RunConvention::reuse_closing;
  if (s == "fresh_start" || s == "fresh") return RunConvention::fresh_start;
  throw std::invalid_argument("unknown run convention '" + s + "'");
}

// ------------------------------------------------------------- histogram

bool RunLengthHistogram::consistent() const {
  std::uint64_t sum = overflow;
  for (const auto& [len, n] : counts) {
    if (len == 0) return false;
    sum += n;
  }
  return sum == total_runs;
}

void RunLengthHistogram::merge(const RunLengthHistogram& other) {
  if (other.r_max != r_max || other.word_bits != word_bits ||
      other.convention != convention) {
    throw std::invalid_argument("cannot merge histograms with different r_max, bits or convention");
  }
  for (const auto& [len, n] : other.counts) counts[len] += n;
  for (const auto& [k, n] : other.doubling_lags) doubling_lags[k] += n;
  for (const auto& [k, n] : other.chains) chains[k] += n;
  overflow += other.overflow;
  total_runs += other.total_runs;
}

// ------------------------------------------------------------- RunMemory

RunMemory::RunMemory()
    : slots_(std::size_t{1} << kInitialLogCapacity, 0),
      log_capacity_(kInitialLogCapacity) {}

void RunMemory::next_stamp() {
  if (++stamp_ == 256) {
    std::fill(slots_.begin(), slots_.end(), 0);
    stamp_ = 1;
  }
}

void RunMemory::grow() {
  // Rehash in place: lift the live entries out, invalidate them with a new
  // stamp, then reinsert into the doubled logical table.
  spill_.clear();
  for (std::size_t i = 0; i < capacity(); ++i) {
    if ((slots_[i] & 0xFF) == stamp_) spill_.push_back(slots_[i]);
  }
  ++log_capacity_;
  if (slots_.size() < capacity()) slots_.resize(capacity(), 0);
  next_stamp();
  const std::size_t mask = capacity() - 1;
  for (const std::uint64_t s : spill_) {
    std::size_t pos = home(static_cast<std::uint32_t>(s >> 32));
    while ((slots_[pos] & 0xFF) == stamp_) pos = (pos + 1) & mask;
    slots_[pos] = (s & ~std::uint64_t{0xFF}) | stamp_;
  }
}

void RunMemory::reset() {
  size_ = 0;
  log_capacity_ = kInitialLogCapacity;
  next_stamp();
}

// ------------------------------------------------------------- RunScanner

RunScanner::RunScanner(std::uint64_t r_max, RunConvention convention,
                       bool annotate_lags, LagPattern pattern)
    : r_max_(r_max), convention_(convention), annotate_(annotate_lags),
      pattern_(pattern) {
  if (r_max_ == 0) throw std::invalid_argument("r_max must be at least 1");
  if (r_max_ >= RunMemory::kMaxIndex) {
    throw std::invalid_argument("r_max must be below 2^24 - 1");
  }
  hist_.r_max = r_max_;
  hist_.convention = to_string(convention_);
}

void RunScanner::start_run_with(std::uint32_t value) {
  run_.push_back(value);
  memory_.find_or_insert(value, 0);
}

void RunScanner::record(std::uint64_t length, std::uint64_t lag) {
  ++hist_.counts[length];
  ++hist_.total_runs;
  if (annotate_) {
    for (unsigned k = 0; k < pattern_.levels; ++k) {
      if (lag == pattern_.lag_base << k) ++hist_.doubling_lags[k];
      if (previous_lag_ == pattern_.lag_base << k && length == pattern_.length_base << k) {
        ++hist_.chains[k];
      }
    }
  }
  previous_lag_ = lag;
}

std::optional<std::uint64_t> RunScanner::feed(std::uint32_t value) {
  if (run_.empty()) {
    start_run_with(value);
    return std::nullopt;
  }
  const auto index = static_cast<std::uint32_t>(run_.size());
  if (auto earlier = memory_.find_or_insert(value, index)) {
    const std::uint64_t length =
        convention_ == RunConvention::reuse_closing ? index : std::uint64_t{index} + 1;
    record(length, index - *earlier);
    memory_.reset();
    run_.clear();
    if (convention_ == RunConvention::reuse_closing) start_run_with(value);
    return length;
  }
  run_.push_back(value);
  const std::uint64_t limit =
      convention_ == RunConvention::reuse_closing ? r_max_ + 1 : r_max_;
  if (run_.size() >= limit) {
    ++hist_.overflow;
    ++hist_.total_runs;
    previous_lag_ = 0;
    memory_.reset();
    run_.clear();
  }
  return std::nullopt;
}

RunScanner::Snapshot RunScanner::snapshot() const {
  return {hist_, run_, previous_lag_};
}

RunScanner RunScanner::restore(const Snapshot& snap, bool annotate_lags,
                               LagPattern pattern) {
  RunScanner sc(snap.histogram.r_max, parse_convention(snap.histogram.convention),
                annotate_lags, pattern);
  sc.hist_ = snap.histogram;
  sc.previous_lag_ = snap.previous_lag;
  for (std::size_t i = 0; i < snap.pending.size(); ++i) {
    if (sc.memory_.find_or_insert(snap.pending[i], static_cast<std::uint32_t>(i))) {
      throw std::invalid_argument("snapshot pending run contains a duplicate");
    }
  }
  sc.run_ = snap.pending;
  return sc;
}

// ----------------------------------------------------------- OutputStream

OutputStream::OutputStream(GeneratorKind kind, std::uint64_t seed, bool tempered)
    : kind_(kind), tempered_(tempered), control_(seed) {
  if (kind_ == GeneratorKind::mt32) {
    mt_.emplace(MersenneTwister::seeded(GeneratorParams::mt19937(), seed));
  } else if (kind_ == GeneratorKind::mt64) {
    mt_.emplace(MersenneTwister::seeded(GeneratorParams::mt19937_64(), seed));
  }
}

std::uint32_t OutputStream::next() {
  switch (kind_) {
    case GeneratorKind::mt32:
      return static_cast<std::uint32_t>(tempered_ ? mt_->next_tempered()
                                                  : mt_->next_untempered());
    case GeneratorKind::mt64:
      return static_cast<std::uint32_t>(
          (tempered_ ? mt_->next_tempered() : mt_->next_untempered()) >> 32);
    case GeneratorKind::control:
      return control_.next32();
  }
  return 0;
}

void OutputStream::restore(const GeneratorState& mt_state, std::uint64_t control_counter) {
  if (mt_) *mt_ = MersenneTwister(mt_->params(), mt_state);
  control_ = ControlStream(control_counter);
}

namespace {

RunScanner fresh_scanner(const ScanConfig& config) {
  RunScanner scanner(config.r_max, config.convention, config.annotate_lags);
  auto& hist = scanner.histogram();
  hist.generator_id = to_string(config.generator);
  hist.seed = config.seed;
  hist.tempered = config.tempered;
  hist.word_bits = 32;
  return scanner;
}

}  // namespace

ScanSession::ScanSession(const ScanConfig& config, RunScanner scanner)
    : config_(config),
      scanner_(std::move(scanner)),
      stream_(config.generator, config.seed, config.tempered) {}

ScanSession::ScanSession(const ScanConfig& config)
    : ScanSession(config, fresh_scanner(config)) {}

ScanSession ScanSession::resume(const ScanCheckpoint& checkpoint) {
  ScanSession session(checkpoint.config,
                      RunScanner::restore(checkpoint.scanner, checkpoint.config.annotate_lags));
  session.stream_.restore(checkpoint.mt_state, checkpoint.control_counter);
  return session;
}

void ScanSession::run_until(std::uint64_t runs) {
  const auto& hist = scanner_.histogram();
  while (hist.total_runs < runs) scanner_.feed(stream_.next());
}

ScanCheckpoint ScanSession::checkpoint() const {
  return {config_, scanner_.snapshot(), stream_.mt_state(), stream_.control_counter()};
}

RunLengthHistogram scan(const ScanConfig& config) {
  ScanSession session(config);
  session.run_until(config.num_runs);
  return session.histogram();
}

// -------------------------------------------------------------- baseline

unsigned Baseline::tail_zeros() const {
  const long double x = -log10_tail;
  if (x <= 0) return 0;
  if (std::isinf(x)) return std::numeric_limits<unsigned>::max();
  const long double fl = std::floor(x);
  return static_cast<unsigned>(fl == x ? fl - 1 : fl);
}

Baseline expected_distribution(std::uint64_t total_runs, std::uint64_t r_max,
                               unsigned word_bits, RunConvention convention) {
  if (word_bits == 0 || word_bits > 64) throw std::invalid_argument("word_bits must be 1..64");
  Baseline out;
  out.total_runs = total_runs;
  out.r_max = r_max;
  out.word_bits = word_bits;
  out.expected.assign(r_max + 1, 0.0);

  // Under fresh_start a run of index-length r is reported as r + 1.
  const std::uint64_t shift = convention == RunConvention::fresh_start ? 1 : 0;
  const std::uint64_t limit = r_max >= shift ? r_max - shift : 0;
  const long double space = std::ldexp(1.0L, static_cast<int>(word_bits));
  const long double runs = static_cast<long double>(total_runs);

  // log prod_{j=1}^{r-1} (1 - j/N), Kahan-compensated.
  long double log_survive = 0;
  long double comp = 0;
  for (std::uint64_t r = 1; r <= limit; ++r) {
    const long double rr = static_cast<long double>(r);
    out.expected[r + shift] =
        static_cast<double>(runs * (rr / space) * std::exp(log_survive));
    if (rr >= space) {  // every value seen: no run survives past r
      log_survive = -std::numeric_limits<long double>::infinity();
      break;
    }
    const long double term = std::log1p(-rr / space) - comp;
    const long double sum = log_survive + term;
    comp = (sum - log_survive) - term;
    log_survive = sum;
  }
  out.log10_tail = log_survive / std::log(10.0L);
  out.overflow_expected = static_cast<double>(runs * std::exp(log_survive));
  return out;
}

double baseline_mean(unsigned word_bits) {
  const long double space = std::ldexp(1.0L, static_cast<int>(word_bits));
  if (word_bits > 40) {
    // Ramanujan's Q(N) expansion; the direct sum would need ~sqrt(N) terms.
    return static_cast<double>(std::sqrt(std::numbers::pi_v<long double> * space / 2) -
                               1.0L / 3 +
                               std::sqrt(std::numbers::pi_v<long double> / (2 * space)) / 12);
  }
  long double sum = 0;
  long double survive = 1;  // P(R > r)
  for (std::uint64_t r = 0; survive > 1e-30L; ++r) {
    sum += survive;
    survive *= 1 - static_cast<long double>(r + 1) / space;
  }
  return static_cast<double>(sum);
}

// ----------------------------------------------------------------- spikes

double poisson_z(std::uint64_t observed, double expected) {
  if (expected <= 0) {
    return observed == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (static_cast<double>(observed) - expected) / std::sqrt(expected);
}

double poisson_sf(std::uint64_t k, double mean) {
  if (k == 0) return 1.0;
  if (mean <= 0) return 0.0;
  // Sum the upper tail from k when it is the short side, else 1 - lower.
  const long double mu = mean;
  auto log_pmf = [&](std::uint64_t j) {
    return -mu + static_cast<long double>(j) * std::log(mu) -
           std::lgamma(static_cast<long double>(j) + 1);
  };
  if (static_cast<double>(k) > mean) {
    long double sum = 0;
    long double term = std::exp(log_pmf(k));
    for (std::uint64_t j = k; term > sum * 1e-20L && j < k + 100000; ++j) {
      sum += term;
      term *= mu / static_cast<long double>(j + 1);
    }
    return static_cast<double>(sum);
  }
  long double lower = 0;
  for (std::uint64_t j = 0; j < k; ++j) lower += std::exp(log_pmf(j));
  return static_cast<double>(std::max(0.0L, 1 - lower));
}

std::uint64_t poisson_upper_bound(double mean, double tail) {
  std::uint64_t c = static_cast<std::uint64_t>(std::max(0.0, std::floor(mean)));
  while (poisson_sf(c + 1, mean) > tail) ++c;
  return c;
}

namespace {

SpikeRow make_row(std::uint64_t r, std::uint64_t observed, double expected) {
  SpikeRow row;
  row.run_length = r;
  row.observed = observed;
  row.expected = expected;
  if (expected > 0) {
    row.ratio = static_cast<double>(observed) / expected;
  } else {
    row.ratio = observed == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  row.z = poisson_z(observed, expected);
  row.bound = poisson_upper_bound(expected);
  return row;
}

}  // namespace

SpikeReport spike_report(const RunLengthHistogram& hist,
                         const std::map<std::uint64_t, double>& expected,
                         const Baseline* fallback) {
  auto expected_at = [&](std::uint64_t r) {
    if (auto it = expected.find(r); it != expected.end()) return it->second;
    return fallback != nullptr ? fallback->at(r) : 0.0;
  };
  SpikeReport rep;
  for (std::uint64_t centre : {623u, 1246u, 2492u}) {
    for (std::uint64_t r = centre - 1; r <= centre + 1; ++r) {
      rep.rows.push_back(make_row(r, hist.count(r), expected_at(r)));
    }
  }
  bool first = true;
  for (const auto& [r, n] : hist.counts) {
    const double e = expected_at(r);
    if (e < 1.0) continue;
    const SpikeRow row = make_row(r, n, e);
    if (first || row.ratio > rep.max_ratio.ratio) rep.max_ratio = row;
    if (first || row.z > rep.max_z.z) rep.max_z = row;
    first = false;
  }
  return rep;
}

SpikeReport spike_report(const RunLengthHistogram& hist, const Baseline& baseline) {
  return spike_report(hist, {}, &baseline);
}

// --------------------------------------------------------- planted spikes

PlantedSpikeReport planted_spike_trial(std::uint64_t trials, std::uint64_t entropy_seed) {
  PlantedSpikeReport rep;
  rep.trials = trials;
  rep.entropy_seed = entropy_seed;
  const GeneratorParams params = GeneratorParams::mt19937();
  const std::uint64_t chained = params.n - 1;

  long double log_survive = 0;
  for (std::uint64_t j = 1; j + 1 <= chained; ++j) {
    log_survive += std::log1p(-static_cast<long double>(j) / 4294967296.0L);
  }
  rep.no_early_duplicate = static_cast<double>(std::exp(log_survive));
  rep.expected_623 = 0.5 * rep.no_early_duplicate;
  if (trials == 0) return rep;

  const TwistAlgebra algebra(params);
  const ConditionalSampler sampler(algebra, {0});
  RunMemory memory;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    PlantedState ps = sampler.sample(entropy_seed, trial);
    MersenneTwister mt(params, std::move(ps.state));
    // The E_0 duplicate closes a run at x_{i+n-1}; that output is index 0
    // of the run examined here.
    const std::uint64_t boundary = event_indices(params, ps.anchor, 0).far;
    memory.reset();
    for (std::uint32_t idx = 0; idx <= chained + 1; ++idx) {
      const auto value = static_cast<std::uint32_t>(mt.word_at(boundary + idx));
      if (memory.find_or_insert(value, idx)) {
        if (idx == chained - 1) ++rep.len_622;
        if (idx == chained) ++rep.len_623;
        if (idx == chained + 1) ++rep.len_624;
        break;
      }
    }
  }
  const double n = static_cast<double>(trials);
  rep.frequency_of_622 = static_cast<double>(rep.len_622) / n;
  rep.frequency_of_623 = static_cast<double>(rep.len_623) / n;
  rep.frequency_of_624 = static_cast<double>(rep.len_624) / n;
  rep.z_score = binomial_z(rep.len_623, trials, rep.expected_623);
  return rep;
}

}  // namespace mtdup
