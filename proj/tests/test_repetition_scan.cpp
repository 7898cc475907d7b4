#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "mtdup/repetition_scan.hpp"

using namespace mtdup;

namespace {

std::vector<std::uint64_t> feed_all(RunScanner& sc, const std::vector<std::uint32_t>& xs) {
  std::vector<std::uint64_t> lengths;
  for (auto x : xs) {
    if (auto len = sc.feed(x)) lengths.push_back(*len);
  }
  return lengths;
}

}  // namespace

TEST(RunScanner, FirstDuplicateAtIndexTwo) {
  RunScanner sc(100, RunConvention::reuse_closing, false);
  EXPECT_EQ(feed_all(sc, {5, 9, 5}), (std::vector<std::uint64_t>{2}));
  RunScanner fresh(100, RunConvention::fresh_start, false);
  EXPECT_EQ(feed_all(fresh, {5, 9, 5}), (std::vector<std::uint64_t>{3}));
}

TEST(RunScanner, ClosingOutputStartsTheNextRun) {
  // Runs: [5 9 5] -> 2, [5 7 7] -> 2 (the closing 5 is index 0), [7 1 5 ...].
  RunScanner sc(100, RunConvention::reuse_closing, false);
  EXPECT_EQ(feed_all(sc, {5, 9, 5, 7, 7, 1, 5}), (std::vector<std::uint64_t>{2, 2}));
  // fresh_start: [5 9 5] -> 3, [7 7] -> 2, [1 5 ...] open.
  RunScanner fresh(100, RunConvention::fresh_start, false);
  EXPECT_EQ(feed_all(fresh, {5, 9, 5, 7, 7, 1, 5}), (std::vector<std::uint64_t>{3, 2}));
}

TEST(RunScanner, ImmediateRepeatHasLengthOne) {
  RunScanner sc(100, RunConvention::reuse_closing, false);
  EXPECT_EQ(feed_all(sc, {4, 4, 4}), (std::vector<std::uint64_t>{1, 1}));
}

TEST(RunScanner, OverflowBucket) {
  RunScanner sc(10, RunConvention::reuse_closing, false);
  std::vector<std::uint32_t> xs;
  for (std::uint32_t i = 0; i < 11; ++i) xs.push_back(i);
  EXPECT_TRUE(feed_all(sc, xs).empty());
  EXPECT_EQ(sc.histogram().overflow, 1u);
  EXPECT_EQ(sc.histogram().total_runs, 1u);
  // A duplicate at index exactly r_max is still recorded.
  RunScanner edge(10, RunConvention::reuse_closing, false);
  xs.back() = 0;
  EXPECT_EQ(feed_all(edge, xs), (std::vector<std::uint64_t>{10}));
  EXPECT_THROW(RunScanner(0, RunConvention::reuse_closing, false), std::invalid_argument);
}

TEST(RunScanner, LagAnnotationAndChains) {
  const LagPattern pat{2, 3, 2};  // lags 2, 4; chained lengths 3, 6
  // [1 2 3 2]: length 3, lag 2.  [2 8 9 8]: length 3 right after lag 2.
  RunScanner a(100, RunConvention::reuse_closing, true, pat);
  feed_all(a, {1, 2, 3, 2, 8, 9, 8});
  EXPECT_EQ(a.histogram().doubling_lags.at(0), 2u);
  EXPECT_EQ(a.histogram().chains.at(0), 1u);
  // [2 8 8] has length 2: no chain.
  RunScanner b(100, RunConvention::reuse_closing, true, pat);
  feed_all(b, {1, 2, 3, 2, 8, 8});
  EXPECT_EQ(b.histogram().chains.count(0), 0u);
  // Level 1: lag 4, then a run of length 6.
  RunScanner c(100, RunConvention::reuse_closing, true, pat);
  feed_all(c, {1, 2, 3, 4, 5, 2, 11, 12, 13, 14, 11});
  EXPECT_EQ(c.histogram().doubling_lags.at(1), 2u);
  EXPECT_EQ(c.histogram().count(5), 2u);
  EXPECT_EQ(c.histogram().chains.count(1), 0u);  // second run has length 5
  RunScanner d(100, RunConvention::reuse_closing, true, pat);
  feed_all(d, {1, 2, 3, 4, 5, 2, 11, 12, 13, 14, 15, 11});
  EXPECT_EQ(d.histogram().chains.at(1), 1u);
}

TEST(RunMemory, GrowsAndForgets) {
  RunMemory mem;
  const std::uint32_t n = 400000;  // past the initial 2^18 slots
  for (std::uint32_t i = 0; i < n; ++i) {
    ASSERT_FALSE(mem.find_or_insert(i * 2654435761u, i));
  }
  EXPECT_GE(mem.capacity(), 2 * n);
  for (std::uint32_t i = 0; i < n; i += 997) {
    auto hit = mem.find_or_insert(i * 2654435761u, 0);
    ASSERT_TRUE(hit);
    EXPECT_EQ(*hit, i);
  }
  mem.reset();
  EXPECT_EQ(mem.capacity(), std::size_t{1} << RunMemory::kInitialLogCapacity);
  EXPECT_FALSE(mem.find_or_insert(0, 0));
  EXPECT_FALSE(mem.find_or_insert(2654435761u, 1));
}

TEST(RunMemory, SurvivesStampWraparound) {
  RunMemory mem;
  for (int round = 0; round < 600; ++round) {
    ASSERT_FALSE(mem.find_or_insert(12345, 0)) << round;
    ASSERT_TRUE(mem.find_or_insert(12345, 1));
    mem.reset();
  }
}

TEST(Scan, HistogramIsConsistentAndDeterministic) {
  ScanConfig c;
  c.num_runs = 30;
  c.generator = GeneratorKind::mt32;
  const RunLengthHistogram a = scan(c);
  EXPECT_TRUE(a.consistent());
  EXPECT_EQ(a.total_runs, 30u);
  EXPECT_EQ(a, scan(c));
  c.seed = 1;
  EXPECT_NE(a.counts, scan(c).counts);
}

TEST(Scan, SplicingThroughACheckpoint) {
  ScanConfig c;
  c.num_runs = 40;
  c.generator = GeneratorKind::control;
  const RunLengthHistogram whole = scan(c);
  ScanSession first(c);
  first.run_until(17);
  const ScanCheckpoint cp = first.checkpoint();
  EXPECT_FALSE(cp.scanner.pending.empty());
  ScanSession second = ScanSession::resume(cp);
  second.run_until(40);
  EXPECT_EQ(second.histogram(), whole);

  c.generator = GeneratorKind::mt64;
  c.tempered = false;
  ScanSession a(c);
  a.run_until(9);
  ScanSession b = ScanSession::resume(a.checkpoint());
  a.run_until(25);
  b.run_until(25);
  EXPECT_EQ(a.histogram(), b.histogram());
}

TEST(Scan, SnapshotRestoreOfScanner) {
  std::mt19937 rng(4);
  std::vector<std::uint32_t> xs(20000);
  for (auto& x : xs) x = rng() & 0x3FF;
  RunScanner whole(1000, RunConvention::reuse_closing, true);
  feed_all(whole, xs);
  RunScanner part(1000, RunConvention::reuse_closing, true);
  feed_all(part, {xs.begin(), xs.begin() + 7777});
  RunScanner rest = RunScanner::restore(part.snapshot(), true);
  feed_all(rest, {xs.begin() + 7777, xs.end()});
  EXPECT_EQ(rest.histogram(), whole.histogram());
  EXPECT_EQ(rest.snapshot(), whole.snapshot());
}

TEST(Histogram, MergeIsAdditiveAndOrderIndependent) {
  ScanConfig c;
  c.num_runs = 15;
  c.generator = GeneratorKind::control;
  RunLengthHistogram a = scan(c);
  c.seed = 2;
  const RunLengthHistogram b = scan(c);
  c.seed = 3;
  const RunLengthHistogram d = scan(c);
  RunLengthHistogram ab = a;
  ab.merge(b);
  ab.merge(d);
  RunLengthHistogram ba = d;
  ba.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.counts, ba.counts);
  EXPECT_EQ(ab.total_runs, 45u);
  EXPECT_TRUE(ab.consistent());
  RunLengthHistogram other;
  other.r_max = 5;
  EXPECT_THROW(a.merge(other), std::invalid_argument);
}

TEST(OutputStream, Mt64UsesHighHalf) {
  OutputStream s(GeneratorKind::mt64, 5489, true);
  auto mt = MersenneTwister::seeded(GeneratorParams::mt19937_64(), 5489);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(s.next(), mt.next_tempered() >> 32);
  OutputStream u(GeneratorKind::mt32, 5489, false);
  auto raw = MersenneTwister::seeded(GeneratorParams::mt19937(), 5489);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(u.next(), raw.next_untempered());
}

TEST(ControlStream, DeterministicAndSeedSensitive) {
  ControlStream a(1), b(1), c(2);
  bool same = true;
  for (int i = 0; i < 1000000; ++i) same = same && a.next32() == b.next32();
  EXPECT_TRUE(same);
  EXPECT_NE(ControlStream(1).next32(), c.next32());
  EXPECT_NE(ControlStream::substream(1, 0).next64(), ControlStream::substream(1, 1).next64());
}

TEST(Baseline, SmallestRunLengthAndTail) {
  const Baseline b = expected_distribution(1000, 3000000, 32);
  EXPECT_DOUBLE_EQ(b.at(1), 1000 * std::ldexp(1.0, -32));
  EXPECT_EQ(b.at(0), 0.0);
  const Baseline tail = expected_distribution(1, 2100000, 32);
  EXPECT_EQ(tail.tail_zeros(), 222u);
  EXPECT_NEAR(static_cast<double>(tail.log10_tail), -222.99958, 1e-4);
}

TEST(Baseline, DeficitEqualsOverflowExpectation) {
  for (unsigned bits : {8u, 12u, 16u}) {
    const Baseline b = expected_distribution(1000, 150, bits);
    double sum = 0;
    for (double e : b.expected) sum += e;
    EXPECT_LE(sum, 1000.0 + 1e-9);
    EXPECT_NEAR(1000.0 - sum, b.overflow_expected, 1e-9) << bits;
  }
}

TEST(Baseline, ExactSmallCase) {
  // b = 2: P(R=1)=1/4, P(R=2)=2/4*3/4, P(R=3)=3/4*3/4*2/4, P(R=4)=4/4*(3*2*1)/64.
  const Baseline b = expected_distribution(64, 10, 2);
  EXPECT_NEAR(b.at(1), 16, 1e-12);
  EXPECT_NEAR(b.at(2), 24, 1e-12);
  EXPECT_NEAR(b.at(3), 18, 1e-12);
  EXPECT_NEAR(b.at(4), 6, 1e-12);
  EXPECT_NEAR(b.at(5), 0, 1e-12);
}

TEST(Baseline, WordSpaceExhausted) {
  // Four 2-bit values: a run cannot outlive index 4.
  const Baseline b = expected_distribution(64, 10, 2);
  EXPECT_EQ(b.overflow_expected, 0.0);
  EXPECT_EQ(b.tail_zeros(), std::numeric_limits<unsigned>::max());
}

TEST(Baseline, FreshConventionShiftsByOne) {
  const Baseline r = expected_distribution(64, 10, 2, RunConvention::reuse_closing);
  const Baseline f = expected_distribution(64, 10, 2, RunConvention::fresh_start);
  for (std::uint64_t k = 1; k < 10; ++k) EXPECT_DOUBLE_EQ(f.at(k + 1), r.at(k));
}

TEST(Baseline, MeanRunLength) {
  const double mean = baseline_mean(32);
  EXPECT_NEAR(mean, std::sqrt(std::numbers::pi / 2 * 4294967296.0), 1.0);
  EXPECT_NEAR(mean, 82136.86, 0.05);
  EXPECT_NEAR(baseline_mean(2), 1 * 1.0 + 0.75 + 0.75 * 0.5 + 0.75 * 0.5 * 0.25, 1e-12);
}

TEST(Baseline, EmpiricalScanOfShortWordsMatchesTheLaw) {
  // Scanner + law end to end: 12-bit words from the control stream.
  RunScanner sc(5000, RunConvention::reuse_closing, false);
  ControlStream s(21);
  while (sc.histogram().total_runs < 20000) sc.feed(s.next32() >> 20);
  const RunLengthHistogram& h = sc.histogram();
  double sum = 0;
  for (const auto& [r, n] : h.counts) sum += static_cast<double>(r * n);
  const double mean = sum / h.total_runs;
  // Var(R) ~ (2 - pi/2) N for N = 4096.
  const double sd = std::sqrt((2 - std::numbers::pi / 2) * 4096.0 / h.total_runs);
  EXPECT_LT(std::fabs(mean - baseline_mean(12)), 4 * sd) << mean;
}

TEST(Spike, UniformInputGivesUnitRatios) {
  RunLengthHistogram h;
  std::map<std::uint64_t, double> expected;
  for (std::uint64_t r = 600; r <= 2500; ++r) {
    h.counts[r] = 1000 + r;
    expected[r] = static_cast<double>(1000 + r);
  }
  const SpikeReport rep = spike_report(h, expected);
  ASSERT_EQ(rep.rows.size(), 9u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.ratio, 1.0);
    EXPECT_EQ(row.z, 0.0);
    EXPECT_FALSE(row.exceeds_bound());
  }
  EXPECT_EQ(rep.max_ratio.ratio, 1.0);
}

TEST(Spike, PoissonBounds) {
  EXPECT_EQ(poisson_upper_bound(0.0), 0u);
  EXPECT_EQ(poisson_upper_bound(0.00145), 2u);
  EXPECT_NEAR(poisson_sf(1, 0.01), 1 - std::exp(-0.01), 1e-15);
  EXPECT_DOUBLE_EQ(poisson_sf(0, 3.0), 1.0);
  for (double mean : {1.0, 10.0, 1000.0}) {
    const std::uint64_t c = poisson_upper_bound(mean);
    EXPECT_LE(poisson_sf(c + 1, mean), kFiveSigmaTail);
    EXPECT_GT(poisson_sf(c, mean), kFiveSigmaTail);
  }
  // Large means approach the Gaussian 5-sigma line.
  const double big = 1e5;
  EXPECT_NEAR(static_cast<double>(poisson_upper_bound(big)), big + 5 * std::sqrt(big), 20);
}

TEST(Planted, ZeroTrialsIsSafe) {
  const PlantedSpikeReport rep = planted_spike_trial(0, 1);
  EXPECT_EQ(rep.trials, 0u);
  EXPECT_EQ(rep.frequency_of_623, 0.0);
  EXPECT_NEAR(rep.no_early_duplicate, 1 - 4.5e-5, 1e-6);
  EXPECT_NEAR(rep.expected_623, 0.5 * rep.no_early_duplicate, 1e-15);
}

TEST(Planted, ChainLandsOnSixTwentyThree) {
  const PlantedSpikeReport rep = planted_spike_trial(4000, 12);
  EXPECT_LT(std::fabs(rep.z_score), 4.0) << rep.frequency_of_623;
  EXPECT_EQ(rep.len_622, 0u);
  EXPECT_EQ(rep.len_624, 0u);
}
