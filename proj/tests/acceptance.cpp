// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all
// pass.  Set MTDUP_ACCEPT_LONG=1 to also run the 10^6-run scan of 9(b), or
// point MTDUP_LONG_REPORT at the JSON report of such a scan.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mtdup/conditional_sampler.hpp"
#include "mtdup/report.hpp"
#include "mtdup/repetition_scan.hpp"
#include "mtdup/twist_algebra.hpp"

using namespace mtdup;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  ///< 0 = no limit
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Shared between 5, 6 and 9(a).
bool g_conditional_passed = false;
bool g_planted_passed = false;

Outcome lemma_suite() {
  const TwistAlgebra alg(GeneratorParams::mt19937());
  const LemmaReport rep = alg.verify_lemmas();
  Outcome o{true, ""};
  int n = 0;
  for (const auto& c : rep.checks) {
    ++n;
    if (!c.passed || !c.applicable) {
      o.passed = false;
      o.detail += " failed: " + c.name + " " + c.detail + ";";
    }
  }
  // The explicit ranges of the criterion, directly.
  const gf2::BitMatrix& B = alg.B();
  const gf2::BitMatrix& C = alg.C();
  bool direct = (C * C).is_zero() && gf2::mat_rank(B + C) == 32;
  gf2::BitMatrix bs = gf2::BitMatrix::identity(32);
  for (unsigned s = 0; s <= 30; ++s, bs = bs * B) direct = direct && (C * bs * C).is_zero();
  for (unsigned s = 1; s <= 64; ++s) {
    direct = direct && gf2::mat_rank(gf2::mat_pow(B, s).vstack(alg.q_matrix(s))) == 32;
  }
  o.passed = o.passed && direct;
  o.detail = std::to_string(n) + " identities" + (direct ? "" : "; direct recheck failed") + o.detail;
  return o;
}

Outcome recursion_equivalence() {
  Outcome o{true, ""};
  for (const auto& p : {GeneratorParams::mt19937(), GeneratorParams::mt19937_64()}) {
    const TwistAlgebra alg(p);
    auto mt = MersenneTwister::seeded(p, 5489);
    std::vector<std::uint64_t> x = seed_init(p, 5489).words;
    while (x.size() < 10000 + p.n) x.push_back(mt.next_untempered());
    std::size_t bad = 0;
    for (std::size_t k = 0; k < 10000; ++k) {
      gf2::BitVector v = gf2::BitVector::from_word(x[k + p.m], p.w);
      v ^= gf2::BitVector::from_word(x[k + 1], p.w) * alg.B();
      v ^= gf2::BitVector::from_word(x[k], p.w) * alg.C();
      const std::uint64_t integer = x[k + p.m] ^ twist(p, x[k], x[k + 1]);
      if (v.to_word() != x[k + p.n] || integer != x[k + p.n]) ++bad;
    }
    o.passed = o.passed && bad == 0;
    o.detail += p.name + ": " + std::to_string(10000 - bad) + "/10000 agree; ";
  }
  return o;
}

Outcome theorem_ranks() {
  const TwistAlgebra alg(GeneratorParams::mt19937());
  Outcome o{true, ""};
  for (unsigned t = 0; t <= 4; ++t) {
    for (unsigned s = 0; s <= t; ++s) {
      const TheoremReport r = alg.verify_theorem(s, t);
      if (r.rank != 32u + (1u << t) - (1u << s)) {
        o.passed = false;
        o.detail += "rank(" + std::to_string(s) + ".." + std::to_string(t) + ")=" +
                    std::to_string(r.rank) + "; ";
      }
    }
  }
  const std::string p01 = alg.event_probability({0, 1}).power_string();
  const std::string p123 = alg.event_probability({1, 2, 3}).power_string();
  const std::string p34 = alg.event_probability({3, 4}).power_string();
  o.passed = o.passed && p01 == "2^-33" && p123 == "2^-38" && p34 == "2^-40";
  std::string incs;
  const unsigned want[] = {1, 2, 4, 8};
  for (unsigned k = 0; k < 4; ++k) {
    const DyadicProb c = alg.conditional_probability({k}, {k + 1});
    o.passed = o.passed && c.exponent == want[k];
    incs += (k ? "," : "") + c.power_string();
  }
  o.detail += "15 ranks; P{0,1}=" + p01 + " P{1,2,3}=" + p123 + " P{3,4}=" + p34 +
              "; conditionals " + incs;
  return o;
}

Outcome t_five() {
  const TwistAlgebra alg(GeneratorParams::mt19937());
  const TheoremReport r = alg.verify_theorem(4, 5);
  const bool matches = r.rank == 48;
  // Cross-check the generic operator power against an independent route:
  // E_4 alone must have rank 32 and the planted windows must satisfy both.
  const ConditionalSampler sampler(alg, {4, 5});
  bool planted = true;
  for (std::uint64_t t = 0; t < 50 && planted; ++t) {
    const PlantedState ps = sampler.sample(5, t);
    planted = event_holds(alg.params(), ps.state, ps.anchor, 4) &&
              event_holds(alg.params(), ps.state, ps.anchor, 5);
  }
  Outcome o;
  o.passed = planted && sampler.constraint().rank() == r.rank;
  o.detail = "generic rank(joint{4,5}) = " + std::to_string(r.rank) + ", window " +
             std::to_string(r.window) + "; predicted 2^-16 * 2^-32 (rank 48): " +
             (matches ? "MATCHES" : "DISCREPANCY FLAGGED") +
             "; outside 2^t <= w-2, reported not asserted";
  return o;
}

Outcome conditional_mc() {
  const TwistAlgebra alg(GeneratorParams::mt19937());
  Outcome o{true, ""};
  for (unsigned k = 0; k < 4; ++k) {
    const ConditionalReport r = conditional_frequency(alg, {k}, k + 1, 1'000'000, 20240 + k);
    const bool ok = std::fabs(r.z_score) < 4.0;
    o.passed = o.passed && ok;
    o.detail += "{" + std::to_string(k) + "}->" + std::to_string(k + 1) + ": " +
                std::to_string(r.hits) + " hits, freq " + fmt("%.6f", r.frequency) + " vs " +
                r.exact_expectation.power_string() + ", z=" + fmt("%.2f", r.z_score) + "; ";
  }
  g_conditional_passed = o.passed;
  return o;
}

Outcome planted_spike() {
  const PlantedSpikeReport r = planted_spike_trial(100'000, 623);
  Outcome o;
  o.passed = std::fabs(r.z_score) < 4.0 && r.frequency_of_622 < 1e-3 && r.frequency_of_624 < 1e-3;
  o.detail = "623: " + std::to_string(r.len_623) + " (freq " + fmt("%.5f", r.frequency_of_623) +
             ", expected " + fmt("%.6f", r.expected_623) + ", z=" + fmt("%.2f", r.z_score) +
             "); 622: " + std::to_string(r.len_622) + ", 624: " + std::to_string(r.len_624);
  g_planted_passed = o.passed;
  return o;
}

Outcome baseline_tail() {
  const Baseline b = expected_distribution(1, 2'100'000, 32);
  const long double lg = b.log10_tail;
  const long double e = std::floor(lg);
  Outcome o;
  o.passed = b.tail_zeros() == 222;
  o.detail = "P(R > 2100000) = " + fmt("%.5f", static_cast<double>(std::pow(10.0L, lg - e))) +
             "e" + std::to_string(static_cast<long long>(e)) + ", " +
             std::to_string(b.tail_zeros()) + " zeros";
  return o;
}

Outcome control_contrast() {
  ScanConfig c;
  c.num_runs = 10'000;
  c.generator = GeneratorKind::control;
  c.seed = 1;
  const RunLengthHistogram h = scan(c);
  const Baseline b = expected_distribution(h.total_runs, c.r_max, 32);
  Outcome o{h.consistent(), ""};
  for (std::uint64_t r : {622u, 623u, 624u, 1246u, 2492u}) {
    const std::uint64_t obs = h.count(r);
    const std::uint64_t bound = poisson_upper_bound(b.at(r));
    o.passed = o.passed && obs <= bound;
    o.detail += std::to_string(r) + ": " + std::to_string(obs) + " <= " + std::to_string(bound) +
                " (exp " + fmt("%.2g", b.at(r)) + "); ";
  }
  return o;
}

Outcome long_run() {
  Outcome o;
  const bool a = g_conditional_passed && g_planted_passed;
  o.detail = std::string("(a) criteria 5-6 ") + (a ? "pass" : "FAIL") + "; ";
  std::uint64_t runs = 0, chains = 0, terminations = 0;
  bool have_b = false;
  const char* run_env = std::getenv("MTDUP_ACCEPT_LONG");
  const char* report_env = std::getenv("MTDUP_LONG_REPORT");
  if (run_env != nullptr && std::string(run_env) == "1") {
    ScanConfig c;
    c.num_runs = 1'000'000;
    c.generator = GeneratorKind::mt32;
    const RunLengthHistogram h = scan(c);
    runs = h.total_runs;
    chains = h.chains.count(0) ? h.chains.at(0) : 0;
    terminations = h.doubling_lags.count(0) ? h.doubling_lags.at(0) : 0;
    have_b = true;
  } else if (report_env != nullptr) {
    std::ifstream f(report_env);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto env = report::envelope_from_json(report::Json::parse(ss.str()));
    const RunLengthHistogram h = report::histogram_from_json(env.results.at("histogram"));
    runs = h.total_runs;
    chains = h.chains.count(0) ? h.chains.at(0) : 0;
    terminations = h.doubling_lags.count(0) ? h.doubling_lags.at(0) : 0;
    have_b = h.generator_id == "mt32" && h.tempered;
    o.detail += std::string("(b) from ") + report_env + ": ";
  }
  if (have_b) {
    const bool b = runs >= 1'000'000 && chains >= 5;
    o.passed = a && b;
    o.detail += "(b) " + std::to_string(runs) + " runs, " + std::to_string(terminations) +
                " lag-227 terminations, " + std::to_string(chains) +
                " followed by length 623 (need >= 5)";
  } else {
    o.passed = a;
    o.detail += "(b) long mode not run here (set MTDUP_ACCEPT_LONG=1 or MTDUP_LONG_REPORT); "
                "ratio > 40 needs >= 10^8 runs";
  }
  return o;
}

Outcome mt64_contrast() {
  const TwistAlgebra alg(GeneratorParams::mt19937_64());
  const IndependenceContrast c = alg.contrast({0, 1});
  // Exactness: planted kernel windows satisfy both events when executed.
  const ConditionalSampler sampler(alg, {0, 1});
  int ok = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const PlantedState ps = sampler.sample(64, t);
    ok += event_holds(alg.params(), ps.state, ps.anchor, 0) &&
          event_holds(alg.params(), ps.state, ps.anchor, 1);
  }
  Outcome o;
  o.passed = ok == 100 && sampler.kernel_dimension() + c.joint_rank ==
                              sampler.constraint().matrix.rows();
  o.detail = "rank(joint{0,1}) = " + std::to_string(c.joint_rank) + " vs " +
             std::to_string(c.singles_rank_sum) + " for the product; independent: " +
             (c.independent() ? "yes" : "NO (anomaly present, flagged)") +
             "; planted windows satisfy both events " + std::to_string(ok) + "/100";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "lemma suite", 1.0, lemma_suite},
      {2, "recursion equivalence", 1.0, recursion_equivalence},
      {3, "theorem ranks", 1.0, theorem_ranks},
      {4, "t = 5 adjudication", 10.0, t_five},
      {5, "conditional Monte Carlo", 0.0, conditional_mc},
      {6, "planted spike", 60.0, planted_spike},
      {7, "baseline tail", 1.0, baseline_tail},
      {8, "control contrast", 60.0, control_contrast},
      {9, "desk-scale substitute", 0.0, long_run},
      {10, "MT19937-64 contrast", 10.0, mt64_contrast},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.passed = false;
      o.detail += " [exceeded " + fmt("%g", c.limit_seconds) + " s]";
    }
    failures += !o.passed;
    std::printf("%s %d %s (%.2fs): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
