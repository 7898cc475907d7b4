#include "mtdup/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mtdup/conditional_sampler.hpp"
#include "mtdup/gf2.hpp"
#include "mtdup/mt_engine.hpp"
#include "mtdup/report.hpp"
#include "mtdup/repetition_scan.hpp"
#include "mtdup/twist_algebra.hpp"

namespace mtdup::cli {

namespace {

using report::Envelope;
using report::Json;

/// Bad input detected after parsing (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string printf_string(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::string g6(double x) { return printf_string("%.6g", x); }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

GeneratorParams algebra_params(const std::string& gen) {
  if (gen == "mt32" || gen == "mt19937") return GeneratorParams::mt19937();
  if (gen == "mt64" || gen == "mt19937_64") return GeneratorParams::mt19937_64();
  throw UsageError("--gen must be mt32 or mt64");
}

EventSet events_arg(const std::string& s, const char* flag) {
  try {
    return report::parse_event_list(s);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + ": expected a comma-separated list of event indices");
  }
}

void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path p = resolve_output(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write " + p.string());
  f << bytes;
  if (!f) throw UsageError("cannot write " + p.string());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Flags shared by every subcommand.
struct Common {
  bool json = false;
  std::string report_path;
  bool timestamps = false;
  std::string started;

  void add_to(CLI::App* sub) {
    sub->add_flag("--json", json, "print the JSON report instead of text");
    sub->add_option("--report", report_path, "also write the JSON report to this file");
    sub->add_flag("--timestamps", timestamps,
                  "record wall-clock start/finish times (output is then not byte-stable)");
  }

  /// Emits the envelope; the text summary goes to `out` unless --json.
  void finish(Envelope env, const std::string& text, std::ostream& out) const {
    if (timestamps) {
      env.timestamps["started"] = started;
      env.timestamps["finished"] = utc_now();
    }
    const std::string bytes = report::serialize(env);
    if (!report_path.empty()) write_file(report_path, bytes);
    out << (json ? bytes : text);
  }
};

std::string status(bool ok) { return ok ? "PASS" : "FAIL"; }

// ------------------------------------------------------------- commands

int cmd_lemmas(const std::string& gen, const Common& common, std::ostream& out) {
  const TwistAlgebra algebra(algebra_params(gen));
  const LemmaReport rep = algebra.verify_lemmas();
  std::ostringstream text;
  for (const auto& c : rep.checks) {
    const std::string tag = !c.applicable ? (c.passed ? "PASS (n/a)" : "FAIL (n/a: C not single-entry)")
                                          : status(c.passed);
    text << c.name << ": " << tag;
    if (!c.detail.empty()) text << "  " << c.detail;
    text << '\n';
  }
  text << "lemmas " << rep.generator << ": " << status(rep.passed()) << '\n';
  Envelope env{.command = "lemmas"};
  env.params["gen"] = algebra.params().name;
  env.results = report::to_json(rep);
  common.finish(std::move(env), text.str(), out);
  return rep.passed() ? kExitOk : kExitDiscrepancy;
}

int cmd_theorem(unsigned s, unsigned t, const std::string& gen, const Common& common,
                std::ostream& out) {
  if (s > t) throw UsageError("need s <= t");
  const TwistAlgebra algebra(algebra_params(gen));
  TheoremReport rep;
  try {
    rep = algebra.verify_theorem(s, t);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  std::ostringstream text;
  text << "rank=" << rep.rank << " expected=" << rep.formula_rank << ' ';
  if (rep.within_hypothesis) {
    text << status(rep.matches_formula) << '\n';
  } else {
    text << (rep.matches_formula ? "MATCH" : "MISMATCH")
         << " (outside the theorem's hypothesis; generic rank reported, flagged not failed)\n";
  }
  EventSet range;
  for (unsigned k = s; k <= t; ++k) range.insert(k);
  const DyadicProb p{static_cast<unsigned>(rep.rank)};
  text << "P(E_" << s << " .. E_" << t << ") = " << p.power_string() << " ("
       << p.decimal_string() << "), window " << rep.window << " words\n";

  Envelope env{.command = "theorem"};
  env.params["s"] = s;
  env.params["t"] = t;
  env.params["gen"] = algebra.params().name;
  env.results = report::to_json(rep);
  env.results["probability"] = report::to_json(p);
  env.exact_probabilities["joint"] = p.power_string();
  env.exact_probabilities["formula"] = DyadicProb{static_cast<unsigned>(rep.formula_rank)}.power_string();
  common.finish(std::move(env), text.str(), out);
  return rep.passed() ? kExitOk : kExitDiscrepancy;
}

int cmd_prob(const EventSet& events, const EventSet& given, const std::string& gen,
             const Common& common, std::ostream& out) {
  if (events.empty()) throw UsageError("--events must name at least one event");
  const TwistAlgebra algebra(algebra_params(gen));
  std::ostringstream text;
  Envelope env{.command = "prob"};
  env.params["events"] = report::to_json(events);
  env.params["given"] = report::to_json(given);
  env.params["gen"] = algebra.params().name;
  try {
    if (given.empty()) {
      const ConstraintSystem sys = algebra.joint_constraint(events);
      const DyadicProb p{static_cast<unsigned>(sys.rank())};
      text << "P(" << report::format_event_list(events) << ") = " << p.power_string()
           << " (" << p.decimal_string() << ")\n";
      text << "rank=" << sys.rank() << " window=" << sys.window << '\n';
      env.results["probability"] = report::to_json(p);
      env.results["rank"] = sys.rank();
      env.results["window"] = sys.window;
      env.exact_probabilities["joint"] = p.power_string();
      if (events.size() > 1) {
        const IndependenceContrast c = algebra.contrast(events);
        const DyadicProb product{static_cast<unsigned>(c.singles_rank_sum)};
        text << "product of singles = " << product.power_string()
             << ", independent: " << (c.independent() ? "yes" : "no") << '\n';
        env.results["contrast"] = report::to_json(c);
        env.exact_probabilities["product_of_singles"] = product.power_string();
      }
    } else {
      const DyadicProb p = algebra.conditional_probability(given, events);
      text << "P(" << report::format_event_list(events) << " | "
           << report::format_event_list(given) << ") = " << p.power_string() << " ("
           << p.decimal_string() << ")\n";
      env.results["conditional_probability"] = report::to_json(p);
      env.exact_probabilities["conditional"] = p.power_string();
    }
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  common.finish(std::move(env), text.str(), out);
  return kExitOk;
}

int cmd_conditional(const EventSet& given, unsigned check, std::uint64_t trials,
                    std::uint64_t seed, const std::string& gen, std::size_t position,
                    unsigned workers, bool long_run, const Common& common,
                    std::ostream& out) {
  if (trials > kLongTrials && !long_run) {
    throw UsageError("more than 10^7 trials requires --long");
  }
  const TwistAlgebra algebra(algebra_params(gen));
  ConditionalOptions opts;
  opts.position = position;
  opts.workers = workers;
  opts.long_run = long_run;
  ConditionalReport rep;
  try {
    rep = conditional_frequency(algebra, given, check, trials, seed, opts);
  } catch (const std::logic_error& e) {  // invalid_argument, out_of_range
    throw UsageError(e.what());
  }
  const bool ok = std::fabs(rep.z_score) <= 4.0;
  std::ostringstream text;
  text << "given {" << report::format_event_list(given) << "} check " << check << ": "
       << rep.hits << '/' << rep.trials << " = " << g6(rep.frequency) << ", expected "
       << rep.exact_expectation.power_string() << " (" << g6(rep.exact_expectation.value())
       << "), z=" << printf_string("%.3f", rep.z_score) << ' ' << status(ok) << '\n';
  Envelope env{.command = "conditional"};
  env.params["given"] = report::to_json(given);
  env.params["check"] = check;
  env.params["trials"] = trials;
  env.params["gen"] = algebra.params().name;
  env.params["position"] = position;
  env.results = report::to_json(rep);
  env.results["within_4_sigma"] = ok;
  env.exact_probabilities["expectation"] = rep.exact_expectation.power_string();
  env.seeds["entropy_seed"] = seed;
  common.finish(std::move(env), text.str(), out);
  return ok ? kExitOk : kExitDiscrepancy;
}

std::string spike_text(const SpikeReport& rep) {
  std::ostringstream text;
  text << "run_length observed expected ratio z bound5\n";
  for (const auto& row : rep.rows) {
    text << row.run_length << ' ' << row.observed << ' ' << g6(row.expected) << ' '
         << g6(row.ratio) << ' ' << g6(row.z) << ' ' << row.bound
         << (row.exceeds_bound() ? " EXCEEDS" : "") << '\n';
  }
  text << "max ratio (expected >= 1): r=" << rep.max_ratio.run_length << " ratio="
       << g6(rep.max_ratio.ratio) << '\n';
  return text.str();
}

struct RepscanArgs {
  std::uint64_t runs = 0;
  std::string gen = "mt32";
  std::uint64_t seed = 5489;
  bool untempered = false;
  std::uint64_t rmax = 2'100'000;
  std::string out_path;
  std::string format = "csv";
  std::string convention = "reuse_closing";
  std::string checkpoint_path;
  std::uint64_t checkpoint_every = 0;
  std::string resume_path;
  bool long_run = false;
};

int cmd_repscan(const RepscanArgs& a, const Common& common, std::ostream& out,
                std::ostream& err) {
  if (a.runs > kLongRuns && !a.long_run) throw UsageError("more than 10^6 runs requires --long");
  if (a.format != "csv" && a.format != "json") throw UsageError("--format must be csv or json");
  if (a.rmax == 0 || a.rmax >= RunMemory::kMaxIndex) {
    throw UsageError("--rmax must be in 1 .. 2^24 - 2");
  }
  std::optional<ScanSession> session;
  if (!a.resume_path.empty()) {
    ScanCheckpoint cp;
    try {
      cp = report::checkpoint_from_json(Json::parse(read_file(a.resume_path)));
    } catch (const std::exception& e) {
      throw UsageError("bad checkpoint " + a.resume_path + ": " + e.what());
    }
    cp.config.num_runs = a.runs;
    session.emplace(ScanSession::resume(cp));
  } else {
    ScanConfig config;
    config.num_runs = a.runs;
    config.r_max = a.rmax;
    try {
      config.generator = parse_generator_kind(a.gen);
      config.convention = parse_convention(a.convention);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    config.seed = a.seed;
    config.tempered = !a.untempered;
    session.emplace(config);
  }
  const ScanConfig& config = session->config();

  const std::uint64_t step = a.checkpoint_every > 0 ? a.checkpoint_every : a.runs;
  while (session->histogram().total_runs < a.runs) {
    const std::uint64_t target = std::min(a.runs, session->histogram().total_runs + step);
    session->run_until(target);
    if (!a.checkpoint_path.empty()) {
      write_file(a.checkpoint_path, report::to_json(session->checkpoint()).dump() + "\n");
    }
    if (a.long_run) err << "repscan: " << target << '/' << a.runs << " runs\n";
  }
  if (!a.checkpoint_path.empty() && a.checkpoint_every == 0) {
    write_file(a.checkpoint_path, report::to_json(session->checkpoint()).dump() + "\n");
  }

  const RunLengthHistogram& hist = session->histogram();
  const Baseline baseline =
      expected_distribution(hist.total_runs, config.r_max, 32, config.convention);
  const SpikeReport spikes = spike_report(hist, baseline);

  Envelope env{.command = "repscan"};
  env.params["runs"] = a.runs;
  env.params["gen"] = to_string(config.generator);
  env.params["tempered"] = config.tempered;
  env.params["rmax"] = config.r_max;
  env.params["convention"] = to_string(config.convention);
  env.params["format"] = a.format;
  env.params["resumed"] = !a.resume_path.empty();
  env.results["histogram"] = report::to_json(hist);
  env.results["spike"] = report::to_json(spikes);
  env.results["overflow_expected"] = baseline.overflow_expected;
  env.seeds["generator_seed"] = config.seed;

  if (a.format == "csv") {
    std::ostringstream csv;
    report::write_histogram_csv(csv, hist, baseline);
    write_file(a.out_path, csv.str());
  } else {
    write_file(a.out_path, report::serialize(env));
  }

  std::ostringstream text;
  text << "repscan " << to_string(config.generator) << " seed " << config.seed << ": "
       << hist.total_runs << " runs, overflow " << hist.overflow << '\n';
  text << spike_text(spikes);
  for (unsigned k = 0; k < LagPattern{}.levels; ++k) {
    const auto lag = hist.doubling_lags.find(k);
    const auto chain = hist.chains.find(k);
    text << "lag " << (227u << k) << " terminations: "
         << (lag == hist.doubling_lags.end() ? 0 : lag->second) << ", followed by length "
         << (623u << k) << ": " << (chain == hist.chains.end() ? 0 : chain->second) << '\n';
  }
  common.finish(std::move(env), text.str(), out);
  return kExitOk;
}

int cmd_expected(std::uint64_t runs, std::uint64_t rmax, unsigned bits, const Common& common,
                 std::ostream& out) {
  if (bits == 0 || bits > 64) throw UsageError("--bits must be in 1..64");
  if (rmax == 0 || rmax > 100'000'000) throw UsageError("--rmax must be in 1..10^8");
  const Baseline b = expected_distribution(runs, rmax, bits);
  const long double lg = b.log10_tail;
  const long double e10 = std::floor(lg);
  const double mantissa = static_cast<double>(std::pow(10.0L, lg - e10));
  std::ostringstream tail;
  tail << printf_string("%.6f", mantissa) << "e" << static_cast<long long>(e10);
  const double mean = baseline_mean(bits);

  std::ostringstream text;
  text << "P(R = 1) = 2^-" << bits << '\n';
  text << "P(R > " << rmax << ") = " << tail.str() << " (log10 "
       << printf_string("%.8f", static_cast<double>(lg)) << "), " << b.tail_zeros()
       << " zeros after the decimal point\n";
  text << "E[R] = " << printf_string("%.4f", mean) << '\n';
  text << "expected runs of length 623 out of " << runs << ": " << g6(b.at(623)) << '\n';

  Envelope env{.command = "expected"};
  env.params["runs"] = runs;
  env.params["rmax"] = rmax;
  env.params["bits"] = bits;
  env.results["tail_probability"] = tail.str();
  env.results["log10_tail"] = static_cast<double>(lg);
  env.results["tail_zeros"] = b.tail_zeros();
  env.results["overflow_expected"] = b.overflow_expected;
  env.results["mean_run_length"] = mean;
  Json at = Json::object();
  for (std::uint64_t r : {1u, 622u, 623u, 624u, 1246u, 2492u}) {
    if (r <= rmax) at[std::to_string(r)] = b.at(r);
  }
  env.results["expected_counts"] = std::move(at);
  env.exact_probabilities["run_length_1"] = DyadicProb{bits}.power_string();
  common.finish(std::move(env), text.str(), out);
  return kExitOk;
}

int cmd_spike(const std::string& in_path, unsigned bits, const Common& common,
              std::ostream& out) {
  std::ifstream f(in_path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + in_path);
  report::HistogramTable table;
  try {
    table = report::read_histogram_csv(f);
  } catch (const report::FormatError& e) {
    throw UsageError(in_path + ": " + e.what());
  }
  // Buckets absent from the file (zero counts) take the exact law.
  const Baseline fallback = expected_distribution(table.histogram.total_runs, 2494, bits);
  const SpikeReport rep = spike_report(table.histogram, table.expected, &fallback);
  Envelope env{.command = "spike"};
  env.params["in"] = in_path;
  env.params["bits"] = bits;
  env.results["total_runs"] = table.histogram.total_runs;
  env.results["spike"] = report::to_json(rep);
  common.finish(std::move(env), spike_text(rep), out);
  return kExitOk;
}

int cmd_planted(std::uint64_t trials, std::uint64_t seed, bool long_run, const Common& common,
                std::ostream& out) {
  if (trials > kLongTrials && !long_run) throw UsageError("more than 10^7 trials requires --long");
  const PlantedSpikeReport rep = planted_spike_trial(trials, seed);
  const bool ok = trials == 0 || std::fabs(rep.z_score) <= 4.0;
  std::ostringstream text;
  text << "planted E_0 boundaries: " << trials << " trials\n";
  text << "length 623: " << rep.len_623 << " (" << g6(rep.frequency_of_623) << "), expected "
       << printf_string("%.6f", rep.expected_623) << ", z="
       << printf_string("%.3f", rep.z_score) << ' ' << status(ok) << '\n';
  text << "length 622: " << rep.len_622 << ", length 624: " << rep.len_624 << '\n';
  Envelope env{.command = "planted"};
  env.params["trials"] = trials;
  env.results = report::to_json(rep);
  env.results["within_4_sigma"] = ok;
  env.seeds["entropy_seed"] = seed;
  common.finish(std::move(env), text.str(), out);
  return ok ? kExitOk : kExitDiscrepancy;
}

int cmd_selftest(const Common& common, std::ostream& out) {
  const std::vector<SelfTestCheck> checks = selftest_checks();
  bool all = true;
  std::ostringstream text;
  Json list = Json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    text << status(c.passed) << ' ' << c.name;
    if (!c.detail.empty()) text << "  " << c.detail;
    text << '\n';
    Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["detail"] = c.detail;
    list.push_back(std::move(j));
  }
  text << "selftest: " << status(all) << '\n';
  Envelope env{.command = "selftest"};
  env.results["checks"] = std::move(list);
  env.results["passed"] = all;
  common.finish(std::move(env), text.str(), out);
  return all ? kExitOk : kExitDiscrepancy;
}

}  // namespace

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') {
      return std::filesystem::path(dir) / p;
    }
  }
  return p;
}

std::vector<SelfTestCheck> selftest_checks() {
  std::vector<SelfTestCheck> out;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  // Published reference outputs for the default seed.
  struct Vector {
    GeneratorParams params;
    std::uint64_t first;
    std::uint64_t ten_thousandth;
  };
  for (const Vector& v : {Vector{GeneratorParams::mt19937(), 3499211612u, 4123659995u},
                          Vector{GeneratorParams::mt19937_64(), 14514284786278117030ull,
                                 9981545732273789042ull}}) {
    auto mt = MersenneTwister::seeded(v.params, 5489);
    const std::uint64_t first = mt.next_tempered();
    mt.discard(9998);
    const std::uint64_t last = mt.next_tempered();
    add("reference vector " + v.params.name, first == v.first && last == v.ten_thousandth,
        "first=" + std::to_string(first) + " 10000th=" + std::to_string(last));

    std::mt19937_64 pick(7);
    bool round_trip = true;
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t x = pick() & v.params.word_mask();
      round_trip = round_trip && untemper(v.params, temper(v.params, x)) == x;
    }
    add("untemper inverts temper " + v.params.name, round_trip);

    // Bit convention: component 1 is the most significant bit, and the
    // integer twist equals x_{k+1} B + x_k C as row vectors.
    const TwistAlgebra algebra(v.params);
    const unsigned w = v.params.w;
    bool arbiter = gf2::BitVector::from_word(std::uint64_t{1} << (w - 1), w).get(0) &&
                   gf2::BitVector::from_word(1, w).get(w - 1);
    for (int i = 0; i < 1000 && arbiter; ++i) {
      const std::uint64_t xk = pick() & v.params.word_mask();
      const std::uint64_t xk1 = pick() & v.params.word_mask();
      gf2::BitVector lhs = gf2::BitVector::from_word(xk1, w) * algebra.B();
      lhs ^= gf2::BitVector::from_word(xk, w) * algebra.C();
      arbiter = lhs.to_word() == twist(v.params, xk, xk1);
    }
    add("bit-convention arbiter " + v.params.name, arbiter);

    const LemmaReport lemmas = algebra.verify_lemmas();
    for (const auto& c : lemmas.checks) {
      if (!c.applicable) continue;
      add("lemma " + v.params.name + ": " + c.name, c.passed, c.detail);
    }
  }

  const TwistAlgebra mt32(GeneratorParams::mt19937());
  for (unsigned t = 0; t <= 4; ++t) {
    for (unsigned s = 0; s <= t; ++s) {
      const TheoremReport r = mt32.verify_theorem(s, t);
      add("theorem rank s=" + std::to_string(s) + " t=" + std::to_string(t),
          r.within_hypothesis && r.matches_formula,
          "rank=" + std::to_string(r.rank) + " expected=" + std::to_string(r.formula_rank));
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagged-duplicate analysis of Mersenne Twister generators", "mtdup"};
  app.require_subcommand(1);
  Common common;
  common.started = utc_now();

  std::string gen = "mt32";
  auto* lemmas = app.add_subcommand("lemmas", "verify the matrix identities behind the rank theorem");
  lemmas->add_option("--gen", gen, "mt32 or mt64");
  common.add_to(lemmas);

  unsigned s = 0, t = 0;
  auto* theorem = app.add_subcommand("theorem", "rank of the joint event E_s..E_t");
  theorem->add_option("--s", s)->required();
  theorem->add_option("--t", t)->required();
  theorem->add_option("--gen", gen, "mt32 or mt64");
  common.add_to(theorem);

  std::string events_str, given_str;
  auto* prob = app.add_subcommand("prob", "exact probability of an event set");
  prob->add_option("--events", events_str, "comma-separated event indices")->required();
  prob->add_option("--given", given_str, "condition on these events");
  prob->add_option("--gen", gen, "mt32 or mt64");
  common.add_to(prob);

  unsigned check = 0;
  std::uint64_t trials = 0, seed = 0;
  std::size_t position = ConditionalSampler::kDefaultPlantPosition;
  unsigned workers = 1;
  bool long_run = false;
  auto* conditional = app.add_subcommand("conditional", "planted-state conditional frequency");
  conditional->add_option("--given", given_str, "events planted in every state")->required();
  conditional->add_option("--check", check, "event whose frequency is measured")->required();
  conditional->add_option("--trials", trials)->required();
  conditional->add_option("--seed", seed, "entropy seed")->required();
  conditional->add_option("--gen", gen, "mt32 or mt64");
  conditional->add_option("--position", position, "first state word of the planted window");
  conditional->add_option("--workers", workers, "worker threads");
  conditional->add_flag("--long", long_run, "allow long runs");
  common.add_to(conditional);

  RepscanArgs rs;
  auto* repscan = app.add_subcommand("repscan", "run-length histogram of the repetition test");
  repscan->add_option("--runs", rs.runs)->required();
  repscan->add_option("--gen", rs.gen, "mt32, mt64 or control")->required();
  repscan->add_option("--seed", rs.seed)->required();
  repscan->add_flag("--untempered", rs.untempered, "scan raw state words");
  repscan->add_option("--rmax", rs.rmax, "longest recorded run; longer runs overflow");
  repscan->add_option("--out", rs.out_path, "histogram output file")->required();
  repscan->add_option("--format", rs.format, "csv or json");
  repscan->add_option("--convention", rs.convention, "reuse_closing or fresh_start");
  repscan->add_option("--checkpoint", rs.checkpoint_path, "write a resumable checkpoint here");
  repscan->add_option("--checkpoint-every", rs.checkpoint_every, "runs between checkpoints");
  repscan->add_option("--resume", rs.resume_path, "continue from a checkpoint");
  repscan->add_flag("--long", rs.long_run, "allow long runs");
  common.add_to(repscan);

  std::uint64_t runs = 0, rmax = 0;
  unsigned bits = 32;
  auto* expected = app.add_subcommand("expected", "first-collision baseline for ideal words");
  expected->add_option("--runs", runs)->required();
  expected->add_option("--rmax", rmax)->required();
  expected->add_option("--bits", bits)->required();
  common.add_to(expected);

  std::string in_path;
  auto* spike = app.add_subcommand("spike", "spike report from a histogram CSV");
  spike->add_option("--in", in_path, "histogram CSV")->required();
  spike->add_option("--bits", bits, "word size for buckets missing from the file");
  common.add_to(spike);

  auto* planted = app.add_subcommand("planted", "run-length after planted E_0 boundaries");
  planted->add_option("--trials", trials)->required();
  planted->add_option("--seed", seed, "entropy seed")->required();
  planted->add_flag("--long", long_run, "allow long runs");
  common.add_to(planted);

  auto* selftest = app.add_subcommand("selftest", "reference vectors, conventions and lemmas");
  common.add_to(selftest);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (lemmas->parsed()) return cmd_lemmas(gen, common, out);
    if (theorem->parsed()) return cmd_theorem(s, t, gen, common, out);
    if (prob->parsed()) {
      return cmd_prob(events_arg(events_str, "--events"), events_arg(given_str, "--given"), gen,
                      common, out);
    }
    if (conditional->parsed()) {
      return cmd_conditional(events_arg(given_str, "--given"), check, trials, seed, gen,
                             position, workers, long_run, common, out);
    }
    if (repscan->parsed()) return cmd_repscan(rs, common, out, err);
    if (expected->parsed()) return cmd_expected(runs, rmax, bits, common, out);
    if (spike->parsed()) return cmd_spike(in_path, bits, common, out);
    if (planted->parsed()) return cmd_planted(trials, seed, long_run, common, out);
    if (selftest->parsed()) return cmd_selftest(common, out);
  } catch (const UsageError& e) {
    err << "mtdup: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "mtdup: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mtdup::cli
