#include "mtdup/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mtdup::report {

// -------------------------------------------------------------- envelope

Json to_json(const Envelope& env) {
  Json j;
  j["command"] = env.command;
  j["params"] = env.params;
  j["results"] = env.results;
  j["exact_probabilities"] = env.exact_probabilities;
  j["timestamps"] = env.timestamps;
  j["tool_version"] = env.tool_version;
  j["seeds"] = env.seeds;
  return j;
}

Envelope envelope_from_json(const Json& j) {
  Envelope env;
  env.command = j.at("command").get<std::string>();
  env.params = j.at("params");
  env.results = j.at("results");
  env.exact_probabilities = j.at("exact_probabilities");
  env.timestamps = j.at("timestamps");
  env.tool_version = j.at("tool_version").get<std::string>();
  env.seeds = j.at("seeds");
  return env;
}

std::string serialize(const Envelope& env) { return to_json(env).dump(2) + "\n"; }

// --------------------------------------------------------------- dyadics

Json to_json(const DyadicProb& p) {
  Json j;
  j["power"] = p.power_string();
  j["decimal"] = p.decimal_string();
  j["exponent"] = p.exponent;
  return j;
}

DyadicProb dyadic_from_json(const Json& j) {
  DyadicProb p{j.at("exponent").get<unsigned>()};
  if (p.power_string() != j.at("power").get<std::string>()) {
    throw std::invalid_argument("dyadic power string does not match exponent");
  }
  return p;
}

DyadicProb parse_dyadic(const std::string& s) {
  if (s == "1") return {0};
  if (s.rfind("2^-", 0) != 0) throw std::invalid_argument("not a dyadic: " + s);
  unsigned k = 0;
  const char* first = s.data() + 3;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, k);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("not a dyadic: " + s);
  }
  return {k};
}

// ---------------------------------------------------------------- events

Json to_json(const EventSet& events) {
  Json j = Json::array();
  for (unsigned k : events) j.push_back(k);
  return j;
}

EventSet event_set_from_json(const Json& j) {
  EventSet out;
  for (const auto& k : j) out.insert(k.get<unsigned>());
  return out;
}

EventSet parse_event_list(const std::string& s) {
  EventSet out;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    unsigned k = 0;
    const char* first = s.data() + start;
    const char* last = s.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec != std::errc() || ptr != last || first == last) {
      throw std::invalid_argument("bad event list '" + s + "'");
    }
    out.insert(k);
    start = end + 1;
    if (end + 1 == s.size()) throw std::invalid_argument("bad event list '" + s + "'");
  }
  return out;
}

std::string format_event_list(const EventSet& events) {
  std::string out;
  for (unsigned k : events) {
    if (!out.empty()) out += ',';
    out += std::to_string(k);
  }
  return out;
}

// ------------------------------------------------------- algebra reports

Json to_json(const TheoremReport& rep) {
  Json j;
  j["s"] = rep.s;
  j["t"] = rep.t;
  j["rank"] = rep.rank;
  j["formula_rank"] = rep.formula_rank;
  j["window"] = rep.window;
  j["within_hypothesis"] = rep.within_hypothesis;
  j["matches_formula"] = rep.matches_formula;
  j["passed"] = rep.passed();
  return j;
}

Json to_json(const LemmaReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["applicable"] = c.applicable;
    jc["needs_single_entry_c"] = c.needs_single_entry_c;
    jc["detail"] = c.detail;
    checks.push_back(std::move(jc));
  }
  Json j;
  j["generator"] = rep.generator;
  j["checks"] = std::move(checks);
  j["passed"] = rep.passed();
  return j;
}

Json to_json(const IndependenceContrast& c) {
  Json j;
  j["events"] = to_json(c.events);
  j["joint_rank"] = c.joint_rank;
  j["singles_rank_sum"] = c.singles_rank_sum;
  j["independent"] = c.independent();
  return j;
}

// ------------------------------------------------------------ conditional

Json to_json(const ConditionalReport& rep) {
  Json j;
  j["generator"] = rep.generator;
  j["given"] = to_json(rep.given);
  j["check"] = rep.check;
  j["trials"] = rep.trials;
  j["hits"] = rep.hits;
  j["entropy_seed"] = rep.entropy_seed;
  j["position"] = rep.position;
  j["exact_expectation"] = to_json(rep.exact_expectation);
  j["frequency"] = rep.frequency;
  j["z_score"] = rep.z_score;
  return j;
}

ConditionalReport conditional_from_json(const Json& j) {
  ConditionalReport rep;
  rep.generator = j.at("generator").get<std::string>();
  rep.given = event_set_from_json(j.at("given"));
  rep.check = j.at("check").get<unsigned>();
  rep.trials = j.at("trials").get<std::uint64_t>();
  rep.hits = j.at("hits").get<std::uint64_t>();
  rep.entropy_seed = j.at("entropy_seed").get<std::uint64_t>();
  rep.position = j.at("position").get<std::size_t>();
  rep.exact_expectation = dyadic_from_json(j.at("exact_expectation"));
  rep.frequency = j.at("frequency").get<double>();
  rep.z_score = j.at("z_score").get<double>();
  return rep;
}

// ------------------------------------------------------------ histograms

namespace {

Json pairs_to_json(const auto& map) {
  Json out = Json::array();
  for (const auto& [key, value] : map) out.push_back(Json::array({key, value}));
  return out;
}

template <class Key>
std::map<Key, std::uint64_t> pairs_from_json(const Json& j) {
  std::map<Key, std::uint64_t> out;
  for (const auto& pair : j) {
    out[pair.at(0).get<Key>()] = pair.at(1).get<std::uint64_t>();
  }
  return out;
}

}  // namespace

Json to_json(const RunLengthHistogram& hist) {
  Json j;
  j["generator_id"] = hist.generator_id;
  j["seed"] = hist.seed;
  j["convention"] = hist.convention;
  j["tempered"] = hist.tempered;
  j["word_bits"] = hist.word_bits;
  j["r_max"] = hist.r_max;
  j["total_runs"] = hist.total_runs;
  j["overflow"] = hist.overflow;
  j["counts"] = pairs_to_json(hist.counts);
  j["doubling_lags"] = pairs_to_json(hist.doubling_lags);
  j["chains"] = pairs_to_json(hist.chains);
  return j;
}

RunLengthHistogram histogram_from_json(const Json& j) {
  RunLengthHistogram hist;
  hist.generator_id = j.at("generator_id").get<std::string>();
  hist.seed = j.at("seed").get<std::uint64_t>();
  hist.convention = j.at("convention").get<std::string>();
  hist.tempered = j.at("tempered").get<bool>();
  hist.word_bits = j.at("word_bits").get<unsigned>();
  hist.r_max = j.at("r_max").get<std::uint64_t>();
  hist.total_runs = j.at("total_runs").get<std::uint64_t>();
  hist.overflow = j.at("overflow").get<std::uint64_t>();
  hist.counts = pairs_from_json<std::uint64_t>(j.at("counts"));
  hist.doubling_lags = pairs_from_json<unsigned>(j.at("doubling_lags"));
  hist.chains = pairs_from_json<unsigned>(j.at("chains"));
  return hist;
}

Json to_json(const SpikeRow& row) {
  Json j;
  j["run_length"] = row.run_length;
  j["observed"] = row.observed;
  j["expected"] = row.expected;
  j["ratio"] = std::isfinite(row.ratio) ? Json(row.ratio) : Json("inf");
  j["z"] = std::isfinite(row.z) ? Json(row.z) : Json("inf");
  j["poisson_5sigma_bound"] = row.bound;
  j["exceeds_bound"] = row.exceeds_bound();
  return j;
}

Json to_json(const SpikeReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) rows.push_back(to_json(row));
  Json j;
  j["rows"] = std::move(rows);
  j["max_ratio"] = to_json(rep.max_ratio);
  j["max_z"] = to_json(rep.max_z);
  return j;
}

Json to_json(const PlantedSpikeReport& rep) {
  Json j;
  j["trials"] = rep.trials;
  j["entropy_seed"] = rep.entropy_seed;
  j["len_622"] = rep.len_622;
  j["len_623"] = rep.len_623;
  j["len_624"] = rep.len_624;
  j["frequency_of_622"] = rep.frequency_of_622;
  j["frequency_of_623"] = rep.frequency_of_623;
  j["frequency_of_624"] = rep.frequency_of_624;
  j["expected_623"] = rep.expected_623;
  j["no_early_duplicate"] = rep.no_early_duplicate;
  j["z_score"] = rep.z_score;
  return j;
}

// ----------------------------------------------------------- checkpoints

Json to_json(const ScanCheckpoint& cp) {
  Json config;
  config["num_runs"] = cp.config.num_runs;
  config["r_max"] = cp.config.r_max;
  config["generator"] = to_string(cp.config.generator);
  config["seed"] = cp.config.seed;
  config["tempered"] = cp.config.tempered;
  config["annotate_lags"] = cp.config.annotate_lags;
  config["convention"] = to_string(cp.config.convention);

  Json state;
  state["words"] = cp.mt_state.words;
  state["cursor"] = cp.mt_state.cursor;
  state["origin"] = cp.mt_state.origin;

  Json j;
  j["config"] = std::move(config);
  j["histogram"] = to_json(cp.scanner.histogram);
  j["pending"] = cp.scanner.pending;
  j["previous_lag"] = cp.scanner.previous_lag;
  j["mt_state"] = std::move(state);
  j["control_counter"] = cp.control_counter;
  return j;
}

ScanCheckpoint checkpoint_from_json(const Json& j) {
  ScanCheckpoint cp;
  const Json& config = j.at("config");
  cp.config.num_runs = config.at("num_runs").get<std::uint64_t>();
  cp.config.r_max = config.at("r_max").get<std::uint64_t>();
  cp.config.generator = parse_generator_kind(config.at("generator").get<std::string>());
  cp.config.seed = config.at("seed").get<std::uint64_t>();
  cp.config.tempered = config.at("tempered").get<bool>();
  cp.config.annotate_lags = config.at("annotate_lags").get<bool>();
  cp.config.convention = parse_convention(config.at("convention").get<std::string>());
  cp.scanner.histogram = histogram_from_json(j.at("histogram"));
  cp.scanner.pending = j.at("pending").get<std::vector<std::uint32_t>>();
  cp.scanner.previous_lag = j.at("previous_lag").get<std::uint64_t>();
  const Json& state = j.at("mt_state");
  cp.mt_state.words = state.at("words").get<std::vector<std::uint64_t>>();
  cp.mt_state.cursor = state.at("cursor").get<std::size_t>();
  cp.mt_state.origin = state.at("origin").get<std::uint64_t>();
  cp.control_counter = j.at("control_counter").get<std::uint64_t>();
  return cp;
}

// ------------------------------------------------------------------- CSV

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace {

void write_row(std::ostream& out, const std::string& label, std::uint64_t count,
               double expected) {
  double ratio = 0;
  if (expected > 0) {
    ratio = static_cast<double>(count) / expected;
  } else if (count > 0) {
    ratio = std::numeric_limits<double>::infinity();
  }
  out << label << ',' << count << ',' << format_double(expected) << ','
      << format_double(ratio) << ',' << format_double(poisson_z(count, expected)) << '\n';
}

double parse_double_field(const std::string& field, std::size_t line) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

std::uint64_t parse_count_field(const std::string& field, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw FormatError("line " + std::to_string(line) + ": bad count '" + field + "'");
  }
  return v;
}

}  // namespace

void write_histogram_csv(std::ostream& out, const RunLengthHistogram& hist,
                         const Baseline& baseline) {
  out << "run_length,count,expected,ratio,z\n";
  for (const auto& [r, n] : hist.counts) write_row(out, std::to_string(r), n, baseline.at(r));
  write_row(out, "OVERFLOW", hist.overflow, baseline.overflow_expected);
}

HistogramTable read_histogram_csv(std::istream& in) {
  HistogramTable table;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("empty histogram file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "run_length,count,expected,ratio,z") {
    throw FormatError("expected header run_length,count,expected,ratio,z");
  }
  bool saw_overflow = false;
  auto& hist = table.histogram;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const std::uint64_t count = parse_count_field(fields[1], line_no);
    const double expected = parse_double_field(fields[2], line_no);
    parse_double_field(fields[3], line_no);
    parse_double_field(fields[4], line_no);
    if (fields[0] == "OVERFLOW") {
      if (saw_overflow) throw FormatError("duplicate OVERFLOW row");
      saw_overflow = true;
      hist.overflow = count;
      table.overflow_expected = expected;
    } else {
      const std::uint64_t r = parse_count_field(fields[0], line_no);
      if (r == 0) throw FormatError("line " + std::to_string(line_no) + ": run length 0");
      if (table.expected.count(r) != 0) {
        throw FormatError("line " + std::to_string(line_no) + ": duplicate run length");
      }
      if (count > 0) hist.counts[r] = count;
      table.expected[r] = expected;
    }
    hist.total_runs += count;
  }
  return table;
}

}  // namespace mtdup::report
