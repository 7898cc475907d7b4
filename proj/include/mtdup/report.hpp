#pragma once

// Machine-readable reports.  Every JSON report shares one envelope with a
// fixed key order, so identical inputs give identical bytes.  Histograms are
// also written as CSV (run_length,count,expected,ratio,z plus an OVERFLOW
// row) and can be read back for re-analysis.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mtdup/conditional_sampler.hpp"
#include "mtdup/repetition_scan.hpp"
#include "mtdup/twist_algebra.hpp"

namespace mtdup::report {

inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

struct Envelope {
  std::string command;
  Json params = Json::object();
  Json results = Json::object();
  Json exact_probabilities = Json::object();  ///< name -> "2^-k"
  Json timestamps = Json::object();           ///< empty unless requested
  Json seeds = Json::object();
  std::string tool_version = kToolVersion;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

Json to_json(const Envelope& env);
Envelope envelope_from_json(const Json& j);
/// Two-space indented JSON with a trailing newline.
std::string serialize(const Envelope& env);

/// {"power": "2^-k", "decimal": "...", "exponent": k}
Json to_json(const DyadicProb& p);
DyadicProb dyadic_from_json(const Json& j);
/// Parses "1" or "2^-k"; throws std::invalid_argument otherwise.
DyadicProb parse_dyadic(const std::string& s);

Json to_json(const EventSet& events);
EventSet event_set_from_json(const Json& j);
/// "1,2,3" -> {1,2,3}; empty string -> {}.  Throws std::invalid_argument.
EventSet parse_event_list(const std::string& s);
std::string format_event_list(const EventSet& events);

Json to_json(const TheoremReport& rep);
Json to_json(const LemmaReport& rep);
Json to_json(const IndependenceContrast& c);

Json to_json(const ConditionalReport& rep);
ConditionalReport conditional_from_json(const Json& j);

Json to_json(const RunLengthHistogram& hist);
RunLengthHistogram histogram_from_json(const Json& j);
Json to_json(const SpikeRow& row);
Json to_json(const SpikeReport& rep);
Json to_json(const PlantedSpikeReport& rep);

Json to_json(const ScanCheckpoint& cp);
ScanCheckpoint checkpoint_from_json(const Json& j);

/// Malformed CSV input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A histogram as read back from CSV, with the expected counts it carried.
struct HistogramTable {
  RunLengthHistogram histogram;
  std::map<std::uint64_t, double> expected;
  double overflow_expected = 0;
};

/// Shortest decimal that reads back as the same double.
std::string format_double(double x);

void write_histogram_csv(std::ostream& out, const RunLengthHistogram& hist,
                         const Baseline& baseline);
/// Throws FormatError on a bad header, bad field or duplicate run length.
HistogramTable read_histogram_csv(std::istream& in);

}  // namespace mtdup::report
