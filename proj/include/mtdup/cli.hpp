#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtdup::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiscrepancy = 1;
inline constexpr int kExitUsage = 2;

/// Trial and run counts above these need --long.
inline constexpr std::uint64_t kLongTrials = 10'000'000;
inline constexpr std::uint64_t kLongRuns = 1'000'000;

/// Relative output paths are placed under this directory when it is set.
inline constexpr const char* kOutDirEnv = "MTDUP_OUT_DIR";

std::filesystem::path resolve_output(const std::string& path);

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reference vectors, bit-convention arbiter, lemma suite and theorem ranks.
std::vector<SelfTestCheck> selftest_checks();

}  // namespace mtdup::cli
