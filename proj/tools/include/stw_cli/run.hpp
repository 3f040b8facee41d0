#pragma once

// Verification runs behind the `stw` command line: a validated RunConfig goes
// in, a VerificationReport with one flat record per check comes out, and the
// report renders as text, JSON or CSV.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace stw::cli {

inline constexpr const char* kArtifactVersion = "0.3.0";

enum class Format { kText, kJson, kCsv };

struct RunConfig {
  std::string subcommand;  // solomon-tits, decompose, identities, bound, oracle-homology, relations, cache
  std::string action;      // warm | clear for cache
  std::optional<std::size_t> g;
  std::optional<std::size_t> n;
  std::optional<std::uint32_t> p;
  bool extended = false;
  bool exact = false;
  std::size_t primes = 2;
  unsigned workers = 1;
  std::uint64_t seed = 2024;
  std::size_t samples = 1000;  // relation instances
  bool chain_bases_vanish = false;
  std::string cache_dir;
  std::string snapshot_dir;
  Format format = Format::kText;
  std::string out;
};

/// Throws DomainError on an inconsistent config: unknown subcommand, missing
/// or out-of-range parameters, zero primes or workers.
void validate(const RunConfig& config);

/// Worker count from STW_WORKERS, or `fallback` when unset. Throws DomainError on junk.
unsigned workers_from_env(unsigned fallback = 1);

enum class Status { kPass, kFail, kSkipped, kDiscrepant };
std::string status_string(Status s);

struct CheckRecord {
  std::string name;
  std::string anchor;  // the statement being verified, in words
  std::string expected;
  std::string computed;
  Status status = Status::kPass;
  double wall_ms = 0;
};

struct VerificationReport {
  RunConfig config;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();  // command-specific payload
  std::vector<std::string> csv_rows;  // command-specific CSV table; the check list when empty

  /// Fails iff some record failed; skipped and discrepant records do not count.
  bool ok() const noexcept;
};

VerificationReport cmd_solomon_tits(const RunConfig& config);
VerificationReport cmd_decompose(const RunConfig& config);
VerificationReport cmd_identities(const RunConfig& config);
VerificationReport cmd_bound(const RunConfig& config);
VerificationReport cmd_oracle_homology(const RunConfig& config);
VerificationReport cmd_relations(const RunConfig& config);
VerificationReport cmd_cache(const RunConfig& config);

/// Dispatch on config.subcommand after validate().
VerificationReport run(const RunConfig& config);

nlohmann::ordered_json config_json(const RunConfig& config);
nlohmann::ordered_json to_json(const VerificationReport& report);
std::string render(const VerificationReport& report, Format format);

/// 0 pass, 1 check failure.
int exit_code(const VerificationReport& report);
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

}  // namespace stw::cli
