#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "projstream/evaluation.hpp"
#include "projstream/kdd.hpp"

namespace projstream {

enum class EngineKind { Ea, Cf, Both };
enum class NormalizationMode { MinMaxInitial, None };
enum class TimingMode { Wall, None };  // None writes zero timings (replay diffs)

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input_path;
    std::string output_dir = "out";
    EngineKind engine = EngineKind::Ea;
    Params params;
    NormalizationMode normalization = NormalizationMode::MinMaxInitial;
    TimingMode timing = TimingMode::Wall;
    std::optional<std::uint64_t> max_records;

    void validate() const;
};

/// Flat key=value configuration. Recognized keys (defaults in parens):
///   N(200) pi(30) mu(10) beta(0.2) xi(0.002) initialPoints(1000)
///   epsilon(10) H(1) alpha(derived) rho(1000) lambda(0.2324)
///   burstFraction(0.9) decayWeight(true) distanceNormalizer(rho|xi)
///   engine(ea|cf|both) normalization(minmax_initial|none)
///   timing(wall|none) maxRecords input output
/// Precedence: built-in defaults < config file < PROJSTREAM_<KEY> env
/// variables < explicit overrides (CLI flags).
RunConfig load_config(const std::optional<std::string>& config_path,
                      const std::map<std::string, std::string>& overrides);

/// Applies one key=value pair; throws ConfigError on unknown keys or
/// malformed values.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

struct TupleDump {
    std::uint64_t id = 0;
    double w = 0.0;
    std::uint64_t created_seq = 0;
    std::uint64_t last_update_seq = 0;
    Vec center;
    Vec variances;
    std::size_t pdim = 0;
};

struct EngineDump {
    std::string engine;  // "ea" or "cf"
    std::size_t dimensions = 0;
    std::uint64_t query_seq = 0;
    std::vector<TupleDump> cores;
    std::vector<TupleDump> outliers;
    std::vector<std::vector<std::uint64_t>> final_clusters;
    std::vector<MetricsRow> rows;
};

struct RunSummary {
    std::uint64_t lines_read = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::size_t dimensions = 0;
    std::vector<EngineDump> engines;
};

/// Full run: initialization prefix -> normalizer -> initial clusters ->
/// windowed streaming with per-window rebalance and metrics -> offline
/// clusters. Writes metrics.csv, metrics.jsonl and clusters.json under
/// config.output_dir. Throws ConfigError / IoError.
RunSummary run_pipeline(const RunConfig& config);

std::string to_string(EngineKind kind);

}  // namespace projstream
