#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "projstream/engine.hpp"

namespace projstream {

/// Per-window evaluation record. Purity fields are absent when no tracked
/// cluster holds a point inside the horizon.
struct MetricsRow {
    std::uint64_t window_index = 0;
    std::string engine;  // "ea" or "cf"
    std::optional<double> purity_core_only;
    std::optional<double> purity_all;
    std::size_t num_core = 0;
    std::size_t num_outlier = 0;
    std::size_t num_final_clusters = 0;
    double window_wall_time_s = 0.0;   // engine-only
    double window_total_time_s = 0.0;  // including metrics bookkeeping
};

using LabelCounts = std::map<std::string, std::uint64_t>;

/// Average dominant-label fraction over the nonempty clusters; nullopt
/// when every cluster is empty.
std::optional<double> purity(const std::map<std::uint64_t, LabelCounts>& assignments);

/// Per-point weights of one full window, oldest to newest:
///   ea[k] = alpha*(1-alpha)^(N-1-k)
///   cf[k] = 2^(-lambda*(N-1-k)/N) / W,  W = sum_i 2^(-lambda*i/N)
struct WeightProfiles {
    Vec ea;
    Vec cf;
};

WeightProfiles weight_profiles(const Params& params);

/// Micro-cluster counts plus the summary-value footprint: (2d+1) values per
/// tuple, and N*d more per tuple for the ring-buffered baseline.
struct MemoryMetric {
    std::size_t num_core = 0;
    std::size_t num_outlier = 0;
    std::size_t resident_values = 0;
};

MemoryMetric memory_metric(const EngineState<EaTuple>& state, std::size_t dim,
                           const Params& params);
MemoryMetric memory_metric(const EngineState<CfTuple>& state, std::size_t dim,
                           const Params& params);

/// Merge-time label bookkeeping over a sliding horizon of windows. Each
/// point credits the tuple that absorbed it; purity queries are answered
/// against the tuple ids alive at query time.
class PurityTracker {
public:
    explicit PurityTracker(std::size_t horizon) : horizon_(horizon == 0 ? 1 : horizon) {
        windows_.emplace_back();
    }

    void credit(std::uint64_t tuple_id, const std::string& label) {
        if (!label.empty()) ++windows_.back()[tuple_id][label];
    }

    /// Close the current window; credits older than the horizon fall off.
    void roll_window() {
        windows_.emplace_back();
        while (windows_.size() > horizon_ + 1) windows_.pop_front();
    }

    /// Eq.-style purity over the live tuple ids, horizon windows plus the
    /// window currently being filled.
    std::optional<double> compute(const std::vector<std::uint64_t>& live_ids) const;

private:
    std::size_t horizon_;
    std::deque<std::map<std::uint64_t, LabelCounts>> windows_;
};

}  // namespace projstream
