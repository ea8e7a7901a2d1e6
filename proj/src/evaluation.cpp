#include "projstream/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace projstream {

std::optional<double> purity(const std::map<std::uint64_t, LabelCounts>& assignments) {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& [id, labels] : assignments) {
        std::uint64_t total = 0, dominant = 0;
        for (const auto& [label, count] : labels) {
            total += count;
            dominant = std::max(dominant, count);
        }
        if (total == 0) continue;  // empty clusters are excluded from K
        sum += static_cast<double>(dominant) / static_cast<double>(total);
        ++k;
    }
    if (k == 0) return std::nullopt;
    return sum / static_cast<double>(k);
}

WeightProfiles weight_profiles(const Params& params) {
    const std::size_t n = params.n_window;
    const double a = params.alpha();
    WeightProfiles p;
    p.ea.resize(n);
    p.cf.resize(n);
    double w_total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        w_total += std::exp2(-params.lambda * static_cast<double>(i) / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double age = static_cast<double>(n - 1 - k);  // oldest -> newest
        p.ea[k] = a * std::pow(1.0 - a, age);
        p.cf[k] = std::exp2(-params.lambda * age / static_cast<double>(n)) / w_total;
    }
    return p;
}

MemoryMetric memory_metric(const EngineState<EaTuple>& state, std::size_t dim,
                           const Params& params) {
    (void)params;
    MemoryMetric m;
    m.num_core = state.cores.size();
    m.num_outlier = state.outliers.size();
    m.resident_values = (m.num_core + m.num_outlier) * (2 * dim + 1);
    return m;
}

MemoryMetric memory_metric(const EngineState<CfTuple>& state, std::size_t dim,
                           const Params& params) {
    MemoryMetric m;
    m.num_core = state.cores.size();
    m.num_outlier = state.outliers.size();
    m.resident_values = (m.num_core + m.num_outlier) * (2 * dim + 1 + params.n_window * dim);
    return m;
}

std::optional<double> PurityTracker::compute(const std::vector<std::uint64_t>& live_ids) const {
    std::map<std::uint64_t, LabelCounts> merged;
    const std::size_t take = std::min(horizon_, windows_.size());
    for (std::size_t k = 0; k < take; ++k) {
        const auto& win = windows_[windows_.size() - 1 - k];
        for (const auto& [id, labels] : win)
            for (const auto& [label, count] : labels) merged[id][label] += count;
    }
    std::map<std::uint64_t, LabelCounts> live;
    for (std::uint64_t id : live_ids) {
        auto it = merged.find(id);
        if (it != merged.end()) live.emplace(id, it->second);
    }
    return purity(live);
}

}  // namespace projstream
