#pragma once

#include <cstdint>
#include <vector>

#include "projstream/summary.hpp"

namespace projstream {

/// On-demand clustering result: connected components of the core tuples
/// under symmetrized projected center distance <= eps.
struct FinalClustering {
    std::vector<std::vector<std::uint64_t>> clusters;  // tuple ids per component
    std::uint64_t query_seq = 0;
};

FinalClustering final_clusters(const std::vector<EaTuple>& cores, const Params& params,
                               std::uint64_t query_seq = 0);
FinalClustering final_clusters(const std::vector<CfTuple>& cores, const Params& params,
                               std::uint64_t query_seq = 0);

}  // namespace projstream
