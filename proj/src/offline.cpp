#include "projstream/offline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace projstream {

namespace {

struct VirtualPoint {
    std::uint64_t id;
    Vec center;
    Vec psi;
};

// Each tuple is a virtual point at its center carrying its own preference
// vector; the edge predicate is the max of the two directed distances.
double center_distance(const VirtualPoint& a, const VirtualPoint& b, const Params& params) {
    double fwd = 0.0, rev = 0.0;
    for (std::size_t j = 0; j < a.center.size(); ++j) {
        const double d = a.center[j] - b.center[j];
        fwd += (a.psi[j] / params.rho) * d * d;
        rev += (b.psi[j] / params.rho) * d * d;
    }
    return std::sqrt(std::max(fwd, rev));
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

template <class Tuple>
FinalClustering cluster_cores(const std::vector<Tuple>& cores, const Params& params,
                              std::uint64_t query_seq) {
    std::vector<VirtualPoint> pts;
    pts.reserve(cores.size());
    for (const auto& t : cores) {
        const Moments m = moments(t);
        pts.push_back({t.id, m.mean, preference_vector(variance(m), params).psi});
    }

    std::vector<std::size_t> parent(pts.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = i + 1; k < pts.size(); ++k) {
            if (center_distance(pts[i], pts[k], params) <= params.eps) {
                const std::size_t ri = find_root(parent, i);
                const std::size_t rk = find_root(parent, k);
                if (ri != rk) parent[std::max(ri, rk)] = std::min(ri, rk);
            }
        }
    }

    FinalClustering out;
    out.query_seq = query_seq;
    std::vector<long> slot(pts.size(), -1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t r = find_root(parent, i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(out.clusters.size());
            out.clusters.emplace_back();
        }
        out.clusters[static_cast<std::size_t>(slot[r])].push_back(pts[i].id);
    }
    return out;
}

}  // namespace

FinalClustering final_clusters(const std::vector<EaTuple>& cores, const Params& params,
                               std::uint64_t query_seq) {
    return cluster_cores(cores, params, query_seq);
}

FinalClustering final_clusters(const std::vector<CfTuple>& cores, const Params& params,
                               std::uint64_t query_seq) {
    return cluster_cores(cores, params, query_seq);
}

}  // namespace projstream
