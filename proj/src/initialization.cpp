#include "projstream/initialization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace projstream {

namespace {

double euclidean(const Point& a, const Point& b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const double d = a.values[j] - b.values[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double directed_projected(const Point& from, const Point& to, const PreferenceVector& psi_from,
                          const Params& params) {
    double sum = 0.0;
    for (std::size_t j = 0; j < from.dim(); ++j) {
        const double d = from.values[j] - to.values[j];
        sum += (psi_from.psi[j] / params.rho) * d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

double point_projected_distance(const Point& p, const Point& q, const PreferenceVector& psi_p,
                                const PreferenceVector& psi_q, const Params& params) {
    detail::require_dim(q.dim(), p.dim(), "point_projected_distance");
    return std::max(directed_projected(p, q, psi_p, params),
                    directed_projected(q, p, psi_q, params));
}

NeighborSet full_neighborhood(std::size_t idx, const std::vector<Point>& buffer,
                              const Params& params) {
    NeighborSet n;
    n.anchor = idx;
    n.kind = NeighborSet::Kind::FullDim;
    for (std::size_t i = 0; i < buffer.size(); ++i)
        if (euclidean(buffer[idx], buffer[i]) <= params.eps) n.members.push_back(i);
    return n;
}

PreferenceVector point_preference_vector(std::size_t idx, const std::vector<Point>& buffer,
                                         const Params& params) {
    const NeighborSet n = full_neighborhood(idx, buffer, params);
    const std::size_t d = buffer[idx].dim();
    Vec mean(d, 0.0), mean_sq(d, 0.0);
    for (std::size_t i : n.members) {
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += buffer[i].values[j];
            mean_sq[j] += buffer[i].values[j] * buffer[i].values[j];
        }
    }
    const double count = static_cast<double>(n.members.size());
    PreferenceVector pv;
    pv.psi.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        mean[j] /= count;
        const double var = std::max(0.0, mean_sq[j] / count - mean[j] * mean[j]);
        pv.psi[j] = var < params.xi ? params.rho : 1.0;
    }
    return pv;
}

namespace {

std::vector<PreferenceVector> all_preferences(const std::vector<Point>& buffer,
                                              const Params& params) {
    std::vector<PreferenceVector> out;
    out.reserve(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i)
        out.push_back(point_preference_vector(i, buffer, params));
    return out;
}

NeighborSet projected_neighborhood_with(std::size_t idx, const std::vector<Point>& buffer,
                                        const std::vector<PreferenceVector>& prefs,
                                        const Params& params) {
    NeighborSet n;
    n.anchor = idx;
    n.kind = NeighborSet::Kind::Projected;
    for (std::size_t i = 0; i < buffer.size(); ++i)
        if (point_projected_distance(buffer[idx], buffer[i], prefs[idx], prefs[i], params) <=
            params.eps)
            n.members.push_back(i);
    return n;
}

bool is_core_with(std::size_t idx, const std::vector<Point>& buffer,
                  const std::vector<PreferenceVector>& prefs, const Params& params) {
    if (prefs[idx].preferred_count(params.rho) > params.pi_dim) return false;
    return projected_neighborhood_with(idx, buffer, prefs, params).members.size() >=
           static_cast<std::size_t>(params.mu);
}

}  // namespace

NeighborSet projected_neighborhood(std::size_t idx, const std::vector<Point>& buffer,
                                   const Params& params) {
    return projected_neighborhood_with(idx, buffer, all_preferences(buffer, params), params);
}

bool is_core_point(std::size_t idx, const std::vector<Point>& buffer, const Params& params) {
    return is_core_with(idx, buffer, all_preferences(buffer, params), params);
}

std::vector<std::vector<std::size_t>> initial_memberships(const std::vector<Point>& buffer,
                                                          const Params& params) {
    std::vector<std::vector<std::size_t>> clusters;
    if (buffer.empty()) return clusters;
    const auto prefs = all_preferences(buffer, params);
    std::vector<bool> is_core(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i) is_core[i] = is_core_with(i, buffer, prefs, params);

    std::vector<bool> claimed(buffer.size(), false);
    for (std::size_t seed = 0; seed < buffer.size(); ++seed) {
        if (claimed[seed] || !is_core[seed]) continue;
        std::vector<std::size_t> cluster;
        std::deque<std::size_t> queue;
        for (std::size_t i : full_neighborhood(seed, buffer, params).members) {
            if (!claimed[i]) {
                claimed[i] = true;
                queue.push_back(i);
            }
        }
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            cluster.push_back(cur);
            if (!is_core[cur]) continue;
            // directly projected reachable, unclassified points only
            for (std::size_t i = 0; i < buffer.size(); ++i) {
                if (claimed[i]) continue;
                if (point_projected_distance(buffer[cur], buffer[i], prefs[cur], prefs[i],
                                             params) <= params.eps) {
                    claimed[i] = true;
                    queue.push_back(i);
                }
            }
        }
        std::sort(cluster.begin(), cluster.end());
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

namespace {

template <class Tuple>
std::vector<Tuple> fold_clusters(const std::vector<Point>& buffer, const Params& params) {
    std::vector<Tuple> tuples;
    std::uint64_t id = 1;
    for (const auto& members : initial_memberships(buffer, params)) {
        Tuple t = Tuple::seeded(buffer[members.front()], id++);
        for (std::size_t k = 1; k < members.size(); ++k)
            t = absorb(t, buffer[members[k]], params);
        t.created_seq = buffer[members.front()].seq;
        tuples.push_back(std::move(t));
    }
    return tuples;
}

}  // namespace

std::vector<EaTuple> build_initial_clusters(const std::vector<Point>& buffer,
                                            const Params& params) {
    return fold_clusters<EaTuple>(buffer, params);
}

std::vector<CfTuple> build_initial_cf_clusters(const std::vector<Point>& buffer,
                                               const Params& params) {
    return fold_clusters<CfTuple>(buffer, params);
}

}  // namespace projstream
