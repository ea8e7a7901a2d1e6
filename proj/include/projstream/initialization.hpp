#pragma once

#include <cstddef>
#include <vector>

#include "projstream/summary.hpp"

namespace projstream {

/// Epsilon-neighborhood of one buffer point. FullDim uses plain Euclidean
/// distance, Projected uses the symmetrized point projected distance.
struct NeighborSet {
    enum class Kind { FullDim, Projected };
    std::size_t anchor = 0;
    std::vector<std::size_t> members;  // ascending indices, anchor included
    Kind kind = Kind::FullDim;
};

/// max(dist_p(p,q), dist_p(q,p)) where dist_p(a,b) weights each squared
/// coordinate difference by psi_a[j]/rho.
double point_projected_distance(const Point& p, const Point& q, const PreferenceVector& psi_p,
                                const PreferenceVector& psi_q, const Params& params);

NeighborSet full_neighborhood(std::size_t idx, const std::vector<Point>& buffer,
                              const Params& params);

/// Preference vector of a point: dimension j is preferred when the sample
/// variance of j over the full-dimensional eps-neighborhood is below xi.
PreferenceVector point_preference_vector(std::size_t idx, const std::vector<Point>& buffer,
                                         const Params& params);

NeighborSet projected_neighborhood(std::size_t idx, const std::vector<Point>& buffer,
                                   const Params& params);

/// Projected core point test: neighborhood preference dimensionality at
/// most pi and at least mu points in the projected eps-neighborhood.
bool is_core_point(std::size_t idx, const std::vector<Point>& buffer, const Params& params);

/// Disjoint cluster memberships grown from core points in ascending index
/// order: seed with the full-dimensional neighborhood, expand through core
/// members by projected reachability. Unclaimed points are discarded.
std::vector<std::vector<std::size_t>> initial_memberships(const std::vector<Point>& buffer,
                                                          const Params& params);

/// Memberships folded into EA tuples by sequential update (first member
/// seeds the tuple). Tuple ids are 1-based in emission order.
std::vector<EaTuple> build_initial_clusters(const std::vector<Point>& buffer,
                                            const Params& params);

/// Same memberships folded into CF tuples, for the baseline engine.
std::vector<CfTuple> build_initial_cf_clusters(const std::vector<Point>& buffer,
                                               const Params& params);

}  // namespace projstream
