#pragma once

#include <cstdint>
#include <deque>

#include "projstream/types.hpp"

namespace projstream {

// Numeric slack for the ea2 - ea1^2 cancellation; variances in
// [-kTauVar, 0) clamp to 0, anything lower is a consistency error.
inline constexpr double kTauVar = 1e-12;

/// Exponential-moving-average micro-cluster summary: (2d+1) resident values.
///   ea1[j] <- alpha*p[j]   + (1-alpha)*ea1[j]
///   ea2[j] <- alpha*p[j]^2 + (1-alpha)*ea2[j]
///   w      <- w + 1 on absorb, w*(1-alpha) on degrade (configurable)
struct EaTuple {
    Vec ea1;
    Vec ea2;
    double w = 0.0;
    std::uint64_t created_seq = 0;
    std::uint64_t last_update_seq = 0;
    std::uint64_t id = 0;

    std::size_t dim() const { return ea1.size(); }

    /// Zero-initialized tuple (ea1 = ea2 = 0, w = 0).
    static EaTuple zero(std::size_t dim, std::uint64_t id = 0);

    /// Tuple whose first element is p: ea1 = p, ea2 = p^2, w = 1.
    static EaTuple seeded(const Point& p, std::uint64_t id = 0);
};

/// Fading-sum micro-cluster summary (the baseline): weighted sums over a
/// ring buffer of the last N raw points. Every event (absorb or degrade)
/// advances the tuple clock one step and decays all held weight by
/// 2^(-lambda/N); absorbing into a full window first evicts the oldest
/// point's remaining contribution.
struct CfTuple {
    struct Entry {
        Vec values;
        std::uint64_t tick;  // tuple clock at insertion
    };

    Vec cf1;
    Vec cf2;
    double w = 0.0;
    std::deque<Entry> window;
    std::uint64_t tick = 0;  // event clock, one step per absorb/degrade
    std::uint64_t created_seq = 0;
    std::uint64_t last_update_seq = 0;
    std::uint64_t id = 0;

    std::size_t dim() const { return cf1.size(); }

    static CfTuple seeded(const Point& p, std::uint64_t id = 0);
};

/// Moments common to both summaries: per-dimension mean and mean of
/// squares plus the weight. All tuple classification math runs on these.
/// `slack` is the tolerated mean_sq - mean^2 cancellation error; CF moments
/// widen it to the incremental-sum drift bound.
struct Moments {
    Vec mean;
    Vec mean_sq;
    double w = 0.0;
    double slack = kTauVar;
};

Moments moments(const EaTuple& t);
Moments moments(const CfTuple& t);

/// Moments the tuple would have after absorbing p, without committing.
Moments preview_absorb(const EaTuple& t, const Point& p, const Params& params);
Moments preview_absorb(const CfTuple& t, const Point& p, const Params& params);

// -- EA operations ----------------------------------------------------------

EaTuple update_tuple(const EaTuple& t, const Point& p, const Params& params);
EaTuple degrade_tuple(const EaTuple& t, const Params& params);

// -- CF operations ----------------------------------------------------------

CfTuple cf_update(const CfTuple& t, const Point& p, const Params& params);
CfTuple cf_degrade(const CfTuple& t, const Params& params);

/// Recompute cf1/cf2/w from the ring buffer contents at the tuple's
/// current clock. Diagnostic; the engine never calls it.
Moments cf_recompute(const CfTuple& t, const Params& params);

// -- Shared per-tuple math ---------------------------------------------------

/// Per-dimension variance mean_sq[j] - mean[j]^2, clamped at zero within
/// the moments' slack. Throws std::logic_error below -slack.
Vec variance(const Moments& m);
Vec variance(const Moments& m, double slack);
Vec variance(const EaTuple& t);
Vec variance(const CfTuple& t);

PreferenceVector preference_vector(const Vec& variances, const Params& params);
PreferenceVector preference_vector(const EaTuple& t, const Params& params);
PreferenceVector preference_vector(const CfTuple& t, const Params& params);

std::size_t pdim(const Vec& variances, const Params& params);
std::size_t pdim(const EaTuple& t, const Params& params);
std::size_t pdim(const CfTuple& t, const Params& params);

double projected_radius(const Moments& m, const Params& params);
double projected_radius(const EaTuple& t, const Params& params);
double projected_radius(const CfTuple& t, const Params& params);

double projected_distance(const Point& p, const Moments& m, const Params& params);
double projected_distance(const Point& p, const EaTuple& t, const Params& params);
double projected_distance(const Point& p, const CfTuple& t, const Params& params);

/// Core / Outlier / Neither per the weight, radius and projected
/// dimensionality gates. The burst clause (w/N above burst_fraction)
/// substitutes for the pdim gate of Core.
McKind classify_mc(const Moments& m, const Params& params);
McKind classify_mc(const EaTuple& t, const Params& params);
McKind classify_mc(const CfTuple& t, const Params& params);

// -- Engine-facing uniform spellings ----------------------------------------

inline EaTuple absorb(const EaTuple& t, const Point& p, const Params& params) {
    return update_tuple(t, p, params);
}
inline CfTuple absorb(const CfTuple& t, const Point& p, const Params& params) {
    return cf_update(t, p, params);
}
inline EaTuple fade(const EaTuple& t, const Params& params) {
    return degrade_tuple(t, params);
}
inline CfTuple fade(const CfTuple& t, const Params& params) {
    return cf_degrade(t, params);
}
template <class Tuple>
Tuple seed_tuple(const Point& p, std::uint64_t id) {
    return Tuple::seeded(p, id);
}

}  // namespace projstream
