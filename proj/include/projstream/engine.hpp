#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "projstream/summary.hpp"

namespace projstream {

enum class MergeTarget { Core, Outlier, NewOutlier };

/// Telemetry of one processed point: which list took it, which tuple,
/// and the winning projected distance (0 for a fresh outlier).
struct MergeOutcome {
    MergeTarget target = MergeTarget::NewOutlier;
    std::uint64_t tuple_id = 0;
    double distance = 0.0;
};

template <class Tuple>
struct EngineState {
    std::vector<Tuple> cores;
    std::vector<Tuple> outliers;
    std::uint64_t window_index = 0;  // completed windows
    std::uint64_t points_seen = 0;   // process_point calls
    std::uint64_t last_seq = 0;      // arrival index of the last processed point
};

/// Single-owner maintenance loop over core and outlier micro-clusters.
/// Per point: try the core list (pdim-gated, closest by projected distance,
/// radius gate on the tentatively updated tuple), then the outlier list
/// (no pdim gate), else start a fresh outlier. Exactly one tuple absorbs
/// the point; every other tuple in each list that was tried degrades once,
/// and a core absorption also degrades the whole outlier list.
template <class Tuple>
class StreamEngine {
public:
    StreamEngine(Params params, std::size_t dim) : params_(std::move(params)), dim_(dim) {
        params_.validate(dim);
    }

    /// Install initialization-phase core tuples. Ids are reassigned to keep
    /// the engine-wide id sequence unique.
    void seed_cores(std::vector<Tuple> cores) {
        for (auto& t : cores) {
            t.id = next_id_++;
            state_.cores.push_back(std::move(t));
        }
    }

    MergeOutcome process_point(const Point& p) {
        detail::require_dim(p.dim(), dim_, "process_point");
        ++state_.points_seen;
        state_.last_seq = p.seq;
        MergeOutcome outcome;
        if (add_to_core(p, outcome)) {
            for (auto& t : state_.outliers) t = fade(t, params_);
            return outcome;
        }
        if (add_to_outlier(p, outcome)) return outcome;
        create_outlier_mc(p, outcome);
        return outcome;
    }

    /// Candidate scan over the core list. On accept the chosen tuple is
    /// committed and every other core degrades once; on reject (including
    /// "no pdim-eligible candidate") every core degrades once. An empty
    /// core list is a pure no-op.
    bool add_to_core(const Point& p, MergeOutcome& outcome) {
        if (state_.cores.empty()) return false;
        std::size_t best = state_.cores.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < state_.cores.size(); ++i) {
            const Tuple& t = state_.cores[i];
            const Moments after = preview_absorb(t, p, params_);
            const std::size_t pd = pdim(variance(after), params_);
            const bool burst = after.w / static_cast<double>(params_.n_window) >
                               params_.burst_fraction;
            if (pd > params_.pi_dim && !burst) continue;
            const double dist = projected_distance(p, t, params_);
            const bool wins = dist < best_dist ||
                              (dist == best_dist && best < state_.cores.size() &&
                               t.id < state_.cores[best].id);
            if (wins) {
                best = i;
                best_dist = dist;
            }
        }
        if (best < state_.cores.size()) {
            const Moments after = preview_absorb(state_.cores[best], p, params_);
            if (projected_radius(after, params_) < params_.eps) {
                commit(state_.cores, best, p);
                outcome = {MergeTarget::Core, state_.cores[best].id, best_dist};
                return true;
            }
        }
        for (auto& t : state_.cores) t = fade(t, params_);
        return false;
    }

    /// Same scan over the outlier list, without the pdim gate.
    bool add_to_outlier(const Point& p, MergeOutcome& outcome) {
        if (state_.outliers.empty()) return false;
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < state_.outliers.size(); ++i) {
            const double dist = projected_distance(p, state_.outliers[i], params_);
            if (dist < best_dist ||
                (dist == best_dist && state_.outliers[i].id < state_.outliers[best].id)) {
                best = i;
                best_dist = dist;
            }
        }
        const Moments after = preview_absorb(state_.outliers[best], p, params_);
        if (projected_radius(after, params_) < params_.eps) {
            commit(state_.outliers, best, p);
            outcome = {MergeTarget::Outlier, state_.outliers[best].id, best_dist};
            return true;
        }
        for (auto& t : state_.outliers) t = fade(t, params_);
        return false;
    }

    void create_outlier_mc(const Point& p, MergeOutcome& outcome) {
        state_.outliers.push_back(seed_tuple<Tuple>(p, next_id_++));
        outcome = {MergeTarget::NewOutlier, state_.outliers.back().id, 0.0};
    }

    /// Window-boundary pass: demote cores below beta*mu, promote outliers
    /// above beta*mu that satisfy the full Core predicate, then drop
    /// outliers untouched for a full window (including cores demoted in
    /// this very pass, so a repeated call is a no-op).
    void window_rebalance() {
        const double floor = params_.beta * params_.mu;
        move_if(state_.cores, state_.outliers,
                [&](const Tuple& t) { return t.w < floor; });
        move_if(state_.outliers, state_.cores, [&](const Tuple& t) {
            return t.w > floor && classify_mc(t, params_) == McKind::Core;
        });
        std::erase_if(state_.outliers, [&](const Tuple& t) {
            return state_.last_seq >= t.last_update_seq &&
                   state_.last_seq - t.last_update_seq >= params_.n_window;
        });
        ++state_.window_index;
    }

    const EngineState<Tuple>& state() const { return state_; }
    const Params& params() const { return params_; }
    std::size_t dim() const { return dim_; }

private:
    void commit(std::vector<Tuple>& list, std::size_t chosen, const Point& p) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i == chosen)
                list[i] = absorb(list[i], p, params_);
            else
                list[i] = fade(list[i], params_);
        }
    }

    template <class Pred>
    static void move_if(std::vector<Tuple>& from, std::vector<Tuple>& to, Pred pred) {
        auto pivot = std::stable_partition(from.begin(), from.end(),
                                           [&](const Tuple& t) { return !pred(t); });
        for (auto it = pivot; it != from.end(); ++it) to.push_back(std::move(*it));
        from.erase(pivot, from.end());
    }

    Params params_;
    std::size_t dim_;
    EngineState<Tuple> state_;
    std::uint64_t next_id_ = 1;
};

using EaEngine = StreamEngine<EaTuple>;
using CfEngine = StreamEngine<CfTuple>;

}  // namespace projstream
