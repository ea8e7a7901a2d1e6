#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace projstream {

using Vec = std::vector<double>;

/// One d-dimensional observation. `label` is the ground-truth class tag
/// ("" when absent); it is consumed only by the evaluation layer, never by
/// the clustering path. `seq` is the monotonically increasing arrival index.
struct Point {
    Vec values;
    std::string label;
    std::uint64_t seq = 0;

    std::size_t dim() const { return values.size(); }
};

enum class DistanceNormalizer { Rho, Xi };

/// Run parameters. Defaults are the reference configuration for d=35
/// network-connection streams; alpha is derived from the window size
/// unless explicitly overridden.
struct Params {
    std::size_t n_window = 200;            // N, points per window
    std::optional<double> alpha_override;  // smoothing factor; default 2/(1+N)
    double xi = 0.002;                     // variance threshold for preferred dims
    double rho = 1000.0;                   // preference weight constant, >> 1
    double eps = 10.0;                     // radius threshold
    double mu = 10.0;                      // point-count threshold
    std::size_t pi_dim = 30;               // projected dimensionality threshold
    double beta = 0.2;                     // outlier threshold, in (0,1)
    std::size_t horizon = 1;               // purity horizon, in windows
    std::size_t initial_points = 1000;     // initialization buffer size
    double lambda = 0.2324;                // fading rate of the CF baseline
    double burst_fraction = 0.9;           // W/N override for core eligibility
    bool decay_weight = true;              // degrade also scales W by (1-alpha)
    DistanceNormalizer distance_normalizer = DistanceNormalizer::Rho;

    double alpha() const {
        return alpha_override ? *alpha_override
                              : 2.0 / (1.0 + static_cast<double>(n_window));
    }

    /// Per-event decay factor of the CF baseline, 2^(-lambda/N).
    double cf_decay() const;

    /// Throws std::invalid_argument on the first violated constraint.
    /// `dim` is the stream dimensionality when known, 0 to skip dim checks.
    void validate(std::size_t dim = 0) const;
};

/// Two-valued per-dimension weights: rho on preferred dimensions
/// (variance below xi), 1 elsewhere.
struct PreferenceVector {
    Vec psi;

    std::size_t preferred_count(double rho) const {
        std::size_t n = 0;
        for (double v : psi)
            if (v == rho) ++n;
        return n;
    }
};

enum class McKind { Core, Outlier, Neither };

namespace detail {
inline void require_dim(std::size_t got, std::size_t want, const char* where) {
    if (got != want)
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(got) + " vs " + std::to_string(want) + ")");
}
}  // namespace detail

}  // namespace projstream
