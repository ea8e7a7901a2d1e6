#include "projstream/summary.hpp"

#include <cmath>

namespace projstream {

double Params::cf_decay() const {
    return std::exp2(-lambda / static_cast<double>(n_window));
}

void Params::validate(std::size_t dim) const {
    if (n_window == 0) throw std::invalid_argument("N must be positive");
    const double a = alpha();
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
    if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (pi_dim == 0) throw std::invalid_argument("pi must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
    if (horizon == 0) throw std::invalid_argument("H must be positive");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(burst_fraction > 0.0)) throw std::invalid_argument("burst fraction must be positive");
    if (dim != 0 && pi_dim > dim)
        throw std::invalid_argument("pi must not exceed the stream dimensionality");
}

namespace {

void require_finite(const Point& p) {
    for (double v : p.values)
        if (!std::isfinite(v)) throw std::invalid_argument("point has non-finite value");
}

}  // namespace

// -- EA tuple ----------------------------------------------------------------

EaTuple EaTuple::zero(std::size_t dim, std::uint64_t id) {
    EaTuple t;
    t.ea1.assign(dim, 0.0);
    t.ea2.assign(dim, 0.0);
    t.id = id;
    return t;
}

EaTuple EaTuple::seeded(const Point& p, std::uint64_t id) {
    require_finite(p);
    EaTuple t;
    t.ea1 = p.values;
    t.ea2.resize(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) t.ea2[j] = p.values[j] * p.values[j];
    t.w = 1.0;
    t.created_seq = p.seq;
    t.last_update_seq = p.seq;
    t.id = id;
    return t;
}

EaTuple update_tuple(const EaTuple& t, const Point& p, const Params& params) {
    detail::require_dim(p.dim(), t.dim(), "update_tuple");
    require_finite(p);
    const double a = params.alpha();
    EaTuple out = t;
    for (std::size_t j = 0; j < t.dim(); ++j) {
        out.ea1[j] = a * p.values[j] + (1.0 - a) * t.ea1[j];
        out.ea2[j] = a * p.values[j] * p.values[j] + (1.0 - a) * t.ea2[j];
    }
    out.w = t.w + 1.0;
    out.last_update_seq = p.seq;
    return out;
}

EaTuple degrade_tuple(const EaTuple& t, const Params& params) {
    const double keep = 1.0 - params.alpha();
    EaTuple out = t;
    for (std::size_t j = 0; j < t.dim(); ++j) {
        out.ea1[j] *= keep;
        out.ea2[j] *= keep;
    }
    if (params.decay_weight) out.w *= keep;
    return out;
}

Moments moments(const EaTuple& t) { return Moments{t.ea1, t.ea2, t.w}; }

Moments preview_absorb(const EaTuple& t, const Point& p, const Params& params) {
    detail::require_dim(p.dim(), t.dim(), "preview_absorb");
    const double a = params.alpha();
    Moments m;
    m.mean.resize(t.dim());
    m.mean_sq.resize(t.dim());
    for (std::size_t j = 0; j < t.dim(); ++j) {
        m.mean[j] = a * p.values[j] + (1.0 - a) * t.ea1[j];
        m.mean_sq[j] = a * p.values[j] * p.values[j] + (1.0 - a) * t.ea2[j];
    }
    m.w = t.w + 1.0;
    return m;
}

// -- CF tuple ----------------------------------------------------------------

CfTuple CfTuple::seeded(const Point& p, std::uint64_t id) {
    require_finite(p);
    CfTuple t;
    t.cf1 = p.values;
    t.cf2.resize(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) t.cf2[j] = p.values[j] * p.values[j];
    t.w = 1.0;
    t.window.push_back({p.values, 0});
    t.created_seq = p.seq;
    t.last_update_seq = p.seq;
    t.id = id;
    return t;
}

namespace {

void cf_step(CfTuple& t, double g) {
    for (std::size_t j = 0; j < t.dim(); ++j) {
        t.cf1[j] *= g;
        t.cf2[j] *= g;
    }
    t.w *= g;
    ++t.tick;
}

}  // namespace

CfTuple cf_update(const CfTuple& t, const Point& p, const Params& params) {
    detail::require_dim(p.dim(), t.dim(), "cf_update");
    require_finite(p);
    CfTuple out = t;
    const double g = params.cf_decay();
    cf_step(out, g);
    if (out.window.size() >= params.n_window) {
        const auto& oldest = out.window.front();
        const double wt = std::exp2(-params.lambda *
                                    static_cast<double>(out.tick - oldest.tick) /
                                    static_cast<double>(params.n_window));
        for (std::size_t j = 0; j < out.dim(); ++j) {
            out.cf1[j] -= wt * oldest.values[j];
            out.cf2[j] -= wt * oldest.values[j] * oldest.values[j];
        }
        out.w -= wt;
        out.window.pop_front();
    }
    for (std::size_t j = 0; j < out.dim(); ++j) {
        out.cf1[j] += p.values[j];
        out.cf2[j] += p.values[j] * p.values[j];
    }
    out.w += 1.0;
    out.window.push_back({p.values, out.tick});
    out.last_update_seq = p.seq;
    return out;
}

CfTuple cf_degrade(const CfTuple& t, const Params& params) {
    CfTuple out = t;
    cf_step(out, params.cf_decay());
    return out;
}

Moments cf_recompute(const CfTuple& t, const Params& params) {
    Moments m;
    m.mean.assign(t.dim(), 0.0);
    m.mean_sq.assign(t.dim(), 0.0);
    m.w = 0.0;
    for (const auto& e : t.window) {
        const double wt = std::exp2(-params.lambda * static_cast<double>(t.tick - e.tick) /
                                    static_cast<double>(params.n_window));
        for (std::size_t j = 0; j < t.dim(); ++j) {
            m.mean[j] += wt * e.values[j];
            m.mean_sq[j] += wt * e.values[j] * e.values[j];
        }
        m.w += wt;
    }
    return m;  // fading-weighted sums, same layout as cf1/cf2/w
}

namespace {

// Incremental cf1/cf2 drift is bounded by the 1e-9 relative consistency
// contract, so the cancellation slack scales with the stored magnitude.
double cf_slack(const Vec& mean_sq) {
    double scale = 1.0;
    for (double v : mean_sq) scale = std::max(scale, std::abs(v));
    return std::max(kTauVar, 1e-9 * scale);
}

}  // namespace

Moments moments(const CfTuple& t) {
    Moments m;
    m.mean.resize(t.dim());
    m.mean_sq.resize(t.dim());
    const double w = t.w > 0.0 ? t.w : 1.0;
    for (std::size_t j = 0; j < t.dim(); ++j) {
        m.mean[j] = t.cf1[j] / w;
        m.mean_sq[j] = t.cf2[j] / w;
    }
    m.w = t.w;
    m.slack = cf_slack(m.mean_sq);
    return m;
}

Moments preview_absorb(const CfTuple& t, const Point& p, const Params& params) {
    detail::require_dim(p.dim(), t.dim(), "preview_absorb");
    const double g = params.cf_decay();
    Vec cf1(t.dim()), cf2(t.dim());
    double w = t.w * g;
    double evict_wt = 0.0;
    const CfTuple::Entry* oldest = nullptr;
    if (t.window.size() >= params.n_window) {
        oldest = &t.window.front();
        evict_wt = std::exp2(-params.lambda * static_cast<double>(t.tick + 1 - oldest->tick) /
                             static_cast<double>(params.n_window));
        w -= evict_wt;
    }
    for (std::size_t j = 0; j < t.dim(); ++j) {
        cf1[j] = t.cf1[j] * g + p.values[j];
        cf2[j] = t.cf2[j] * g + p.values[j] * p.values[j];
        if (oldest) {
            cf1[j] -= evict_wt * oldest->values[j];
            cf2[j] -= evict_wt * oldest->values[j] * oldest->values[j];
        }
    }
    w += 1.0;
    Moments m;
    m.mean.resize(t.dim());
    m.mean_sq.resize(t.dim());
    for (std::size_t j = 0; j < t.dim(); ++j) {
        m.mean[j] = cf1[j] / w;
        m.mean_sq[j] = cf2[j] / w;
    }
    m.w = w;
    m.slack = cf_slack(m.mean_sq);
    return m;
}

// -- Shared math ---------------------------------------------------------------

Vec variance(const Moments& m, double slack) {
    Vec out(m.mean.size());
    for (std::size_t j = 0; j < m.mean.size(); ++j) {
        double v = m.mean_sq[j] - m.mean[j] * m.mean[j];
        if (v < -slack)
            throw std::logic_error("variance: mean_sq[" + std::to_string(j) +
                                   "] fell below mean^2 beyond numeric slack");
        out[j] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

Vec variance(const Moments& m) { return variance(m, m.slack); }

Vec variance(const EaTuple& t) { return variance(moments(t), kTauVar); }

Vec variance(const CfTuple& t) { return variance(moments(t)); }

PreferenceVector preference_vector(const Vec& variances, const Params& params) {
    PreferenceVector pv;
    pv.psi.resize(variances.size());
    for (std::size_t j = 0; j < variances.size(); ++j)
        pv.psi[j] = variances[j] < params.xi ? params.rho : 1.0;
    return pv;
}

PreferenceVector preference_vector(const EaTuple& t, const Params& params) {
    return preference_vector(variance(t), params);
}
PreferenceVector preference_vector(const CfTuple& t, const Params& params) {
    return preference_vector(variance(t), params);
}

std::size_t pdim(const Vec& variances, const Params& params) {
    std::size_t n = 0;
    for (double v : variances)
        if (v < params.xi) ++n;
    return n;
}

std::size_t pdim(const EaTuple& t, const Params& params) { return pdim(variance(t), params); }
std::size_t pdim(const CfTuple& t, const Params& params) { return pdim(variance(t), params); }

namespace {

double radius_from_variances(const Vec& variances, const Params& params) {
    double sum = 0.0;
    for (std::size_t j = 0; j < variances.size(); ++j) {
        const double psi = variances[j] < params.xi ? params.rho : 1.0;
        sum += (psi / params.rho) * variances[j];
    }
    return std::sqrt(sum);
}

double distance_to_center(const Point& p, const Vec& center, const Vec& variances,
                          const Params& params) {
    detail::require_dim(p.dim(), center.size(), "projected_distance");
    const double eta =
        params.distance_normalizer == DistanceNormalizer::Rho ? params.rho : params.xi;
    double sum = 0.0;
    for (std::size_t j = 0; j < center.size(); ++j) {
        const double psi = variances[j] < params.xi ? params.rho : 1.0;
        const double diff = p.values[j] - center[j];
        sum += (psi / eta) * diff * diff;
    }
    return std::sqrt(sum);
}

McKind classify(const Vec& variances, double w, const Params& params) {
    const double r = radius_from_variances(variances, params);
    const std::size_t pd = pdim(variances, params);
    const bool burst = w / static_cast<double>(params.n_window) > params.burst_fraction;
    if (r < params.eps && w > params.mu && (pd <= params.pi_dim || burst)) return McKind::Core;
    if (pd > params.pi_dim && r < params.eps && w < params.mu) return McKind::Outlier;
    return McKind::Neither;
}

}  // namespace

double projected_radius(const Moments& m, const Params& params) {
    return radius_from_variances(variance(m), params);
}
double projected_radius(const EaTuple& t, const Params& params) {
    return radius_from_variances(variance(t), params);
}
double projected_radius(const CfTuple& t, const Params& params) {
    return radius_from_variances(variance(t), params);
}

double projected_distance(const Point& p, const Moments& m, const Params& params) {
    return distance_to_center(p, m.mean, variance(m), params);
}
double projected_distance(const Point& p, const EaTuple& t, const Params& params) {
    return distance_to_center(p, t.ea1, variance(t), params);
}
double projected_distance(const Point& p, const CfTuple& t, const Params& params) {
    const Moments m = moments(t);
    return distance_to_center(p, m.mean, variance(t), params);
}

McKind classify_mc(const Moments& m, const Params& params) {
    return classify(variance(m), m.w, params);
}
McKind classify_mc(const EaTuple& t, const Params& params) {
    return classify(variance(t), t.w, params);
}
McKind classify_mc(const CfTuple& t, const Params& params) {
    return classify(variance(t), t.w, params);
}

}  // namespace projstream
