#include <doctest.h>

#include <random>
#include <set>

#include "projstream/engine.hpp"
#include "support/generators.hpp"

using namespace projstream;

namespace {

Params engine_params() {
    Params p;
    p.n_window = 200;
    p.eps = 0.3;
    p.mu = 10.0;
    p.beta = 0.2;
    p.xi = 0.002;
    p.pi_dim = 2;
    return p;
}

Point pt(Vec v, std::uint64_t seq = 0, std::string label = "") {
    return Point{std::move(v), std::move(label), seq};
}

/// Engine preloaded with one core tuple built from `n` copies of `center`.
EaEngine engine_with_core(const Params& params, const Vec& center, int n) {
    EaEngine engine(params, center.size());
    EaTuple t = EaTuple::seeded(pt(center, 1));
    for (int i = 1; i < n; ++i) t = update_tuple(t, pt(center, i + 1), params);
    engine.seed_cores({t});
    return engine;
}

std::set<std::uint64_t> ids_of(const std::vector<EaTuple>& list) {
    std::set<std::uint64_t> out;
    for (const auto& t : list) out.insert(t.id);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("add_to_core on an empty core list is a rejection without side effects") {
    const Params params = engine_params();
    EaEngine engine(params, 2);
    MergeOutcome outcome;
    CHECK_FALSE(engine.add_to_core(pt({0.5, 0.5}, 1), outcome));
    CHECK(engine.state().cores.empty());
    CHECK(engine.state().outliers.empty());
}

TEST_CASE("a point at the core center is absorbed") {
    const Params params = engine_params();
    EaEngine engine = engine_with_core(params, {0.4, 0.6}, 20);
    MergeOutcome outcome;
    CHECK(engine.add_to_core(pt({0.4, 0.6}, 21), outcome));
    CHECK(outcome.target == MergeTarget::Core);
    CHECK(outcome.distance == 0.0);
    CHECK(engine.state().cores[0].w == 21.0);
}

TEST_CASE("the closer of two cores with equal preferences wins") {
    Params params = engine_params();
    params.xi = 0.05;  // both tuples keep every dimension preferred
    EaEngine engine(params, 2);
    EaTuple a = EaTuple::seeded(pt({0.2, 0.2}, 1));
    for (int i = 0; i < 15; ++i) a = update_tuple(a, pt({0.2, 0.2}, i + 2), params);
    EaTuple b = EaTuple::seeded(pt({0.8, 0.8}, 1));
    for (int i = 0; i < 15; ++i) b = update_tuple(b, pt({0.8, 0.8}, i + 2), params);
    engine.seed_cores({a, b});
    const std::uint64_t id_a = engine.state().cores[0].id;

    MergeOutcome outcome;
    REQUIRE(engine.add_to_core(pt({0.25, 0.25}, 40), outcome));
    CHECK(outcome.tuple_id == id_a);
    // the loser degraded exactly once
    CHECK(engine.state().cores[1].ea1[0] ==
          doctest::Approx(0.8 * (1.0 - params.alpha())).epsilon(1e-12));
}

TEST_CASE("core rejection degrades every core once") {
    Params params = engine_params();
    params.eps = 0.05;
    params.xi = 0.05;
    EaEngine engine = engine_with_core(params, {0.2, 0.2}, 20);
    MergeOutcome outcome;
    // distant point: radius after tentative insert exceeds eps
    CHECK_FALSE(engine.add_to_core(pt({0.9, 0.9}, 21), outcome));
    CHECK(engine.state().cores[0].ea1[0] ==
          doctest::Approx(0.2 * (1.0 - params.alpha())).epsilon(1e-12));
    CHECK(engine.state().cores[0].w == doctest::Approx(20.0 * (1.0 - params.alpha())));
}

TEST_CASE("pdim-ineligible cores are skipped") {
    Params params = engine_params();
    params.pi_dim = 1;
    params.xi = 0.5;  // fresh tight tuples prefer both dims -> pdim 2 > pi
    EaEngine engine = engine_with_core(params, {0.5, 0.5}, 20);
    MergeOutcome outcome;
    CHECK_FALSE(engine.add_to_core(pt({0.5, 0.5}, 21), outcome));
}

TEST_CASE("the burst clause overrides the pdim gate") {
    Params params = engine_params();
    params.pi_dim = 1;
    params.xi = 0.5;
    params.n_window = 20;  // tuple weight 20 gives w/N = 1 > 0.9
    EaEngine engine = engine_with_core(params, {0.5, 0.5}, 20);
    MergeOutcome outcome;
    CHECK(engine.add_to_core(pt({0.5, 0.5}, 21), outcome));
}

TEST_CASE("add_to_outlier accepts a repeat of the seed and doubles its weight") {
    const Params params = engine_params();
    EaEngine engine(params, 2);
    MergeOutcome outcome;
    engine.create_outlier_mc(pt({0.3, 0.3}, 1), outcome);
    CHECK(engine.state().outliers[0].w == 1.0);
    CHECK(engine.add_to_outlier(pt({0.3, 0.3}, 2), outcome));
    CHECK(outcome.target == MergeTarget::Outlier);
    CHECK(engine.state().outliers[0].w == 2.0);
}

TEST_CASE("add_to_outlier on an empty list rejects") {
    const Params params = engine_params();
    EaEngine engine(params, 2);
    MergeOutcome outcome;
    CHECK_FALSE(engine.add_to_outlier(pt({0.3, 0.3}, 1), outcome));
}

TEST_CASE("a distant point is rejected and degrades the outlier once") {
    Params params = engine_params();
    params.eps = 0.4;
    params.xi = 0.5;  // seed tuple prefers both dims, distance counts fully
    EaEngine engine(params, 2);
    MergeOutcome outcome;
    engine.create_outlier_mc(pt({0.0, 0.0}, 1), outcome);
    // post-insert radius for a 2-point tuple is sqrt(alpha(1-alpha))*|p - seed|;
    // with alpha=0.5 and |p| = 1 that is 0.5 >= eps
    params.alpha_override = 0.5;
    EaEngine strict(params, 2);
    strict.create_outlier_mc(pt({0.0, 0.0}, 1), outcome);
    CHECK_FALSE(strict.add_to_outlier(pt({1.0, 0.0}, 2), outcome));
    CHECK(strict.state().outliers[0].w == doctest::Approx(0.5));  // one degrade
}

TEST_CASE("create_outlier_mc seeds a singleton with zero radius") {
    const Params params = engine_params();
    EaEngine engine(params, 2);
    MergeOutcome outcome;
    engine.create_outlier_mc(pt({0.6, 0.1}, 1), outcome);
    REQUIRE(engine.state().outliers.size() == 1);
    const auto& t = engine.state().outliers[0];
    CHECK(t.w == 1.0);
    CHECK(t.ea1 == Vec{0.6, 0.1});
    CHECK(projected_radius(t, params) == 0.0);
    CHECK(outcome.target == MergeTarget::NewOutlier);
}

TEST_CASE("mutually distant points each open their own outlier tuple") {
    Params params = engine_params();
    params.eps = 0.05;
    params.alpha_override = 0.5;
    params.xi = 0.5;
    EaEngine engine(params, 2);
    const Vec spots[] = {{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.9}, {0.5, 0.5}};
    std::uint64_t seq = 1;
    for (const auto& s : spots) {
        const MergeOutcome outcome = engine.process_point(pt(s, seq++));
        CHECK(outcome.target == MergeTarget::NewOutlier);
    }
    CHECK(engine.state().outliers.size() == 5);
}

TEST_CASE("a core absorption degrades every outlier once") {
    Params params = engine_params();
    params.xi = 0.05;
    EaEngine engine = engine_with_core(params, {0.2, 0.2}, 20);
    MergeOutcome outcome;
    engine.create_outlier_mc(pt({0.9, 0.9}, 100), outcome);
    const double before = engine.state().outliers[0].ea1[0];
    const MergeOutcome merged = engine.process_point(pt({0.2, 0.2}, 101));
    CHECK(merged.target == MergeTarget::Core);
    CHECK(engine.state().outliers[0].ea1[0] ==
          doctest::Approx(before * (1.0 - params.alpha())).epsilon(1e-12));
}

TEST_CASE("process_point on an empty state creates an outlier") {
    const Params params = engine_params();
    EaEngine engine(params, 2);
    const MergeOutcome outcome = engine.process_point(pt({0.5, 0.5}, 1));
    CHECK(outcome.target == MergeTarget::NewOutlier);
    CHECK(engine.state().points_seen == 1);
}

TEST_CASE("per point exactly one tuple gains weight") {
    std::mt19937 rng(2026);
    Params params = engine_params();
    params.eps = 0.1;
    params.xi = 0.05;
    EaEngine engine(params, 2);
    std::uint64_t seq = 1;
    for (int i = 0; i < 300; ++i) {
        const Vec center = i % 2 == 0 ? Vec{0.25, 0.25} : Vec{0.75, 0.75};
        double w_before = 0.0;
        for (const auto& t : engine.state().cores) w_before += t.w;
        for (const auto& t : engine.state().outliers) w_before += t.w;

        const Point p = generators::jittered_point(rng, center, 0.02, seq++);
        const MergeOutcome outcome = engine.process_point(p);

        // find the absorbing tuple and verify it carries the point's seq
        bool found = false;
        for (const auto& t : engine.state().cores)
            if (t.id == outcome.tuple_id) {
                found = true;
                CHECK(t.last_update_seq == p.seq);
            }
        for (const auto& t : engine.state().outliers)
            if (t.id == outcome.tuple_id) {
                found = true;
                CHECK(t.last_update_seq == p.seq);
            }
        CHECK(found);
        CHECK(outcome.distance >= 0.0);
    }
}

TEST_CASE("200 identical points promote their outlier at the window boundary") {
    Params params = engine_params();  // N=200, beta*mu = 2
    EaEngine engine(params, 2);
    for (int i = 0; i < 200; ++i) {
        const MergeOutcome outcome = engine.process_point(pt({0.5, 0.5}, i + 1, "x"));
        if (i == 0)
            CHECK(outcome.target == MergeTarget::NewOutlier);
        else
            CHECK(outcome.target == MergeTarget::Outlier);
    }
    REQUIRE(engine.state().outliers.size() == 1);
    CHECK(engine.state().outliers[0].w == 200.0);

    engine.window_rebalance();
    CHECK(engine.state().window_index == 1);
    REQUIRE(engine.state().cores.size() == 1);
    CHECK(engine.state().outliers.empty());
}

TEST_CASE("rebalance demotes cores fallen below beta*mu") {
    Params params = engine_params();
    params.alpha_override = 0.5;
    params.xi = 0.5;  // the tuple keeps its dims preferred, so far points reject
    EaEngine fast(params, 2);
    EaTuple t = EaTuple::seeded(pt({0.4, 0.4}, 1));
    t.w = 3.0;
    fast.seed_cores({t});
    for (int i = 0; i < 4; ++i) {
        MergeOutcome outcome;
        CHECK_FALSE(fast.add_to_core(pt({0.95, 0.95}, i + 2), outcome));  // degrades
    }
    CHECK(fast.state().cores[0].w < params.beta * params.mu);
    fast.window_rebalance();
    CHECK(fast.state().cores.empty());
    CHECK(fast.state().outliers.size() == 1);
}

TEST_CASE("rebalance deletes outliers untouched for a full window") {
    Params params = engine_params();
    params.n_window = 10;
    params.xi = 0.5;  // keep dims preferred so the far stream stays separate
    EaEngine engine(params, 2);
    engine.process_point(pt({0.1, 0.1}, 1));  // outlier born at seq 1
    for (int i = 0; i < 10; ++i) engine.process_point(pt({0.9, 0.9}, i + 2));
    REQUIRE(engine.state().outliers.size() == 2);
    const std::uint64_t stale_id = engine.state().outliers[0].id;
    engine.window_rebalance();
    REQUIRE(engine.state().outliers.size() == 1);  // only the active one survives
    CHECK(engine.state().outliers[0].id != stale_id);
}

TEST_CASE("rebalance promotes an eligible mid-weight outlier") {
    Params params = engine_params();
    params.pi_dim = 1;
    params.xi = 0.002;
    params.n_window = 200;
    EaEngine engine(params, 2);
    // 150 near-identical points: dim 0 constant, dim 1 spread above xi
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> spread(0.3, 0.7);
    for (int i = 0; i < 150; ++i) {
        engine.process_point(pt({0.5, spread(rng)}, i + 1));
    }
    REQUIRE(engine.state().outliers.size() == 1);
    const auto& t = engine.state().outliers[0];
    CHECK(t.w == 150.0);
    CHECK(pdim(t, params) == 1);  // only the constant dimension is preferred
    CHECK(t.w / static_cast<double>(params.n_window) < params.burst_fraction);
    CHECK(classify_mc(t, params) == McKind::Core);

    engine.window_rebalance();
    CHECK(engine.state().cores.size() == 1);
    CHECK(engine.state().outliers.empty());
}

TEST_CASE("cores and outliers never share a tuple id") {
    std::mt19937 rng(8);
    Params params = engine_params();
    params.eps = 0.1;
    params.n_window = 50;
    params.xi = 0.05;
    EaEngine engine(params, 2);
    std::uint64_t seq = 1;
    for (int w = 0; w < 10; ++w) {
        for (std::size_t i = 0; i < params.n_window; ++i) {
            const Vec center = (seq / 30) % 2 == 0 ? Vec{0.3, 0.3} : Vec{0.7, 0.7};
            engine.process_point(generators::jittered_point(rng, center, 0.02, seq++));
        }
        engine.window_rebalance();
        const auto core_ids = ids_of(engine.state().cores);
        const auto outlier_ids = ids_of(engine.state().outliers);
        for (std::uint64_t id : core_ids) CHECK(outlier_ids.count(id) == 0);
    }
}

TEST_CASE("rebalance is idempotent without intervening points") {
    std::mt19937 rng(13);
    Params params = engine_params();
    params.eps = 0.1;
    params.n_window = 50;
    params.xi = 0.05;
    EaEngine engine(params, 2);
    std::uint64_t seq = 1;
    for (std::size_t i = 0; i < params.n_window; ++i)
        engine.process_point(generators::jittered_point(rng, {0.4, 0.4}, 0.02, seq++));
    engine.window_rebalance();
    const auto cores = ids_of(engine.state().cores);
    const auto outliers = ids_of(engine.state().outliers);
    engine.window_rebalance();
    CHECK(ids_of(engine.state().cores) == cores);
    CHECK(ids_of(engine.state().outliers) == outliers);
}

TEST_CASE("burst collapse: near-identical windows end in one core and no outliers") {
    Params params = engine_params();  // Table-style thresholds at d=2 scale
    params.n_window = 200;
    EaEngine engine(params, 2);
    std::uint64_t seq = 1;
    for (int w = 0; w < 2; ++w) {
        for (int i = 0; i < 200; ++i) engine.process_point(pt({0.5, 0.5}, seq++, "attack."));
        engine.window_rebalance();
    }
    CHECK(engine.state().cores.size() == 1);
    CHECK(engine.state().outliers.empty());
}

TEST_CASE("replay determinism: identical streams give identical states") {
    Params params = engine_params();
    params.eps = 0.1;
    params.n_window = 40;
    params.xi = 0.05;
    auto run = [&] {
        std::mt19937 rng(99);
        EaEngine engine(params, 3);
        std::uint64_t seq = 1;
        for (int w = 0; w < 5; ++w) {
            for (std::size_t i = 0; i < params.n_window; ++i)
                engine.process_point(
                    generators::jittered_point(rng, {0.5, 0.5, 0.5}, 0.3, seq++));
            engine.window_rebalance();
        }
        return engine;
    };
    const EaEngine a = run();
    const EaEngine b = run();
    REQUIRE(a.state().cores.size() == b.state().cores.size());
    REQUIRE(a.state().outliers.size() == b.state().outliers.size());
    for (std::size_t i = 0; i < a.state().cores.size(); ++i) {
        CHECK(a.state().cores[i].id == b.state().cores[i].id);
        CHECK(a.state().cores[i].ea1 == b.state().cores[i].ea1);  // bit identical
        CHECK(a.state().cores[i].w == b.state().cores[i].w);
    }
    for (std::size_t i = 0; i < a.state().outliers.size(); ++i) {
        CHECK(a.state().outliers[i].ea1 == b.state().outliers[i].ea1);
    }
}

TEST_CASE("the cf engine runs the same maintenance loop") {
    Params params = engine_params();
    params.n_window = 50;
    CfEngine engine(params, 2);
    std::uint64_t seq = 1;
    for (int i = 0; i < 50; ++i) engine.process_point(pt({0.5, 0.5}, seq++, "x"));
    REQUIRE(engine.state().outliers.size() == 1);
    engine.window_rebalance();
    CHECK(engine.state().cores.size() == 1);  // burst clause: w/N near 1
    CHECK(engine.state().outliers.empty());
}

TEST_SUITE_END();
