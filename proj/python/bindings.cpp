#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "projstream/engine.hpp"
#include "projstream/evaluation.hpp"
#include "projstream/initialization.hpp"
#include "projstream/offline.hpp"
#include "projstream/pipeline.hpp"

namespace py = pybind11;
using namespace projstream;

namespace {

Point make_point(const Vec& values, const std::string& label, std::uint64_t seq) {
    return Point{values, label, seq};
}

template <class Tuple>
void bind_engine(py::module_& m, const char* name) {
    using Engine = StreamEngine<Tuple>;
    py::class_<Engine>(m, name)
        .def(py::init<Params, std::size_t>(), py::arg("params"), py::arg("dim"))
        .def("seed_cores", &Engine::seed_cores)
        .def("process_point", &Engine::process_point)
        .def("window_rebalance", &Engine::window_rebalance)
        .def_property_readonly("cores",
                               [](const Engine& e) { return e.state().cores; })
        .def_property_readonly("outliers",
                               [](const Engine& e) { return e.state().outliers; })
        .def_property_readonly("window_index",
                               [](const Engine& e) { return e.state().window_index; })
        .def_property_readonly("points_seen",
                               [](const Engine& e) { return e.state().points_seen; })
        .def_property_readonly("dim", &Engine::dim);
}

}  // namespace

PYBIND11_MODULE(_projstream, m) {
    m.doc() = "Projected micro-cluster stream clustering engine";

    py::class_<Params>(m, "Params")
        .def(py::init<>())
        .def_readwrite("n_window", &Params::n_window)
        .def_readwrite("xi", &Params::xi)
        .def_readwrite("rho", &Params::rho)
        .def_readwrite("eps", &Params::eps)
        .def_readwrite("mu", &Params::mu)
        .def_readwrite("pi_dim", &Params::pi_dim)
        .def_readwrite("beta", &Params::beta)
        .def_readwrite("horizon", &Params::horizon)
        .def_readwrite("initial_points", &Params::initial_points)
        .def_readwrite("lambda_", &Params::lambda)
        .def_readwrite("burst_fraction", &Params::burst_fraction)
        .def_readwrite("decay_weight", &Params::decay_weight)
        .def_property("alpha_override",
                      [](const Params& p) { return p.alpha_override; },
                      [](Params& p, std::optional<double> v) { p.alpha_override = v; })
        .def_property_readonly("alpha", &Params::alpha)
        .def("validate", &Params::validate, py::arg("dim") = 0);

    py::class_<Point>(m, "Point")
        .def(py::init(&make_point), py::arg("values"), py::arg("label") = "",
             py::arg("seq") = 0)
        .def_readwrite("values", &Point::values)
        .def_readwrite("label", &Point::label)
        .def_readwrite("seq", &Point::seq);

    py::class_<PreferenceVector>(m, "PreferenceVector")
        .def_readonly("psi", &PreferenceVector::psi)
        .def("preferred_count", &PreferenceVector::preferred_count);

    py::enum_<McKind>(m, "McKind")
        .value("Core", McKind::Core)
        .value("Outlier", McKind::Outlier)
        .value("Neither", McKind::Neither);

    py::class_<EaTuple>(m, "EaTuple")
        .def_static("zero", &EaTuple::zero, py::arg("dim"), py::arg("id") = 0)
        .def_static("seeded", &EaTuple::seeded, py::arg("point"), py::arg("id") = 0)
        .def_readonly("ea1", &EaTuple::ea1)
        .def_readonly("ea2", &EaTuple::ea2)
        .def_readonly("w", &EaTuple::w)
        .def_readonly("id", &EaTuple::id)
        .def_readonly("created_seq", &EaTuple::created_seq)
        .def_readonly("last_update_seq", &EaTuple::last_update_seq);

    py::class_<CfTuple>(m, "CfTuple")
        .def_static("seeded", &CfTuple::seeded, py::arg("point"), py::arg("id") = 0)
        .def_readonly("cf1", &CfTuple::cf1)
        .def_readonly("cf2", &CfTuple::cf2)
        .def_readonly("w", &CfTuple::w)
        .def_readonly("id", &CfTuple::id)
        .def_property_readonly("window_size",
                               [](const CfTuple& t) { return t.window.size(); });

    m.def("update_tuple", &update_tuple);
    m.def("degrade_tuple", &degrade_tuple);
    m.def("cf_update", &cf_update);
    m.def("cf_degrade", &cf_degrade);
    m.def("variance", py::overload_cast<const EaTuple&>(&variance));
    m.def("variance", py::overload_cast<const CfTuple&>(&variance));
    m.def("preference_vector",
          py::overload_cast<const EaTuple&, const Params&>(&preference_vector));
    m.def("preference_vector",
          py::overload_cast<const CfTuple&, const Params&>(&preference_vector));
    m.def("pdim", py::overload_cast<const EaTuple&, const Params&>(&pdim));
    m.def("pdim", py::overload_cast<const CfTuple&, const Params&>(&pdim));
    m.def("projected_radius",
          py::overload_cast<const EaTuple&, const Params&>(&projected_radius));
    m.def("projected_radius",
          py::overload_cast<const CfTuple&, const Params&>(&projected_radius));
    m.def("projected_distance",
          py::overload_cast<const Point&, const EaTuple&, const Params&>(&projected_distance));
    m.def("projected_distance",
          py::overload_cast<const Point&, const CfTuple&, const Params&>(&projected_distance));
    m.def("classify_mc", py::overload_cast<const EaTuple&, const Params&>(&classify_mc));
    m.def("classify_mc", py::overload_cast<const CfTuple&, const Params&>(&classify_mc));

    m.def("point_projected_distance", &point_projected_distance);
    m.def("point_preference_vector", &point_preference_vector);
    m.def("is_core_point", &is_core_point);
    m.def("initial_memberships", &initial_memberships);
    m.def("build_initial_clusters", &build_initial_clusters);
    m.def("build_initial_cf_clusters", &build_initial_cf_clusters);

    py::enum_<MergeTarget>(m, "MergeTarget")
        .value("Core", MergeTarget::Core)
        .value("Outlier", MergeTarget::Outlier)
        .value("NewOutlier", MergeTarget::NewOutlier);

    py::class_<MergeOutcome>(m, "MergeOutcome")
        .def_readonly("target", &MergeOutcome::target)
        .def_readonly("tuple_id", &MergeOutcome::tuple_id)
        .def_readonly("distance", &MergeOutcome::distance);

    bind_engine<EaTuple>(m, "EaEngine");
    bind_engine<CfTuple>(m, "CfEngine");

    py::class_<FinalClustering>(m, "FinalClustering")
        .def_readonly("clusters", &FinalClustering::clusters)
        .def_readonly("query_seq", &FinalClustering::query_seq);

    m.def("final_clusters",
          py::overload_cast<const std::vector<EaTuple>&, const Params&, std::uint64_t>(
              &final_clusters),
          py::arg("cores"), py::arg("params"), py::arg("query_seq") = 0);
    m.def("final_clusters",
          py::overload_cast<const std::vector<CfTuple>&, const Params&, std::uint64_t>(
              &final_clusters),
          py::arg("cores"), py::arg("params"), py::arg("query_seq") = 0);

    m.def("purity", &purity);
    m.def("weight_profiles", [](const Params& p) {
        const WeightProfiles wp = weight_profiles(p);
        return py::make_tuple(wp.ea, wp.cf);
    });

    py::enum_<EngineKind>(m, "EngineKind")
        .value("Ea", EngineKind::Ea)
        .value("Cf", EngineKind::Cf)
        .value("Both", EngineKind::Both);
    py::enum_<NormalizationMode>(m, "NormalizationMode")
        .value("MinMaxInitial", NormalizationMode::MinMaxInitial)
        .value("NoNormalization", NormalizationMode::None);
    py::enum_<TimingMode>(m, "TimingMode")
        .value("Wall", TimingMode::Wall)
        .value("NoTiming", TimingMode::None);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("input_path", &RunConfig::input_path)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("engine", &RunConfig::engine)
        .def_readwrite("params", &RunConfig::params)
        .def_readwrite("normalization", &RunConfig::normalization)
        .def_readwrite("timing", &RunConfig::timing)
        .def_property("max_records",
                      [](const RunConfig& c) { return c.max_records; },
                      [](RunConfig& c, std::optional<std::uint64_t> v) { c.max_records = v; });

    py::class_<MetricsRow>(m, "MetricsRow")
        .def_readonly("window_index", &MetricsRow::window_index)
        .def_readonly("engine", &MetricsRow::engine)
        .def_readonly("purity_core_only", &MetricsRow::purity_core_only)
        .def_readonly("purity_all", &MetricsRow::purity_all)
        .def_readonly("num_core", &MetricsRow::num_core)
        .def_readonly("num_outlier", &MetricsRow::num_outlier)
        .def_readonly("num_final_clusters", &MetricsRow::num_final_clusters)
        .def_readonly("window_wall_time_s", &MetricsRow::window_wall_time_s);

    py::class_<TupleDump>(m, "TupleDump")
        .def_readonly("id", &TupleDump::id)
        .def_readonly("w", &TupleDump::w)
        .def_readonly("center", &TupleDump::center)
        .def_readonly("variances", &TupleDump::variances)
        .def_readonly("pdim", &TupleDump::pdim);

    py::class_<EngineDump>(m, "EngineDump")
        .def_readonly("engine", &EngineDump::engine)
        .def_readonly("query_seq", &EngineDump::query_seq)
        .def_readonly("cores", &EngineDump::cores)
        .def_readonly("outliers", &EngineDump::outliers)
        .def_readonly("final_clusters", &EngineDump::final_clusters)
        .def_readonly("rows", &EngineDump::rows);

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("lines_read", &RunSummary::lines_read)
        .def_readonly("accepted", &RunSummary::accepted)
        .def_readonly("rejected", &RunSummary::rejected)
        .def_readonly("dimensions", &RunSummary::dimensions)
        .def_readonly("engines", &RunSummary::engines);

    m.def("run_pipeline", &run_pipeline,
          py::call_guard<py::gil_scoped_release>());

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<IoError>(m, "IoError");
}
