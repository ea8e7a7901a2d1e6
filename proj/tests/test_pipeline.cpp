#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "projstream/pipeline.hpp"
#include "support/kdd_fixture.hpp"

using namespace projstream;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Tiny stream: 20 prefix records at one location, then three 10-point
/// windows alternating between two locations, labels attached.
void write_tiny_input(const fs::path& path, bool with_bad_lines = false) {
    std::ofstream out(path);
    auto emit = [&](double base, const std::string& label) {
        Vec v(35, base);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += 0.01 * static_cast<double>(j % 3);
        out << fixture::kdd_line(v, label) << "\n";
    };
    for (int i = 0; i < 20; ++i) emit(i % 2 == 0 ? 0.2 : 0.8, "normal.");
    for (int w = 0; w < 3; ++w) {
        if (with_bad_lines) out << "garbage,line\n";
        for (int i = 0; i < 10; ++i)
            emit(w % 2 == 0 ? 0.2 : 0.8, w == 1 ? "smurf." : "normal.");
    }
}

RunConfig tiny_config(const fs::path& input, const fs::path& output) {
    RunConfig config;
    config.input_path = input.string();
    config.output_dir = output.string();
    config.params.initial_points = 20;
    config.params.n_window = 10;
    config.params.mu = 3.0;
    config.timing = TimingMode::None;
    return config;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PROJSTREAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("a three-window run emits exactly three schema-valid rows per engine") {
    const fs::path dir = "pipeline_work/pipe_rows";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    RunConfig config = tiny_config(dir / "in.csv", dir / "out");
    config.engine = EngineKind::Both;

    const RunSummary summary = run_pipeline(config);
    CHECK(summary.accepted == 50);
    CHECK(summary.rejected == 0);
    CHECK(summary.dimensions == 35);
    REQUIRE(summary.engines.size() == 2);
    CHECK(summary.engines[0].rows.size() == 3);
    CHECK(summary.engines[1].rows.size() == 3);

    const std::string csv = slurp(dir / "out" / "metrics.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "window_index,engine,purity_core_only,purity_all,num_core,num_outlier,"
          "num_final_clusters,window_wall_time_s");
    std::size_t rows = 0;
    std::string line;
    std::uint64_t last_ea = 0, last_cf = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto first_comma = line.find(',');
        const std::uint64_t idx = std::stoull(line.substr(0, first_comma));
        if (line.find(",ea,") != std::string::npos) {
            CHECK(idx > last_ea);
            last_ea = idx;
        } else {
            REQUIRE(line.find(",cf,") != std::string::npos);
            CHECK(idx > last_cf);
            last_cf = idx;
        }
    }
    CHECK(rows == 6);

    // purity rows carry the labels: the smurf window is pure for both engines
    for (const auto& engine : summary.engines) {
        REQUIRE(engine.rows.size() == 3);
        CHECK(engine.rows[1].purity_all.has_value());
        for (const auto& row : engine.rows) {
            if (row.purity_all) {
                CHECK(*row.purity_all >= 0.0);
                CHECK(*row.purity_all <= 1.0);
            }
        }
    }
}

TEST_CASE("identical runs produce byte-identical metrics files") {
    const fs::path dir = "pipeline_work/pipe_deterministic";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    RunConfig a = tiny_config(dir / "in.csv", dir / "out_a");
    RunConfig b = tiny_config(dir / "in.csv", dir / "out_b");
    a.engine = b.engine = EngineKind::Both;
    run_pipeline(a);
    run_pipeline(b);
    CHECK(slurp(dir / "out_a" / "metrics.csv") == slurp(dir / "out_b" / "metrics.csv"));
    CHECK(slurp(dir / "out_a" / "metrics.jsonl") == slurp(dir / "out_b" / "metrics.jsonl"));
    CHECK(slurp(dir / "out_a" / "clusters.json") == slurp(dir / "out_b" / "clusters.json"));
}

TEST_CASE("rejected lines are counted, never silently dropped") {
    const fs::path dir = "pipeline_work/pipe_rejects";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv", /*with_bad_lines=*/true);
    const RunConfig config = tiny_config(dir / "in.csv", dir / "out");
    const RunSummary summary = run_pipeline(config);
    CHECK(summary.accepted == 50);
    CHECK(summary.rejected == 3);
    CHECK(summary.accepted + summary.rejected == summary.lines_read);
}

TEST_CASE("normalization=none streams raw feature values") {
    const fs::path dir = "pipeline_work/pipe_raw";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    RunConfig config = tiny_config(dir / "in.csv", dir / "out");
    config.normalization = NormalizationMode::None;
    const RunSummary summary = run_pipeline(config);
    CHECK(summary.accepted == 50);
    CHECK(summary.engines[0].rows.size() == 3);
}

TEST_CASE("normalized tuple centers stay inside the unit cube") {
    const fs::path dir = "pipeline_work/pipe_norm";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    const RunConfig config = tiny_config(dir / "in.csv", dir / "out");
    const RunSummary summary = run_pipeline(config);
    REQUIRE(!summary.engines.empty());
    auto check_dump = [](const std::vector<TupleDump>& tuples) {
        for (const auto& t : tuples)
            for (double c : t.center) {
                CHECK(c >= -1e-12);
                CHECK(c <= 1.0 + 1e-12);
            }
    };
    check_dump(summary.engines[0].cores);
    check_dump(summary.engines[0].outliers);
}

TEST_CASE("clusters.json lists every engine section with its final clusters") {
    const fs::path dir = "pipeline_work/pipe_clusters";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    RunConfig config = tiny_config(dir / "in.csv", dir / "out");
    config.engine = EngineKind::Both;
    run_pipeline(config);
    const auto doc = nlohmann::json::parse(slurp(dir / "out" / "clusters.json"));
    REQUIRE(doc.contains("engines"));
    for (const char* name : {"ea", "cf"}) {
        REQUIRE(doc["engines"].contains(name));
        const auto& section = doc["engines"][name];
        CHECK(section.contains("query_seq"));
        CHECK(section["num_clusters"].get<std::size_t>() == section["clusters"].size());
    }
}

TEST_CASE("missing inputs and empty streams raise io errors") {
    RunConfig config;
    config.input_path = "does_not_exist.csv";
    config.output_dir = "pipeline_work/pipe_err_out";
    CHECK_THROWS_AS(run_pipeline(config), IoError);

    const fs::path dir = "pipeline_work/pipe_empty";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "empty.csv") << "not,a,record\n";
    config.input_path = (dir / "empty.csv").string();
    config.output_dir = (dir / "out").string();
    CHECK_THROWS_AS(run_pipeline(config), IoError);
}

TEST_CASE("cli: run, compare and inspect succeed and exit codes are distinct") {
    const fs::path dir = "pipeline_work/pipe_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_tiny_input(dir / "in.csv");
    const std::string base = " --input " + (dir / "in.csv").string() +
                             " --set initialPoints=20 --set N=10 --set mu=3 "
                             "--set timing=none --output ";

    CHECK(run_cli("run" + base + (dir / "out_run").string()) == 0);
    CHECK(fs::exists(dir / "out_run" / "metrics.csv"));

    CHECK(run_cli("compare" + base + (dir / "out_cmp").string()) == 0);
    const std::string csv = slurp(dir / "out_cmp" / "metrics.csv");
    CHECK(csv.find(",ea,") != std::string::npos);
    CHECK(csv.find(",cf,") != std::string::npos);

    // inspect prints the tuple sets as json on stdout
    const std::string cmd = std::string(PROJSTREAM_CLI_PATH) + " inspect" + base +
                            (dir / "out_ins").string() + " > " +
                            (dir / "inspect.json").string() + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "inspect.json"));
    REQUIRE(doc.contains("ea"));
    CHECK(doc["ea"].contains("cores"));
    CHECK(doc["ea"].contains("outliers"));

    // config validation failures and io failures use distinct codes
    CHECK(run_cli("run --input " + (dir / "in.csv").string() + " --set N=abc") == 2);
    CHECK(run_cli("run --input missing_file.csv --output " + (dir / "x").string()) == 3);
}

TEST_SUITE_END();
