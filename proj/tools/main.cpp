#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "projstream/pipeline.hpp"

namespace {

using projstream::RunConfig;
using nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CliArgs {
    std::optional<std::string> config_path;
    std::map<std::string, std::string> overrides;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
    cmd->add_option_function<std::string>(
           "--config", [&](const std::string& v) { args.config_path = v; },
           "flat key=value configuration file");
    cmd->add_option_function<std::string>(
           "-i,--input", [&](const std::string& v) { args.overrides["input"] = v; },
           "input stream in KDD-99 CSV format");
    cmd->add_option_function<std::string>(
           "-o,--output", [&](const std::string& v) { args.overrides["output"] = v; },
           "output directory for metrics.csv / metrics.jsonl / clusters.json");
    cmd->add_option_function<std::string>(
           "--engine", [&](const std::string& v) { args.overrides["engine"] = v; },
           "ea | cf | both");
    cmd->add_option_function<std::string>(
           "--max-records", [&](const std::string& v) { args.overrides["maxRecords"] = v; },
           "stop after this many accepted records");
    cmd->add_option_function<std::vector<std::string>>(
           "--set",
           [&](const std::vector<std::string>& pairs) {
               for (const auto& kv : pairs) {
                   const auto eq = kv.find('=');
                   if (eq == std::string::npos)
                       throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
                   args.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
               }
           },
           "override any config key, e.g. --set N=400 --set epsilon=0.06")
        ->take_all();
}

ordered_json tuple_json(const projstream::TupleDump& t) {
    ordered_json j;
    j["id"] = t.id;
    j["w"] = t.w;
    j["created_seq"] = t.created_seq;
    j["last_update_seq"] = t.last_update_seq;
    j["pdim"] = t.pdim;
    j["center"] = t.center;
    j["variance"] = t.variances;
    return j;
}

void print_summary(const projstream::RunSummary& summary) {
    std::cout << "records: read=" << summary.lines_read << " accepted=" << summary.accepted
              << " rejected=" << summary.rejected << " (d=" << summary.dimensions << ")\n";
    for (const auto& e : summary.engines)
        std::cout << "engine " << e.engine << ": windows=" << e.rows.size()
                  << " cores=" << e.cores.size() << " outliers=" << e.outliers.size()
                  << " final_clusters=" << e.final_clusters.size() << "\n";
}

int run_command(const CliArgs& args, std::optional<projstream::EngineKind> forced_engine,
                bool inspect) {
    RunConfig config;
    try {
        config = projstream::load_config(args.config_path, args.overrides);
        if (forced_engine) config.engine = *forced_engine;
        const projstream::RunSummary summary = projstream::run_pipeline(config);
        if (inspect) {
            ordered_json out;
            for (const auto& e : summary.engines) {
                ordered_json section;
                section["query_seq"] = e.query_seq;
                section["cores"] = ordered_json::array();
                section["outliers"] = ordered_json::array();
                for (const auto& t : e.cores) section["cores"].push_back(tuple_json(t));
                for (const auto& t : e.outliers) section["outliers"].push_back(tuple_json(t));
                out[e.engine] = std::move(section);
            }
            std::cout << out.dump(2) << "\n";
        } else {
            print_summary(summary);
        }
        return 0;
    } catch (const projstream::ConfigError& e) {
        std::cerr << "projstream: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const projstream::IoError& e) {
        std::cerr << "projstream: i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projected micro-cluster engine for high dimensional data streams"};
    app.require_subcommand(1);

    CliArgs run_args, compare_args, inspect_args;
    CLI::App* run = app.add_subcommand("run", "execute the pipeline per configuration");
    add_common_options(run, run_args);
    CLI::App* compare =
        app.add_subcommand("compare", "run both engines on the same input (engine=both)");
    add_common_options(compare, compare_args);
    CLI::App* inspect =
        app.add_subcommand("inspect", "run the pipeline and dump the final tuple sets as JSON");
    add_common_options(inspect, inspect_args);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(run_args, std::nullopt, false);
    if (compare->parsed())
        return run_command(compare_args, projstream::EngineKind::Both, false);
    return run_command(inspect_args, std::nullopt, true);
}
