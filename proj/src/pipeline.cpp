#include "projstream/pipeline.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "projstream/bounded_queue.hpp"
#include "projstream/engine.hpp"
#include "projstream/initialization.hpp"
#include "projstream/offline.hpp"

namespace projstream {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double parse_double_or_throw(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.c_str();
    auto [ptr, ec] = std::from_chars(begin, begin + value.size(), out);
    if (ec != std::errc{} || ptr != begin + value.size())
        throw ConfigError("config key '" + key + "': expected a real number, got '" + value + "'");
    return out;
}

std::uint64_t parse_u64_or_throw(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* begin = value.c_str();
    auto [ptr, ec] = std::from_chars(begin, begin + value.size(), out);
    if (ec != std::errc{} || ptr != begin + value.size())
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" +
                          value + "'");
    return out;
}

bool parse_bool_or_throw(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

const char* const kConfigKeys[] = {
    "N",           "pi",       "mu",          "beta",
    "xi",          "initialPoints", "epsilon", "H",
    "alpha",       "rho",      "lambda",      "burstFraction",
    "decayWeight", "distanceNormalizer", "engine", "normalization",
    "timing",      "maxRecords", "input",     "output",
};

}  // namespace

std::string to_string(EngineKind kind) {
    switch (kind) {
        case EngineKind::Ea: return "ea";
        case EngineKind::Cf: return "cf";
        case EngineKind::Both: return "both";
    }
    return "ea";
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "N")
        config.params.n_window = static_cast<std::size_t>(parse_u64_or_throw(key, value));
    else if (key == "pi")
        config.params.pi_dim = static_cast<std::size_t>(parse_u64_or_throw(key, value));
    else if (key == "mu")
        config.params.mu = parse_double_or_throw(key, value);
    else if (key == "beta")
        config.params.beta = parse_double_or_throw(key, value);
    else if (key == "xi")
        config.params.xi = parse_double_or_throw(key, value);
    else if (key == "initialPoints")
        config.params.initial_points = static_cast<std::size_t>(parse_u64_or_throw(key, value));
    else if (key == "epsilon")
        config.params.eps = parse_double_or_throw(key, value);
    else if (key == "H")
        config.params.horizon = static_cast<std::size_t>(parse_u64_or_throw(key, value));
    else if (key == "alpha")
        config.params.alpha_override = parse_double_or_throw(key, value);
    else if (key == "rho")
        config.params.rho = parse_double_or_throw(key, value);
    else if (key == "lambda")
        config.params.lambda = parse_double_or_throw(key, value);
    else if (key == "burstFraction")
        config.params.burst_fraction = parse_double_or_throw(key, value);
    else if (key == "decayWeight")
        config.params.decay_weight = parse_bool_or_throw(key, value);
    else if (key == "distanceNormalizer") {
        if (value == "rho")
            config.params.distance_normalizer = DistanceNormalizer::Rho;
        else if (value == "xi")
            config.params.distance_normalizer = DistanceNormalizer::Xi;
        else
            throw ConfigError("config key 'distanceNormalizer': expected rho|xi, got '" + value +
                              "'");
    } else if (key == "engine") {
        if (value == "ea")
            config.engine = EngineKind::Ea;
        else if (value == "cf")
            config.engine = EngineKind::Cf;
        else if (value == "both")
            config.engine = EngineKind::Both;
        else
            throw ConfigError("config key 'engine': expected ea|cf|both, got '" + value + "'");
    } else if (key == "normalization") {
        if (value == "minmax_initial")
            config.normalization = NormalizationMode::MinMaxInitial;
        else if (value == "none")
            config.normalization = NormalizationMode::None;
        else
            throw ConfigError("config key 'normalization': expected minmax_initial|none, got '" +
                              value + "'");
    } else if (key == "timing") {
        if (value == "wall")
            config.timing = TimingMode::Wall;
        else if (value == "none")
            config.timing = TimingMode::None;
        else
            throw ConfigError("config key 'timing': expected wall|none, got '" + value + "'");
    } else if (key == "maxRecords")
        config.max_records = parse_u64_or_throw(key, value);
    else if (key == "input")
        config.input_path = value;
    else if (key == "output")
        config.output_dir = value;
    else
        throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config(const std::optional<std::string>& config_path,
                      const std::map<std::string, std::string>& overrides) {
    RunConfig config;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw IoError("cannot open config file '" + *config_path + "'");
        std::string line;
        std::uint64_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config file line " + std::to_string(line_no) +
                                  ": expected key=value");
            apply_config_entry(config, line.substr(0, eq), line.substr(eq + 1));
        }
    }
    for (const char* key : kConfigKeys) {
        std::string env_name = "PROJSTREAM_";
        for (const char* c = key; *c; ++c) env_name += static_cast<char>(std::toupper(*c));
        if (const char* v = std::getenv(env_name.c_str())) apply_config_entry(config, key, v);
    }
    for (const auto& [key, value] : overrides) apply_config_entry(config, key, value);
    return config;
}

void RunConfig::validate() const {
    if (input_path.empty()) throw ConfigError("no input file configured");
    if (output_dir.empty()) throw ConfigError("no output directory configured");
    try {
        params.validate(0);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (params.initial_points == 0 && normalization == NormalizationMode::MinMaxInitial)
        throw ConfigError("initialPoints must be positive with normalization=minmax_initial");
}

namespace {

struct ReaderStats {
    std::uint64_t lines_read = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
};

constexpr std::size_t kQueueCapacity = 4096;
constexpr std::uint64_t kMaxRejectLogs = 25;

void log_reject(const kdd::ParseError& err, ReaderStats& stats, bool verbose) {
    ++stats.rejected;
    if (verbose && stats.rejected <= kMaxRejectLogs)
        std::cerr << "projstream: reject line " << err.line_no << ": " << err.reason << "\n";
    if (verbose && stats.rejected == kMaxRejectLogs + 1)
        std::cerr << "projstream: further rejects suppressed\n";
}

struct InitData {
    std::vector<Vec> raw_rows;
    std::vector<std::string> labels;
    std::size_t attr_count = 0;
};

/// Reads the initialization prefix. Stops after initial_points accepted
/// records (or max_records / EOF).
InitData read_initial_buffer(std::istream& in, const RunConfig& config, ReaderStats& stats,
                             bool verbose) {
    InitData data;
    std::string line;
    const std::uint64_t cap =
        config.max_records ? std::min<std::uint64_t>(*config.max_records,
                                                     config.params.initial_points)
                           : config.params.initial_points;
    while (data.raw_rows.size() < cap && std::getline(in, line)) {
        ++stats.lines_read;
        kdd::ParseError err;
        auto rec = kdd::parse_kdd_record(line, stats.lines_read, &err);
        if (!rec) {
            log_reject(err, stats, verbose);
            continue;
        }
        if (data.attr_count == 0) data.attr_count = rec->fields.size();
        if (rec->fields.size() != data.attr_count) {
            log_reject({stats.lines_read, "attribute count differs from first record"}, stats,
                       verbose);
            continue;
        }
        ++stats.accepted;
        data.raw_rows.push_back(kdd::continuous_values(*rec));
        data.labels.push_back(rec->label);
    }
    return data;
}

struct WindowAccumulator {
    Clock::time_point window_start{};
    double engine_seconds = 0.0;
    std::size_t points_in_window = 0;
    bool started = false;
};

template <class Tuple>
std::vector<Tuple> fold_initial(const std::vector<Point>& buffer, const Params& params);

template <>
std::vector<EaTuple> fold_initial<EaTuple>(const std::vector<Point>& buffer,
                                           const Params& params) {
    return build_initial_clusters(buffer, params);
}

template <>
std::vector<CfTuple> fold_initial<CfTuple>(const std::vector<Point>& buffer,
                                           const Params& params) {
    return build_initial_cf_clusters(buffer, params);
}

template <class Tuple>
TupleDump dump_tuple(const Tuple& t, const Params& params) {
    TupleDump d;
    d.id = t.id;
    d.w = t.w;
    d.created_seq = t.created_seq;
    d.last_update_seq = t.last_update_seq;
    const Moments m = moments(t);
    d.center = m.mean;
    d.variances = variance(m);
    d.pdim = pdim(d.variances, params);
    return d;
}

void write_row(const MetricsRow& row, std::ostream& csv, std::ostream& jsonl) {
    csv << row.window_index << ',' << row.engine << ','
        << (row.purity_core_only ? fmt6(*row.purity_core_only) : std::string{}) << ','
        << (row.purity_all ? fmt6(*row.purity_all) : std::string{}) << ',' << row.num_core << ','
        << row.num_outlier << ',' << row.num_final_clusters << ','
        << fmt6(row.window_wall_time_s) << '\n';

    ordered_json j;
    j["window_index"] = row.window_index;
    j["engine"] = row.engine;
    j["purity_core_only"] =
        row.purity_core_only ? ordered_json(*row.purity_core_only) : ordered_json(nullptr);
    j["purity_all"] = row.purity_all ? ordered_json(*row.purity_all) : ordered_json(nullptr);
    j["num_core"] = row.num_core;
    j["num_outlier"] = row.num_outlier;
    j["num_final_clusters"] = row.num_final_clusters;
    j["window_wall_time_s"] = row.window_wall_time_s;
    j["window_total_time_s"] = row.window_total_time_s;
    jsonl << j.dump() << '\n';
}

template <class Tuple>
EngineDump run_engine_pass(const RunConfig& config, const std::string& engine_name,
                           ReaderStats& stats, std::ostream& csv, std::ostream& jsonl,
                           bool verbose) {
    std::ifstream in(config.input_path);
    if (!in) throw IoError("cannot open input file '" + config.input_path + "'");

    const InitData init = read_initial_buffer(in, config, stats, verbose);
    if (init.raw_rows.empty()) throw IoError("input contains no parsable records");
    const std::size_t dim = init.raw_rows.front().size();
    if (init.raw_rows.size() < config.params.initial_points && verbose)
        std::cerr << "projstream: initialization buffer short: " << init.raw_rows.size() << " of "
                  << config.params.initial_points << " records\n";
    try {
        config.params.validate(dim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const kdd::Normalizer normalizer = config.normalization == NormalizationMode::MinMaxInitial
                                           ? kdd::Normalizer::fit(init.raw_rows)
                                           : kdd::Normalizer::identity(dim);

    std::vector<Point> init_points;
    init_points.reserve(init.raw_rows.size());
    for (std::size_t i = 0; i < init.raw_rows.size(); ++i)
        init_points.push_back(
            Point{normalizer.apply(init.raw_rows[i]), init.labels[i],
                  static_cast<std::uint64_t>(i + 1)});

    StreamEngine<Tuple> engine(config.params, dim);
    engine.seed_cores(fold_initial<Tuple>(init_points, config.params));

    // Reader runs ahead through a bounded ordered queue; this thread is the
    // only consumer and the only engine owner.
    BoundedQueue<Point> queue(kQueueCapacity);
    std::uint64_t seq = init_points.size();
    const std::size_t attr_count = init.attr_count;
    std::exception_ptr reader_error;
    std::thread reader([&] {
        try {
            std::string line;
            std::uint64_t local_seq = seq;
            while ((!config.max_records || stats.accepted < *config.max_records) &&
                   std::getline(in, line)) {
                ++stats.lines_read;
                kdd::ParseError err;
                auto rec = kdd::parse_kdd_record(line, stats.lines_read, &err);
                if (!rec) {
                    log_reject(err, stats, verbose);
                    continue;
                }
                if (rec->fields.size() != attr_count) {
                    log_reject({stats.lines_read, "attribute count differs from first record"},
                               stats, verbose);
                    continue;
                }
                ++stats.accepted;
                queue.push(Point{normalizer.apply(kdd::continuous_values(*rec)), rec->label,
                                 ++local_seq});
            }
        } catch (...) {
            reader_error = std::current_exception();
        }
        queue.close();
    });

    EngineDump dump;
    dump.engine = engine_name;
    dump.dimensions = dim;
    PurityTracker tracker(config.params.horizon);
    WindowAccumulator acc;
    std::size_t carried_final_clusters = 0;

    while (auto item = queue.pop()) {
        if (!acc.started) {
            acc.window_start = Clock::now();
            acc.started = true;
        }
        const auto t0 = Clock::now();
        const MergeOutcome outcome = engine.process_point(*item);
        acc.engine_seconds += seconds_between(t0, Clock::now());
        tracker.credit(outcome.tuple_id, item->label);
        ++acc.points_in_window;

        if (acc.points_in_window == config.params.n_window) {
            const auto t1 = Clock::now();
            engine.window_rebalance();
            acc.engine_seconds += seconds_between(t1, Clock::now());

            const auto& state = engine.state();
            std::vector<std::uint64_t> core_ids, all_ids;
            for (const auto& t : state.cores) core_ids.push_back(t.id);
            all_ids = core_ids;
            for (const auto& t : state.outliers) all_ids.push_back(t.id);

            MetricsRow row;
            row.window_index = state.window_index;
            row.engine = engine_name;
            row.purity_core_only = tracker.compute(core_ids);
            row.purity_all = tracker.compute(all_ids);
            row.num_core = state.cores.size();
            row.num_outlier = state.outliers.size();
            if (state.window_index % config.params.horizon == 0) {
                carried_final_clusters =
                    final_clusters(state.cores, config.params, state.last_seq).clusters.size();
            }
            row.num_final_clusters = carried_final_clusters;
            row.window_total_time_s = seconds_between(acc.window_start, Clock::now());
            row.window_wall_time_s = acc.engine_seconds;
            if (config.timing == TimingMode::None) {
                row.window_wall_time_s = 0.0;
                row.window_total_time_s = 0.0;
            }
            write_row(row, csv, jsonl);
            dump.rows.push_back(std::move(row));

            tracker.roll_window();
            acc = WindowAccumulator{};
        }
    }
    reader.join();
    if (reader_error) std::rethrow_exception(reader_error);

    const auto& state = engine.state();
    dump.query_seq = state.last_seq;
    const FinalClustering fc = final_clusters(state.cores, config.params, state.last_seq);
    dump.final_clusters = fc.clusters;
    for (const auto& t : state.cores) dump.cores.push_back(dump_tuple(t, config.params));
    for (const auto& t : state.outliers) dump.outliers.push_back(dump_tuple(t, config.params));
    return dump;
}

}  // namespace

RunSummary run_pipeline(const RunConfig& config) {
    config.validate();

    std::filesystem::create_directories(config.output_dir);
    const auto csv_path = std::filesystem::path(config.output_dir) / "metrics.csv";
    const auto jsonl_path = std::filesystem::path(config.output_dir) / "metrics.jsonl";
    const auto clusters_path = std::filesystem::path(config.output_dir) / "clusters.json";

    std::ofstream csv(csv_path);
    std::ofstream jsonl(jsonl_path);
    if (!csv || !jsonl) throw IoError("cannot write outputs under '" + config.output_dir + "'");
    csv << "window_index,engine,purity_core_only,purity_all,num_core,num_outlier,"
           "num_final_clusters,window_wall_time_s\n";

    RunSummary summary;
    const bool run_ea = config.engine != EngineKind::Cf;
    const bool run_cf = config.engine != EngineKind::Ea;

    ReaderStats stats;
    if (run_ea) {
        summary.engines.push_back(
            run_engine_pass<EaTuple>(config, "ea", stats, csv, jsonl, true));
    }
    if (run_cf) {
        ReaderStats cf_stats;
        summary.engines.push_back(run_engine_pass<CfTuple>(config, "cf", cf_stats, csv, jsonl,
                                                           !run_ea));
        if (!run_ea) stats = cf_stats;
    }

    summary.lines_read = stats.lines_read;
    summary.accepted = stats.accepted;
    summary.rejected = stats.rejected;
    if (!summary.engines.empty()) summary.dimensions = summary.engines.front().dimensions;

    ordered_json clusters;
    clusters["input"] = config.input_path;
    clusters["engines"] = ordered_json::object();
    for (const auto& dump : summary.engines) {
        ordered_json e;
        e["query_seq"] = dump.query_seq;
        e["num_clusters"] = dump.final_clusters.size();
        ordered_json arr = ordered_json::array();
        for (const auto& cluster : dump.final_clusters) {
            ordered_json c;
            c["tuple_ids"] = cluster;
            c["size"] = cluster.size();
            arr.push_back(std::move(c));
        }
        e["clusters"] = std::move(arr);
        clusters["engines"][dump.engine] = std::move(e);
    }
    std::ofstream cj(clusters_path);
    if (!cj) throw IoError("cannot write '" + clusters_path.string() + "'");
    cj << clusters.dump(2) << '\n';

    if (!csv.flush() || !jsonl.flush())
        throw IoError("failed flushing metrics under '" + config.output_dir + "'");
    return summary;
}

}  // namespace projstream
