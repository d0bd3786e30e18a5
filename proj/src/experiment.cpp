#include "admsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace admsched {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key))
            throw ConfigError(where + "." + key + ": unknown key");
}

double get_number(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError(where + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError(where + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
}

DiscreteDist parse_dist(const json& j, const std::string& where)
{
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError(where + ".type: missing or not a string");
    const auto type = j.at("type").get<std::string>();
    try {
        if (type == "deterministic") {
            reject_unknown(j, where, {"type", "value"});
            return DiscreteDist::deterministic(get_count(j, "value", where));
        }
        if (type == "poisson") {
            reject_unknown(j, where, {"type", "mean"});
            return DiscreteDist::poisson(get_number(j, "mean", where));
        }
        if (type == "geometric") {
            reject_unknown(j, where, {"type", "mean"});
            return DiscreteDist::geometric(get_number(j, "mean", where));
        }
        if (type == "categorical") {
            reject_unknown(j, where, {"type", "table"});
            if (!j.contains("table") || !j.at("table").is_array())
                throw ConfigError(where + ".table: expected an array of [value, probability]");
            std::vector<std::pair<std::uint64_t, double>> table;
            for (const auto& row : j.at("table")) {
                if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() || row[0].get<std::int64_t>() < 0 ||
                    !row[1].is_number())
                    throw ConfigError(where + ".table: entries must be [non-negative integer, probability]");
                table.emplace_back(row[0].get<std::uint64_t>(), row[1].get<double>());
            }
            return DiscreteDist::categorical(std::move(table));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ".type: unknown distribution '" + type + "'");
}

} // namespace

AdmissibilityModel ExperimentConfig::model() const
{
    if (region_graph)
        return RegionGraph(region_graph->K, region_graph->edges);
    return PairwiseDistance::make(r);
}

Partition ExperimentConfig::partition() const
{
    if (region_graph)
        return std::get<RegionGraph>(model()).partition();
    return build_partition(r, K);
}

RunSpec ExperimentConfig::run_spec() const
{
    RunSpec spec;
    spec.model = model();
    spec.partition = partition();
    spec.traffic = arrivals;
    if (priority)
        spec.scheduler = PriorityScheduler{Location(*zeta)};
    else
        spec.scheduler = RandomScheduler{};
    spec.slots = slots;
    spec.seed = seed;
    spec.thinning = thinning;
    spec.diagnostics = diagnostics;
    return spec;
}

ExperimentConfig parse_config(const json& j)
{
    reject_unknown(j, "config",
                   {"space", "partition", "scheduler", "arrivals", "slots", "seed", "thinning", "outputs", "diagnostics"});
    ExperimentConfig c;

    if (!j.contains("space"))
        throw ConfigError("space: missing");
    const auto& space = j.at("space");
    reject_unknown(space, "space", {"r", "region_graph"});
    if (space.contains("region_graph")) {
        if (space.contains("r"))
            throw ConfigError("space: give either r or region_graph, not both");
        const auto& g = space.at("region_graph");
        reject_unknown(g, "space.region_graph", {"K", "edges"});
        RegionGraphSpec spec;
        spec.K = static_cast<int>(get_count(g, "K", "space.region_graph"));
        if (g.contains("edges")) {
            for (const auto& e : g.at("edges")) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                    throw ConfigError("space.region_graph.edges: entries must be [i, j]");
                spec.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        }
        c.region_graph = spec;
    } else {
        c.r = get_number(space, "r", "space");
        if (!(c.r > 0.0 && c.r < 1.0))
            throw ConfigError("space.r: must lie in (0,1)");
    }

    if (j.contains("partition")) {
        const auto& p = j.at("partition");
        reject_unknown(p, "partition", {"K"});
        if (p.contains("K"))
            c.K = static_cast<int>(get_count(p, "K", "partition"));
    }

    if (!j.contains("scheduler"))
        throw ConfigError("scheduler: missing");
    const auto& s = j.at("scheduler");
    reject_unknown(s, "scheduler", {"type", "zeta"});
    if (!s.contains("type") || !s.at("type").is_string())
        throw ConfigError("scheduler.type: missing or not a string");
    const auto type = s.at("type").get<std::string>();
    if (type == "priority")
        c.priority = true;
    else if (type != "random")
        throw ConfigError("scheduler.type: expected \"random\" or \"priority\"");
    if (s.contains("zeta")) {
        c.zeta = get_number(s, "zeta", "scheduler");
        if (!(*c.zeta >= 0.0 && *c.zeta < 1.0))
            throw ConfigError("scheduler.zeta: must lie in [0,1)");
    }
    if (c.priority && !c.zeta)
        throw ConfigError("scheduler.zeta: required for the priority scheduler");
    if (c.priority && c.region_graph)
        throw ConfigError("scheduler.type: priority needs the circle model (space.r)");

    if (!j.contains("arrivals"))
        throw ConfigError("arrivals: missing");
    const auto& a = j.at("arrivals");
    reject_unknown(a, "arrivals", {"batch_count", "batch_size"});
    if (!a.contains("batch_count"))
        throw ConfigError("arrivals.batch_count: missing");
    c.arrivals.batch_count = parse_dist(a.at("batch_count"), "arrivals.batch_count");
    c.arrivals.batch_size =
        a.contains("batch_size") ? parse_dist(a.at("batch_size"), "arrivals.batch_size") : DiscreteDist::deterministic(1);
    try {
        c.arrivals.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    c.slots = get_count(j, "slots", "config");
    c.seed = get_count(j, "seed", "config");
    if (j.contains("thinning")) {
        c.thinning = get_count(j, "thinning", "config");
        if (c.thinning < 1)
            throw ConfigError("config.thinning: must be >= 1");
    }

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        reject_unknown(o, "outputs", {"trajectory", "terminal", "diagnostics"});
        auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!o.contains(key))
                return std::nullopt;
            if (!o.at(key).is_string())
                throw ConfigError(std::string("outputs.") + key + ": expected a path string");
            return std::filesystem::path(o.at(key).get<std::string>());
        };
        if (auto t = path_of("trajectory"))
            c.outputs.trajectory = *t;
        c.outputs.terminal = path_of("terminal");
        c.outputs.diagnostics = path_of("diagnostics");
    }
    if (j.contains("diagnostics")) {
        const auto& d = j.at("diagnostics");
        reject_unknown(d, "diagnostics", {"enabled"});
        if (d.contains("enabled")) {
            if (!d.at("enabled").is_boolean())
                throw ConfigError("diagnostics.enabled: expected a boolean");
            c.diagnostics = d.at("enabled").get<bool>();
        }
    }

    // Model-level validation (partition bound, region graph structure).
    try {
        (void)c.run_spec().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(c.region_graph ? "space.region_graph" : "partition.K") + ": " + e.what());
    }
    return c;
}

namespace {

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": parse error: " + e.what());
    }
}

} // namespace

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_json(path));
}

SweepConfig parse_sweep(const json& j)
{
    reject_unknown(j, "sweep", {"base", "lambda_grid", "seeds", "parallelism", "summary", "run_output_dir"});
    SweepConfig s;
    if (!j.contains("base"))
        throw ConfigError("sweep.base: missing");
    s.base = parse_config(j.at("base"));

    if (!j.contains("lambda_grid") || !j.at("lambda_grid").is_array())
        throw ConfigError("sweep.lambda_grid: expected an array");
    for (const auto& v : j.at("lambda_grid")) {
        if (!v.is_number() || !(v.get<double>() > 0.0))
            throw ConfigError("sweep.lambda_grid: entries must be positive numbers");
        s.lambda_grid.push_back(v.get<double>());
    }
    if (s.lambda_grid.empty())
        throw ConfigError("sweep.lambda_grid: must not be empty");
    try {
        for (double lambda : s.lambda_grid)
            (void)s.base.arrivals.batch_count.with_mean(lambda);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sweep.base.arrivals.batch_count: ") + e.what());
    }

    if (!j.contains("seeds") || !j.at("seeds").is_array())
        throw ConfigError("sweep.seeds: expected an array");
    for (const auto& v : j.at("seeds")) {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError("sweep.seeds: entries must be non-negative integers");
        s.seeds.push_back(v.get<std::uint64_t>());
    }
    if (s.seeds.empty())
        throw ConfigError("sweep.seeds: must not be empty");

    if (j.contains("parallelism")) {
        s.parallelism = static_cast<unsigned>(get_count(j, "parallelism", "sweep"));
        if (s.parallelism < 1)
            throw ConfigError("sweep.parallelism: must be >= 1");
    }
    if (j.contains("summary")) {
        if (!j.at("summary").is_string())
            throw ConfigError("sweep.summary: expected a path string");
        s.summary = j.at("summary").get<std::string>();
    }
    if (j.contains("run_output_dir")) {
        if (!j.at("run_output_dir").is_string())
            throw ConfigError("sweep.run_output_dir: expected a path string");
        s.run_output_dir = std::filesystem::path(j.at("run_output_dir").get<std::string>());
    }
    return s;
}

SweepConfig load_sweep(const std::filesystem::path& path)
{
    return parse_sweep(read_json(path));
}

namespace {

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_location(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const RunResult& run)
{
    os << "t,total,arrived,removed\n";
    for (const auto& r : run.trace)
        os << r.t << ',' << r.total_after << ',' << r.arrived << ',' << r.removed << '\n';
}

void write_terminal_csv(std::ostream& os, const Configuration& y)
{
    os << "location\n";
    for (const auto& p : y.particles())
        os << fmt_location(p.location.value()) << '\n';
}

void write_diagnostics_csv(std::ostream& os, const RunResult& run)
{
    os << "t,total,V,J,logw\n";
    for (const auto& d : run.diagnostics)
        os << d.t << ',' << d.total << ',' << fmt_double(d.V) << ',' << fmt_double(d.J) << ',' << fmt_double(d.log_w)
           << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "lambda,seed,tail_slope,r_squared,tail_mean,empty_visits\n";
    for (const auto& r : rows)
        os << fmt_double(r.lambda) << ',' << r.seed << ',' << fmt_double(r.stats.tail_slope) << ','
           << fmt_double(r.stats.r_squared) << ',' << fmt_double(r.stats.tail_mean) << ',' << r.stats.empty_visits
           << '\n';
}

std::filesystem::path resolve_output(const std::filesystem::path& p)
{
    const char* dir = std::getenv("ADMSCHED_OUTPUT_DIR");
    if (dir && *dir && p.is_relative())
        return std::filesystem::path(dir) / p;
    return p;
}

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path.string() + ": cannot open for writing");
    body(out);
    out.flush();
    if (!out)
        throw std::runtime_error(path.string() + ": write failed");
}

} // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& log)
{
    const auto result = run(config.run_spec());
    const auto traj = resolve_output(config.outputs.trajectory);
    write_file(traj, [&](std::ostream& os) { write_trajectory_csv(os, result); });
    log << "trajectory: " << traj.string() << " (" << result.trace.size() << " rows)\n";
    if (config.outputs.terminal) {
        const auto path = resolve_output(*config.outputs.terminal);
        write_file(path, [&](std::ostream& os) { write_terminal_csv(os, result.final_configuration); });
        log << "terminal: " << path.string() << " (" << result.final_configuration.size() << " particles)\n";
    }
    if (config.diagnostics && config.outputs.diagnostics) {
        const auto path = resolve_output(*config.outputs.diagnostics);
        write_file(path, [&](std::ostream& os) { write_diagnostics_csv(os, result); });
        log << "diagnostics: " << path.string() << '\n';
    }
    log << "final total: " << result.final_configuration.size() << ", empty visits: " << result.empty_visits << '\n';
    try {
        const auto s = stability_detectors(result);
        log << "tail slope: " << fmt_double(s.tail_slope) << ", r^2: " << fmt_double(s.r_squared)
            << ", tail mean: " << fmt_double(s.tail_mean) << ", J time average: " << fmt_double(s.j_time_avg) << '\n';
    } catch (const std::invalid_argument&) {
        log << "trace too short for stability detectors\n";
    }
    return 0;
}

std::vector<SweepRow> run_sweep(const SweepConfig& sweep)
{
    std::vector<double> lambdas = sweep.lambda_grid;
    std::vector<std::uint64_t> seeds = sweep.seeds;
    std::sort(lambdas.begin(), lambdas.end());
    std::sort(seeds.begin(), seeds.end());

    std::vector<SweepRow> rows;
    for (double l : lambdas)
        for (std::uint64_t s : seeds)
            rows.push_back({l, s, {}});

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::string error_context;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size())
                return;
            auto& row = rows[i];
            try {
                ExperimentConfig c = sweep.base;
                c.arrivals.batch_count = c.arrivals.batch_count.with_mean(row.lambda);
                c.seed = row.seed;
                const auto result = run(c.run_spec());
                row.stats = stability_detectors(result);
                if (sweep.run_output_dir) {
                    const auto path = resolve_output(*sweep.run_output_dir) /
                                      ("trajectory_lambda" + fmt_double(row.lambda) + "_seed" + std::to_string(row.seed) +
                                       ".csv");
                    write_file(path, [&](std::ostream& os) { write_trajectory_csv(os, result); });
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                    error_context = "run (lambda=" + fmt_double(row.lambda) + ", seed=" + std::to_string(row.seed) +
                                    ") failed: " + e.what();
                }
            }
        }
    };

    const unsigned threads = std::max(1U, std::min<unsigned>(sweep.parallelism, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    if (first_error)
        throw std::runtime_error(error_context);
    return rows;
}

int cmd_sweep(const SweepConfig& sweep, std::ostream& log)
{
    const auto rows = run_sweep(sweep);
    const auto path = resolve_output(sweep.summary);
    write_file(path, [&](std::ostream& os) { write_summary_csv(os, rows); });
    log << "summary: " << path.string() << " (" << rows.size() << " rows)\n";
    return 0;
}

} // namespace admsched
