#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wds/config.hpp"
#include "wds/detector.hpp"
#include "wds/engine.hpp"
#include "wds/harness.hpp"

namespace {

// Exit codes (also in the README): 0 ok, 2 usage, 3 missing/unreadable
// file, 4 config parse error, 5 config validation error, 1 anything else.
constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;
constexpr int kExitParse = 4;
constexpr int kExitValidation = 5;

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot open file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot write file: " + path);
    f << content;
}

wds::ScenarioConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return wds::load_config("");
    return wds::load_config(read_file(config_path));
}

struct RunOptions {
    std::string config_path;
    std::string protocol;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int nodes = 0;
    std::string out_dir;
};

int cmd_run(const RunOptions& opt) {
    wds::ScenarioConfig cfg = load_or_default(opt.config_path);
    if (!opt.protocol.empty() && !wds::parse_protocol(opt.protocol, cfg.routing_protocol))
        throw wds::ConfigValidationError("routing.protocol", "unknown protocol '" + opt.protocol + "'");
    if (opt.seed_set) cfg.rng_seed = opt.seed;
    if (opt.nodes > 0) cfg.num_legit_nodes = opt.nodes - 2 * cfg.num_wormhole_pairs;
    cfg.validate();

    wds::SimResult result = wds::run_simulation(cfg);

    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        const std::filesystem::path dir(opt.out_dir);
        write_file((dir / "trace.log").string(), result.trace.serialize());
        write_file((dir / "report.txt").string(), result.report.serialize());
        write_file((dir / "config.txt").string(), wds::dump_config(cfg));
    }
    std::cout << "nodes=" << cfg.total_nodes() << " protocol="
              << wds::protocol_name(cfg.routing_protocol) << " seed=" << cfg.rng_seed
              << " confirmed=" << result.report.confirmed.size()
              << " success=" << result.report.detection_success_rate
              << "% false_alarm=" << result.report.false_alarm_rate << "%\n";
    return 0;
}

struct MatrixOptions {
    std::string config_path;
    int seeds = 5;
    std::string nodes_csv;
    std::string protocols_csv;
    std::string out_dir = ".";
};

int cmd_matrix(const MatrixOptions& opt) {
    wds::ExperimentMatrix matrix;
    matrix.base = load_or_default(opt.config_path);
    if (opt.seeds < 1) throw wds::ConfigValidationError("seeds", "--seeds must be >= 1");
    matrix.seeds.clear();
    for (int s = 1; s <= opt.seeds; ++s) matrix.seeds.push_back(static_cast<std::uint64_t>(s));
    if (!opt.nodes_csv.empty()) {
        matrix.node_totals.clear();
        std::stringstream ss(opt.nodes_csv);
        std::string item;
        while (std::getline(ss, item, ',')) matrix.node_totals.push_back(std::stoi(item));
    }
    if (!opt.protocols_csv.empty()) {
        matrix.protocols.clear();
        std::stringstream ss(opt.protocols_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            wds::Protocol p;
            if (!wds::parse_protocol(item, p))
                throw wds::ConfigValidationError("protocols", "unknown protocol '" + item + "'");
            matrix.protocols.push_back(p);
        }
    }

    wds::MatrixResult result = wds::run_matrix(matrix);

    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path dir(opt.out_dir);
    write_file((dir / "results.csv").string(), wds::results_to_csv(result.rows));
    write_file((dir / "series.csv").string(), wds::series_to_csv(result.series));
    std::cout << "wrote " << result.rows.size() << " rows to "
              << (dir / "results.csv").string() << "\n";
    return 0;
}

struct ReportOptions {
    std::string in_dir = ".";
    std::string out_dir = ".";
    int preset_pairs = 5;
};

int cmd_report(const ReportOptions& opt) {
    const std::filesystem::path in(opt.in_dir);
    const std::vector<wds::ResultRow> rows =
        wds::results_from_csv(read_file((in / "results.csv").string()));
    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path out(opt.out_dir);
    write_file((out / "summary.csv").string(), wds::summary_to_csv(wds::summarize(rows)));

    const std::filesystem::path series_path = in / "series.csv";
    if (std::filesystem::exists(series_path)) {
        const std::vector<wds::SeriesPoint> series =
            wds::series_from_csv(read_file(series_path.string()));
        write_file((out / "success_over_time.csv").string(),
                   wds::success_over_time_csv(series, opt.preset_pairs));
    }
    std::cout << "wrote " << (out / "summary.csv").string() << "\n";
    return 0;
}

struct ReplayOptions {
    std::string trace_path;
    std::string config_path;
    std::string out_path;
};

int cmd_replay(const ReplayOptions& opt) {
    wds::EventTrace trace = wds::EventTrace::parse_file(opt.trace_path);
    wds::ScenarioConfig cfg = load_or_default(opt.config_path);
    wds::RunnerResult result = wds::replay_detector(trace, cfg.detector);
    const std::string text = result.report.serialize();
    if (!opt.out_path.empty()) write_file(opt.out_path, text);
    else std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"opportunistic-network wormhole simulation and detection"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", run_opt.config_path, "scenario config file");
    run->add_option("--protocol", run_opt.protocol, "routing protocol override");
    run->add_option("--seed", run_opt.seed, "rng seed override")
        ->each([&run_opt](const std::string&) { run_opt.seed_set = true; });
    run->add_option("--nodes", run_opt.nodes, "total node count (includes wormhole endpoints)");
    run->add_option("--out", run_opt.out_dir, "output directory (trace.log, report.txt)");

    MatrixOptions matrix_opt;
    CLI::App* matrix = app.add_subcommand("matrix", "run the full scenario sweep");
    matrix->add_option("--config", matrix_opt.config_path, "base scenario config file");
    matrix->add_option("--seeds", matrix_opt.seeds, "seeds per cell (1..N)");
    matrix->add_option("--nodes", matrix_opt.nodes_csv, "comma-separated node totals");
    matrix->add_option("--protocols", matrix_opt.protocols_csv, "comma-separated protocols");
    matrix->add_option("--out", matrix_opt.out_dir, "output directory");

    ReportOptions report_opt;
    CLI::App* report = app.add_subcommand("report", "summarize matrix results");
    report->add_option("--in", report_opt.in_dir, "directory with results.csv/series.csv");
    report->add_option("--out", report_opt.out_dir, "output directory");
    report->add_option("--pairs", report_opt.preset_pairs, "preset wormhole pair count");

    ReplayOptions replay_opt;
    CLI::App* replay = app.add_subcommand("replay", "re-run the detector on a saved trace");
    replay->add_option("--trace", replay_opt.trace_path, "trace file")->required();
    replay->add_option("--config,--params", replay_opt.config_path, "config with detector params");
    replay->add_option("--out", replay_opt.out_path, "report output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (matrix->parsed()) return cmd_matrix(matrix_opt);
        if (report->parsed()) return cmd_report(report_opt);
        if (replay->parsed()) return cmd_replay(replay_opt);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const wds::ConfigParseError& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wds::ConfigValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitFile;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
