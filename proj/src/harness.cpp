#include "wds/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "wds/detector.hpp"
#include "wds/stats.hpp"

namespace wds {

ScenarioConfig cell_config(const ScenarioConfig& base, int node_total, Protocol protocol,
                           std::uint64_t seed) {
    ScenarioConfig cfg = base;
    cfg.num_legit_nodes = node_total - 2 * base.num_wormhole_pairs;
    cfg.routing_protocol = protocol;
    cfg.rng_seed = seed;
    return cfg;
}

namespace {

struct CellKey {
    int total;
    Protocol protocol;
    std::uint64_t seed;
    bool operator<(const CellKey& o) const {
        if (total != o.total) return total < o.total;
        if (protocol != o.protocol) return protocol < o.protocol;
        return seed < o.seed;
    }
};

struct CellOutput {
    ResultRow row;
    std::vector<SeriesPoint> series;
};

CellOutput run_cell(const ScenarioConfig& cfg, const CellKey& key) {
    const auto t0 = std::chrono::steady_clock::now();
    SimResult sim = run_simulation(cfg);
    const auto t1 = std::chrono::steady_clock::now();

    CellOutput out;
    ResultRow& row = out.row;
    row.node_total = key.total;
    row.protocol = key.protocol;
    row.seed = key.seed;
    row.success_rate = sim.report.detection_success_rate;
    row.false_alarm_rate = sim.report.false_alarm_rate;
    row.mean_detection_time = sim.report.mean_detection_time;
    row.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0;

    const std::vector<NodePair> truth = sim.trace.truth_pairs();
    const std::set<NodePair> truth_set(truth.begin(), truth.end());
    for (const ConfirmedPair& p : sim.report.confirmed) {
        if (truth_set.count(make_pair_key(p.a, p.b))) row.true_detections++;
        else row.false_detections++;
    }

    for (size_t i = 0; i < sim.detector.pass_times.size(); ++i) {
        SeriesPoint pt;
        pt.node_total = key.total;
        pt.protocol = key.protocol;
        pt.seed = key.seed;
        pt.time = sim.detector.pass_times[i];
        for (const ConfirmedPair& p : sim.report.confirmed) {
            if (p.declared_at > pt.time) continue;
            if (truth_set.count(make_pair_key(p.a, p.b))) pt.confirmed_true++;
            else pt.confirmed_false++;
        }
        out.series.push_back(pt);
    }
    return out;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    if (const char* env = std::getenv("WDS_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace

MatrixResult run_matrix(const ExperimentMatrix& matrix, int workers) {
    if (matrix.node_totals.empty() || matrix.protocols.empty() || matrix.seeds.empty())
        throw std::invalid_argument("experiment matrix must have nodes, protocols and seeds");

    // Reject the whole matrix before running anything.
    std::vector<CellKey> cells;
    for (int total : matrix.node_totals)
        for (Protocol p : matrix.protocols)
            for (std::uint64_t s : matrix.seeds) {
                cell_config(matrix.base, total, p, s).validate();
                cells.push_back({total, p, s});
            }

    // Duplicate cells run once.
    std::vector<CellKey> unique_cells;
    {
        std::set<CellKey> seen;
        for (const CellKey& k : cells)
            if (seen.insert(k).second) unique_cells.push_back(k);
    }

    std::map<CellKey, CellOutput> outputs;
    const int nworkers = std::min<int>(resolve_workers(workers),
                                       static_cast<int>(unique_cells.size()));
    if (nworkers <= 1) {
        for (const CellKey& k : unique_cells)
            outputs[k] = run_cell(cell_config(matrix.base, k.total, k.protocol, k.seed), k);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::pair<CellKey, CellOutput>> slots(unique_cells.size());
        auto worker = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= unique_cells.size()) return;
                const CellKey& k = unique_cells[i];
                slots[i] = {k, run_cell(cell_config(matrix.base, k.total, k.protocol, k.seed), k)};
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        for (auto& [k, out] : slots) outputs[k] = std::move(out);
    }

    // Merge in deterministic request order, not completion order.
    MatrixResult result;
    for (const CellKey& k : cells) {
        const CellOutput& out = outputs.at(k);
        result.rows.push_back(out.row);
        result.series.insert(result.series.end(), out.series.begin(), out.series.end());
    }
    return result;
}

std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");
    std::map<std::pair<int, int>, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows)
        groups[{static_cast<int>(r.protocol), r.node_total}].push_back(&r);

    std::vector<SummaryCell> out;
    for (const auto& [key, members] : groups) {
        SummaryCell c;
        c.protocol = static_cast<Protocol>(key.first);
        c.node_total = key.second;
        c.runs = static_cast<int>(members.size());
        std::vector<double> td, fd, sr, fr, dt;
        for (const ResultRow* r : members) {
            td.push_back(r->true_detections);
            fd.push_back(r->false_detections);
            sr.push_back(r->success_rate);
            fr.push_back(r->false_alarm_rate);
            if (r->mean_detection_time >= 0) dt.push_back(r->mean_detection_time);
        }
        c.true_det_mean = stats::mean(td);
        c.true_det_std = stats::stddev(td);
        c.false_det_mean = stats::mean(fd);
        c.false_det_std = stats::stddev(fd);
        c.success_mean = stats::mean(sr);
        c.success_std = stats::stddev(sr);
        c.false_alarm_mean = stats::mean(fr);
        c.false_alarm_std = stats::stddev(fr);
        if (!dt.empty()) {
            c.detection_time_mean = stats::mean(dt);
            c.detection_time_std = stats::stddev(dt);
        }
        out.push_back(c);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

Protocol protocol_or_throw(const std::string& s) {
    Protocol p;
    if (!parse_protocol(s, p)) throw std::runtime_error("csv: unknown protocol '" + s + "'");
    return p;
}

} // namespace

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream o;
    o << "node_total,protocol,seed,true_detections,false_detections,success_rate,"
         "false_alarm_rate,mean_detection_time,wall_time\n";
    char buf[256];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%llu,%d,%d,%.2f,%.2f,%.6f,%.3f\n", r.node_total,
                      protocol_name(r.protocol).c_str(),
                      static_cast<unsigned long long>(r.seed), r.true_detections,
                      r.false_detections, r.success_rate, r.false_alarm_rate,
                      r.mean_detection_time, r.wall_time);
        o << buf;
    }
    return o.str();
}

std::vector<ResultRow> results_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ResultRow> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 9) throw std::runtime_error("csv: bad results row: " + line);
        ResultRow r;
        r.node_total = std::stoi(f[0]);
        r.protocol = protocol_or_throw(f[1]);
        r.seed = std::stoull(f[2]);
        r.true_detections = std::stoi(f[3]);
        r.false_detections = std::stoi(f[4]);
        r.success_rate = std::stod(f[5]);
        r.false_alarm_rate = std::stod(f[6]);
        r.mean_detection_time = std::stod(f[7]);
        r.wall_time = std::stod(f[8]);
        out.push_back(r);
    }
    return out;
}

std::string series_to_csv(const std::vector<SeriesPoint>& series) {
    std::ostringstream o;
    o << "node_total,protocol,seed,time,confirmed_true,confirmed_false\n";
    char buf[160];
    for (const SeriesPoint& p : series) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%llu,%.6f,%d,%d\n", p.node_total,
                      protocol_name(p.protocol).c_str(),
                      static_cast<unsigned long long>(p.seed), p.time, p.confirmed_true,
                      p.confirmed_false);
        o << buf;
    }
    return o.str();
}

std::vector<SeriesPoint> series_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<SeriesPoint> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 6) throw std::runtime_error("csv: bad series row: " + line);
        SeriesPoint p;
        p.node_total = std::stoi(f[0]);
        p.protocol = protocol_or_throw(f[1]);
        p.seed = std::stoull(f[2]);
        p.time = std::stod(f[3]);
        p.confirmed_true = std::stoi(f[4]);
        p.confirmed_false = std::stoi(f[5]);
        out.push_back(p);
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryCell>& cells) {
    std::ostringstream o;
    o << "protocol,node_total,runs,true_det_mean,true_det_std,false_det_mean,false_det_std,"
         "success_mean,success_std,false_alarm_mean,false_alarm_std,detection_time_mean,"
         "detection_time_std\n";
    char buf[320];
    for (const SummaryCell& c : cells) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%d,%d,%.3f,%.3f,%.3f,%.3f,%.2f,%.2f,%.2f,%.2f,%.3f,%.3f\n",
                      protocol_name(c.protocol).c_str(), c.node_total, c.runs, c.true_det_mean,
                      c.true_det_std, c.false_det_mean, c.false_det_std, c.success_mean,
                      c.success_std, c.false_alarm_mean, c.false_alarm_std,
                      c.detection_time_mean, c.detection_time_std);
        o << buf;
    }
    return o.str();
}

std::string success_over_time_csv(const std::vector<SeriesPoint>& series, int preset_pairs) {
    // protocol,total,time -> mean success percentage over seeds
    std::map<std::tuple<int, int, double>, std::pair<double, int>> acc;
    for (const SeriesPoint& p : series) {
        auto& slot = acc[{static_cast<int>(p.protocol), p.node_total, p.time}];
        slot.first += preset_pairs > 0 ? 100.0 * p.confirmed_true / preset_pairs : 0.0;
        slot.second += 1;
    }
    std::ostringstream o;
    o << "protocol,node_total,time,success_pct\n";
    char buf[160];
    for (const auto& [key, slot] : acc) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.2f\n",
                      protocol_name(static_cast<Protocol>(std::get<0>(key))).c_str(),
                      std::get<1>(key), std::get<2>(key), slot.first / slot.second);
        o << buf;
    }
    return o.str();
}

} // namespace wds
