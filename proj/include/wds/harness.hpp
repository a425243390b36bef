#ifndef WDS_HARNESS_HPP
#define WDS_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wds/config.hpp"
#include "wds/engine.hpp"

namespace wds {

struct ExperimentMatrix {
    std::vector<int> node_totals{58, 64, 70, 76};
    std::vector<Protocol> protocols{Protocol::FirstContact, Protocol::Epidemic,
                                    Protocol::Prophet, Protocol::SprayAndWait};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    ScenarioConfig base;
};

struct ResultRow {
    int node_total = 0;
    Protocol protocol = Protocol::Epidemic;
    std::uint64_t seed = 0;
    int true_detections = 0;
    int false_detections = 0;
    double success_rate = 0.0;
    double false_alarm_rate = 0.0;
    double mean_detection_time = -1.0;
    double wall_time = 0.0;
};

// Cumulative confirmed counts after each detector pass of one run.
struct SeriesPoint {
    int node_total = 0;
    Protocol protocol = Protocol::Epidemic;
    std::uint64_t seed = 0;
    double time = 0.0;
    int confirmed_true = 0;
    int confirmed_false = 0;
};

struct MatrixResult {
    std::vector<ResultRow> rows;
    std::vector<SeriesPoint> series;
};

// Derives the per-cell scenario config (total node count includes the
// wormhole endpoints).
ScenarioConfig cell_config(const ScenarioConfig& base, int node_total, Protocol protocol,
                           std::uint64_t seed);

// Runs every (node_total x protocol x seed) cell. All cell configs are
// validated before anything runs. Duplicate cells are computed once
// and duplicated in the output. workers <= 0 reads WDS_WORKERS, then
// falls back to the hardware thread count.
MatrixResult run_matrix(const ExperimentMatrix& matrix, int workers = 0);

struct SummaryCell {
    Protocol protocol = Protocol::Epidemic;
    int node_total = 0;
    int runs = 0;
    double true_det_mean = 0.0, true_det_std = 0.0;
    double false_det_mean = 0.0, false_det_std = 0.0;
    double success_mean = 0.0, success_std = 0.0;
    double false_alarm_mean = 0.0, false_alarm_std = 0.0;
    // Over rows that detected anything; -1 when none did.
    double detection_time_mean = -1.0, detection_time_std = 0.0;
};

std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows);

// CSV (de)serialization; `report` must be able to re-read its own output.
std::string results_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_csv(const std::string& text);
std::string series_to_csv(const std::vector<SeriesPoint>& series);
std::vector<SeriesPoint> series_from_csv(const std::string& text);
std::string summary_to_csv(const std::vector<SummaryCell>& cells);

// Mean cumulative detection-success percentage over time per
// (protocol, node_total): rows time,protocol,node_total,success_pct.
std::string success_over_time_csv(const std::vector<SeriesPoint>& series, int preset_pairs);

} // namespace wds

#endif
