#include <doctest.h>

#include <algorithm>

#include "wds/harness.hpp"

using namespace wds;

namespace {

// Small, fast base scenario for plumbing tests.
ScenarioConfig tiny_base() {
    return load_config(
        "area.width = 150\narea.height = 150\nnodes.legit = 6\nwormhole.pairs = 1\n"
        "radio.wormhole_range = 50\nsim.duration = 1200\n"
        "detector.warmup = 300\ndetector.audit_window = 300\n");
}

ExperimentMatrix tiny_matrix() {
    ExperimentMatrix m;
    m.base = tiny_base();
    m.node_totals = {8, 10};
    m.protocols = {Protocol::Epidemic, Protocol::FirstContact};
    m.seeds = {1, 2};
    return m;
}

bool rows_equal_modulo_walltime(const ResultRow& a, const ResultRow& b) {
    return a.node_total == b.node_total && a.protocol == b.protocol && a.seed == b.seed &&
           a.true_detections == b.true_detections && a.false_detections == b.false_detections &&
           a.success_rate == b.success_rate && a.false_alarm_rate == b.false_alarm_rate &&
           a.mean_detection_time == b.mean_detection_time;
}

} // namespace

TEST_CASE("matrix cardinality is totals x protocols x seeds") {
    const MatrixResult res = run_matrix(tiny_matrix(), 1);
    CHECK(res.rows.size() == 8);
}

TEST_CASE("duplicate seeds produce identical duplicate rows") {
    ExperimentMatrix m = tiny_matrix();
    m.node_totals = {8};
    m.protocols = {Protocol::Epidemic};
    m.seeds = {3, 3};
    const MatrixResult res = run_matrix(m, 1);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].wall_time == res.rows[1].wall_time); // computed once
    CHECK(rows_equal_modulo_walltime(res.rows[0], res.rows[1]));
    CHECK(res.rows[0].success_rate == res.rows[1].success_rate);
}

TEST_CASE("an invalid cell rejects the whole matrix before running") {
    ExperimentMatrix m = tiny_matrix();
    m.node_totals = {8, 2}; // 2 total - 2 endpoints = 0 legit with 1 pair
    CHECK_THROWS(run_matrix(m, 1));
}

TEST_CASE("parallel and sequential sweeps agree") {
    const MatrixResult seq = run_matrix(tiny_matrix(), 1);
    const MatrixResult par = run_matrix(tiny_matrix(), 4);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (size_t i = 0; i < seq.rows.size(); ++i)
        CHECK(rows_equal_modulo_walltime(seq.rows[i], par.rows[i]));
}

TEST_CASE("results CSV round-trips") {
    const MatrixResult res = run_matrix(tiny_matrix(), 1);
    const std::string csv = results_to_csv(res.rows);
    const std::vector<ResultRow> back = results_from_csv(csv);
    CHECK(results_to_csv(back) == csv);
}

TEST_CASE("series CSV round-trips and is monotone per run") {
    const MatrixResult res = run_matrix(tiny_matrix(), 1);
    const std::string csv = series_to_csv(res.series);
    const std::vector<SeriesPoint> back = series_from_csv(csv);
    CHECK(series_to_csv(back) == csv);

    for (size_t i = 1; i < res.series.size(); ++i) {
        const SeriesPoint& prev = res.series[i - 1];
        const SeriesPoint& cur = res.series[i];
        const bool same_run = prev.node_total == cur.node_total &&
                              prev.protocol == cur.protocol && prev.seed == cur.seed;
        if (same_run) {
            CHECK(cur.confirmed_true >= prev.confirmed_true);
            CHECK(cur.confirmed_false >= prev.confirmed_false);
        }
    }
}

TEST_CASE("summaries aggregate within row bounds") {
    const MatrixResult res = run_matrix(tiny_matrix(), 1);
    const std::vector<SummaryCell> cells = summarize(res.rows);
    CHECK(cells.size() == 4);
    for (const SummaryCell& c : cells) {
        double lo = 1e18, hi = -1e18;
        int n = 0;
        for (const ResultRow& r : res.rows) {
            if (r.protocol != c.protocol || r.node_total != c.node_total) continue;
            lo = std::min(lo, r.success_rate);
            hi = std::max(hi, r.success_rate);
            ++n;
        }
        CHECK(c.runs == n);
        CHECK(c.success_mean >= lo - 1e-9);
        CHECK(c.success_mean <= hi + 1e-9);
    }
}

TEST_CASE("summary arithmetic on hand rows") {
    ResultRow a;
    a.node_total = 58;
    a.protocol = Protocol::Epidemic;
    a.seed = 1;
    a.success_rate = 80.0;
    a.true_detections = 4;
    ResultRow b = a;
    b.seed = 2;
    b.success_rate = 100.0;
    b.true_detections = 5;
    SUBCASE("single row mean equals the row with zero spread") {
        const auto cells = summarize({a});
        REQUIRE(cells.size() == 1);
        CHECK(cells[0].success_mean == doctest::Approx(80.0));
        CHECK(cells[0].success_std == doctest::Approx(0.0));
    }
    SUBCASE("two rows average") {
        const auto cells = summarize({a, b});
        REQUIRE(cells.size() == 1);
        CHECK(cells[0].success_mean == doctest::Approx(90.0));
        CHECK(cells[0].true_det_mean == doctest::Approx(4.5));
    }
}

TEST_CASE("summary CSV has one line per cell") {
    const MatrixResult res = run_matrix(tiny_matrix(), 1);
    const std::string csv = summary_to_csv(summarize(res.rows));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 4 cells
}
