#ifndef WDS_ENGINE_HPP
#define WDS_ENGINE_HPP

#include "wds/config.hpp"
#include "wds/detector.hpp"
#include "wds/trace.hpp"

namespace wds {

// Engine event kinds; ties at equal times break on this ordinal, then
// on insertion order.
enum class EventKind : int {
    Tick = 0,
    MessageCreate = 1,
    TransferComplete = 2,
    ReportToTpa = 3,
    DetectorRun = 4,
};

struct SimResult {
    EventTrace trace;
    DetectionReport report;
    RunnerResult detector; // pass times and cumulative confirmations
};

// Runs one scenario start to finish. Deterministic: identical config
// (including seed) gives a byte-identical serialized trace.
SimResult run_simulation(const ScenarioConfig& cfg);

// Re-runs only the detector over a persisted trace.
RunnerResult replay_detector(const EventTrace& trace, const DetectorParams& params);

} // namespace wds

#endif
