#pragma once

#include "admsched/admissibility.hpp"
#include "admsched/diagnostics.hpp"
#include "admsched/rng.hpp"
#include "admsched/scheduling.hpp"
#include "admsched/traffic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace admsched {

struct TraceRecord {
    std::uint64_t t = 0;
    std::uint64_t total_after = 0;  // Y(t,H)
    std::uint64_t arrived = 0;      // A(t-1,H)
    std::uint64_t removed = 0;      // R(t,H)
    bool is_empty = false;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct DiagnosticsSample {
    std::uint64_t t = 0;
    std::uint64_t total = 0;
    double V = 0.0;
    double J = 0.0;
    double log_w = 0.0;

    friend bool operator==(const DiagnosticsSample&, const DiagnosticsSample&) = default;
};

/// Independent RNG streams of one run.
struct SlotStreams {
    Engine arrivals;
    Engine scheduler;

    explicit SlotStreams(std::uint64_t seed)
        : arrivals(make_stream(seed, "arrivals")), scheduler(make_stream(seed, "scheduler"))
    {
    }
};

/// One slot: arrivals A(t-1) join the state, forming Y(t^-), then the
/// scheduler removes R(t) from Y(t^-). The record reports post-removal totals.
TraceRecord step(Configuration& state, std::uint64_t t, const ArrivalSpec& traffic, const Scheduler& scheduler,
                 const AdmissibilityModel& model, SlotStreams& rng);

struct RunSpec {
    AdmissibilityModel model = PairwiseDistance::make(0.49);
    Partition partition = build_partition(0.49);
    ArrivalSpec traffic;
    Scheduler scheduler = RandomScheduler{};
    std::uint64_t slots = 0;
    std::uint64_t seed = 0;
    std::uint64_t thinning = 1;      // record every thinning-th slot (and every empty visit)
    bool diagnostics = false;        // V, J, log w every thinning-th slot
    Configuration initial;

    /// Throws std::invalid_argument on an inconsistent spec.
    void validate() const;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    std::vector<DiagnosticsSample> diagnostics;
    /// (1/t) sum_{s<=t} J(Y(s)) at each recorded slot, J from every slot.
    std::vector<double> j_running_mean;
    Configuration final_configuration;
    std::uint64_t empty_visits = 0;
    std::uint64_t seed = 0;
    std::uint64_t thinning = 1;
};

/// Optional per-slot observer, called with every record (thinned or not).
using SlotObserver = std::function<void(const TraceRecord&)>;

/// Iterates step() from the initial configuration; deterministic given the seed.
RunResult run(const RunSpec& spec, const SlotObserver& observer = {});

struct StabilityReport {
    double tail_slope = 0.0;   // least-squares slope of total over the second half
    double r_squared = 0.0;    // 0 for a constant tail
    std::uint64_t empty_visits = 0;
    double tail_mean = 0.0;
    double j_time_avg = 0.0;   // last value of the running J average, when available
};

/// Detectors over on-grid records (t multiple of `thinning`).
/// Throws std::invalid_argument for fewer than 100 on-grid records.
StabilityReport stability_detectors(std::span<const TraceRecord> trace, std::uint64_t thinning = 1,
                                    std::span<const double> j_running_mean = {});

StabilityReport stability_detectors(const RunResult& run);

} // namespace admsched
