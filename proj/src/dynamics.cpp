#include "admsched/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace admsched {

namespace {

struct SlotChange {
    std::vector<Location> arrived;
    std::vector<Location> removed;
};

TraceRecord step_impl(Configuration& state, std::uint64_t t, const ArrivalSpec& traffic, const Scheduler& scheduler,
                      const AdmissibilityModel& model, SlotStreams& rng, SlotChange* change)
{
    TraceRecord rec;
    rec.t = t;

    std::vector<Location> arriving;
    for (const auto& batch : sample_arrivals(traffic, rng.arrivals))
        arriving.insert(arriving.end(), batch.size, batch.location);
    state.add(arriving);
    rec.arrived = arriving.size();

    const auto removal = schedule(scheduler, model, state, rng.scheduler);
    if (change) {
        change->arrived = std::move(arriving);
        change->removed.clear();
        for (ParticleId id : removal.removed)
            change->removed.push_back(state[*state.index_of(id)].location);
    }
    rec.removed = state.erase(removal.removed);
    if (rec.removed != removal.removed.size())
        throw std::logic_error("scheduler removed a particle that is not in the configuration");
    rec.total_after = state.size();
    rec.is_empty = state.empty();
    return rec;
}

// Region occupancy with J = sum_{x_k>1} log x_k kept current.
class OccupancyTracker {
public:
    OccupancyTracker(const Partition& p, const Configuration& y) : partition_(p), x_(region_counts(y, p))
    {
        for (auto xk : x_)
            j_ += lg(xk);
    }

    void add(Location loc)
    {
        auto& xk = x_[static_cast<std::size_t>(partition_.region_of(loc))];
        j_ += lg(xk + 1) - lg(xk);
        ++xk;
    }

    void remove(Location loc)
    {
        auto& xk = x_[static_cast<std::size_t>(partition_.region_of(loc))];
        j_ += lg(xk - 1) - lg(xk);
        --xk;
    }

    double J() const { return j_; }
    const RegionCounts& counts() const { return x_; }

private:
    static double lg(std::uint64_t m) { return m > 1 ? std::log(static_cast<double>(m)) : 0.0; }

    const Partition& partition_;
    RegionCounts x_;
    double j_ = 0.0;
};

} // namespace

TraceRecord step(Configuration& state, std::uint64_t t, const ArrivalSpec& traffic, const Scheduler& scheduler,
                 const AdmissibilityModel& model, SlotStreams& rng)
{
    return step_impl(state, t, traffic, scheduler, model, rng, nullptr);
}

void RunSpec::validate() const
{
    traffic.validate();
    if (thinning < 1)
        throw std::invalid_argument("thinning must be >= 1");
    if (std::holds_alternative<PriorityScheduler>(scheduler) && !std::holds_alternative<PairwiseDistance>(model))
        throw std::invalid_argument("priority scheduling requires the circle protocol model");
    if (partition.mu() != max_admissible_size(model))
        throw std::invalid_argument("partition mu differs from the model's maximum admissible size");
    if (const auto* g = std::get_if<RegionGraph>(&model); g && g->K() != partition.K())
        throw std::invalid_argument("partition K differs from the region graph's K");
}

RunResult run(const RunSpec& spec, const SlotObserver& observer)
{
    spec.validate();
    RunResult out;
    out.seed = spec.seed;
    out.thinning = spec.thinning;

    Configuration state = spec.initial;
    SlotStreams rng(spec.seed);
    OccupancyTracker occupancy(spec.partition, state);
    SlotChange change;
    double j_sum = 0.0;

    for (std::uint64_t t = 1; t <= spec.slots; ++t) {
        const TraceRecord rec = step_impl(state, t, spec.traffic, spec.scheduler, spec.model, rng, &change);
        for (Location loc : change.arrived)
            occupancy.add(loc);
        for (Location loc : change.removed)
            occupancy.remove(loc);
        j_sum += occupancy.J();

        if (rec.is_empty)
            ++out.empty_visits;
        if (observer)
            observer(rec);
        if (t % spec.thinning == 0 || rec.is_empty) {
            out.trace.push_back(rec);
            out.j_running_mean.push_back(j_sum / static_cast<double>(t));
            if (spec.diagnostics && t % spec.thinning == 0) {
                const auto& x = occupancy.counts();
                out.diagnostics.push_back({t, rec.total_after, lyapunov_V<std::uint64_t>(x), occupancy.J(),
                                           w_value(x, spec.partition, spec.model).log_w});
            }
        }
    }
    out.final_configuration = std::move(state);
    return out;
}

StabilityReport stability_detectors(std::span<const TraceRecord> trace, std::uint64_t thinning,
                                    std::span<const double> j_running_mean)
{
    if (thinning == 0)
        thinning = 1;
    std::vector<const TraceRecord*> grid;
    StabilityReport rep;
    for (const auto& r : trace) {
        if (r.is_empty)
            ++rep.empty_visits;
        if (r.t % thinning == 0)
            grid.push_back(&r);
    }
    if (grid.size() < 100)
        throw std::invalid_argument("stability detectors need at least 100 recorded slots, got " +
                                    std::to_string(grid.size()));

    const double half = static_cast<double>(grid.back()->t) / 2.0;
    double n = 0, st = 0, sy = 0;
    for (const auto* r : grid)
        if (static_cast<double>(r->t) > half) {
            n += 1;
            st += static_cast<double>(r->t);
            sy += static_cast<double>(r->total_after);
        }
    const double mt = st / n, my = sy / n;
    double stt = 0, syy = 0, sty = 0;
    for (const auto* r : grid)
        if (static_cast<double>(r->t) > half) {
            const double dt = static_cast<double>(r->t) - mt;
            const double dy = static_cast<double>(r->total_after) - my;
            stt += dt * dt;
            syy += dy * dy;
            sty += dt * dy;
        }
    rep.tail_mean = my;
    rep.tail_slope = stt > 0 ? sty / stt : 0.0;
    rep.r_squared = (stt > 0 && syy > 0) ? (sty * sty) / (stt * syy) : 0.0;
    if (!j_running_mean.empty())
        rep.j_time_avg = j_running_mean.back();
    return rep;
}

StabilityReport stability_detectors(const RunResult& run)
{
    auto rep = stability_detectors(run.trace, run.thinning, run.j_running_mean);
    rep.empty_visits = run.empty_visits;
    return rep;
}

} // namespace admsched
