#include "admsched/scheduling.hpp"

#include <algorithm>
#include <stdexcept>

namespace admsched {

RemovalOutcome random_admissible_step(const AdmissibilityModel& model, const Configuration& y, Engine& eng)
{
    return sample_admissible_subset(model, y, eng);
}

RemovalOutcome priority_maximal_step(const AdmissibilityModel& model, const Configuration& y, Location zeta)
{
    const auto* pw = std::get_if<PairwiseDistance>(&model);
    if (!pw)
        throw std::invalid_argument("priority scheduling is defined for the circle protocol model only");

    RemovalOutcome out;
    const auto ps = y.particles();
    const std::size_t n = ps.size();
    if (n == 0)
        return out;

    // First particle at or after zeta; ids break ties because ps is sorted by (x, id).
    const auto start = static_cast<std::size_t>(
        std::lower_bound(ps.begin(), ps.end(), zeta.value(),
                         [](const Particle& p, double z) { return p.location.value() < z; }) -
        ps.begin());

    std::vector<Location> taken;
    for (std::size_t k = 0; k < n; ++k) {
        if (taken.size() == static_cast<std::size_t>(pw->mu))
            break; // nothing larger is admissible
        const Particle& cand = ps[(start + k) % n];
        const bool compatible = std::all_of(taken.begin(), taken.end(),
                                            [&](Location t) { return circ_distance(t, cand.location) >= pw->r; });
        if (!compatible || !size_allowed(model, taken.size() + 1))
            continue;
        taken.push_back(cand.location);
        out.removed.push_back(cand.id);
    }
    return out;
}

RemovalOutcome schedule(const Scheduler& scheduler, const AdmissibilityModel& model, const Configuration& y,
                        Engine& eng)
{
    if (const auto* pr = std::get_if<PriorityScheduler>(&scheduler))
        return priority_maximal_step(model, y, pr->zeta);
    return random_admissible_step(model, y, eng);
}

} // namespace admsched
