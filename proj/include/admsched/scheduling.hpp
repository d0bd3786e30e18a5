#pragma once

#include "admsched/admissibility.hpp"
#include "admsched/rng.hpp"
#include "admsched/sampler.hpp"

#include <variant>

namespace admsched {

struct RandomScheduler {};

struct PriorityScheduler {
    Location zeta;
};

using Scheduler = std::variant<RandomScheduler, PriorityScheduler>;

/// Uniformly random admissible subset of y (the caller deletes it).
RemovalOutcome random_admissible_step(const AdmissibilityModel& model, const Configuration& y, Engine& eng);

/// Maximal scheduling with priorities: scan particles anticlockwise
/// (increasing coordinate) from zeta, ties by id, and take each one that is
/// compatible with everything taken so far. The result is admissible and
/// maximal. Throws std::invalid_argument for non-protocol models.
RemovalOutcome priority_maximal_step(const AdmissibilityModel& model, const Configuration& y, Location zeta);

RemovalOutcome schedule(const Scheduler& scheduler, const AdmissibilityModel& model, const Configuration& y,
                        Engine& eng);

} // namespace admsched
