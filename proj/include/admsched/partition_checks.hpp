#pragma once

#include "admsched/admissibility.hpp"
#include "admsched/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace admsched {

/// True iff every choice of one location per region of S is admissible.
/// Protocol model: |S| is an allowed size and all pairwise region distances
/// are >= r. Region graph: S is independent. The empty set is guaranteed.
bool is_guaranteed(const Partition& p, const AdmissibilityModel& model, std::span<const int> S);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PartitionReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    const CheckResult* find(const std::string& name) const;
};

/// Checks "cover" (disjoint, union [0,1), each of measure 1/K), "divisibility"
/// (K multiple of mu, mu equal to the model's), "blocks" (K/mu blocks of mu
/// distinct regions, each guaranteed), "exclusivity" (two particles in one
/// region never co-removable) and "forbidden_size" (protocol model with
/// integer 1/r rejects sets of size 1/r).
PartitionReport validate_partition(const Partition& p, const AdmissibilityModel& model);

} // namespace admsched
