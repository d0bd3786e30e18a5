#pragma once

#include "admsched/admissibility.hpp"
#include "admsched/bigint.hpp"
#include "admsched/geometry.hpp"
#include "admsched/rng.hpp"
#include "admsched/sampler.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace admsched {

// Cross-checks of the fast routines against exhaustive enumeration.

struct OracleLimits {
    std::size_t n_max = 14;        // particles per random instance: uniform in [0, n_max]
    std::size_t trials = 200;      // random instances per check
    std::size_t draws = 200'000;   // sampler draws for the uniformity test
    std::uint64_t seed = 20'240'501;
    std::vector<double> radii{0.2, 0.33, 0.49, 0.5};  // radii of the random circle instances
};

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::size_t instances = 0;
    std::string detail;
};

struct OracleReport {
    std::vector<OracleCheck> checks;

    bool ok() const;
};

/// A circle-model instance with the partition built from its radius.
struct CircleInstance {
    double r = 0.0;
    PairwiseDistance model;
    Partition partition;
    Configuration y;
};

/// Random instance with exactly n particles. Locations mix continuous draws,
/// a coarse grid (exact ties and boundary distances) and tight clusters.
CircleInstance random_circle_instance(Engine& eng, std::size_t n, std::span<const double> radii);

/// A region-graph state with huge counts, together with its load.
struct GraphState {
    RegionGraph graph;
    std::vector<BigInt> x;
    double lambda_beta = 0.0;
    double eps = 0.0;
};

/// Random valid region graph and a state drawn inside B(eps).
GraphState random_graph_state(Engine& eng);

using SubsetCounter = std::function<SubsetCount(const AdmissibilityModel&, const Configuration&)>;

OracleCheck check_counting(const OracleLimits& limits, const SubsetCounter& counter = count_admissible_subsets);
OracleCheck check_marginals(const OracleLimits& limits);
OracleCheck check_uniformity(const OracleLimits& limits);
OracleCheck check_region_sets(const OracleLimits& limits);
OracleCheck check_log_weight(const OracleLimits& limits);
OracleCheck check_drift_bound(const OracleLimits& limits);
OracleCheck check_partitions();

OracleReport run_oracle(const OracleLimits& limits);

/// One line per check: PASS/FAIL, name, instance count, detail.
void print_report(std::ostream& os, const OracleReport& report);

} // namespace admsched
