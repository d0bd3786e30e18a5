#pragma once

#include "admsched/admissibility.hpp"
#include "admsched/bigint.hpp"
#include "admsched/rng.hpp"

#include <functional>
#include <map>
#include <vector>

namespace admsched {

/// Number of admissible particle subsets of a configuration, the empty set
/// included. by_size[s] counts subsets of exactly s particles, s = 0..mu.
struct SubsetCount {
    BigInt total;
    std::vector<BigInt> by_size;
};

struct RemovalOutcome {
    std::vector<ParticleId> removed;

    std::size_t removed_count() const { return removed.size(); }
};

/// Largest configuration accepted by the exhaustive routines.
inline constexpr std::size_t brute_force_limit = 20;

/// Exact count of admissible particle subsets. Particles at one location are
/// distinguishable, so a location holding m particles contributes m choices.
/// Protocol model: anchored chain DP, O(n * window * mu) and O(n) when mu <= 2.
/// Region graph: sum over independent region sets S of prod_{k in S} x_k.
SubsetCount count_admissible_subsets(const AdmissibilityModel& model, const Configuration& y);

/// Draws one admissible particle subset uniformly at random (each with
/// probability 1/total) by roulette over exact per-anchor counts followed by
/// conditional-count extension. Equal coordinates are ordered by particle id.
RemovalOutcome sample_admissible_subset(const AdmissibilityModel& model, const Configuration& y, Engine& eng);

struct RemovalMarginals {
    BigInt total;
    std::vector<BigInt> containing;  // admissible subsets containing particle i (configuration order)
    std::vector<Rational> particle;  // containing[i] / total
    std::vector<Rational> region;    // p_k: probability the removal touches region k
};

/// Exact inclusion probabilities of every particle and region under the
/// uniform removal. Throws std::out_of_range if p does not cover a particle.
RemovalMarginals removal_marginals(const AdmissibilityModel& model, const Configuration& y, const Partition& p);

/// Sorted region indices.
using RegionSet = std::vector<int>;

/// v_S: admissible particle subsets with exactly one particle in each region
/// of S and none elsewhere; only sets with v_S > 0 are listed (plus the empty
/// set). Protocol model requires y.size() <= brute_force_limit.
std::map<RegionSet, BigInt> v_S_counts(const AdmissibilityModel& model, const Configuration& y, const Partition& p);

/// q_S = v_S / sum_T v_T; absent keys have q_S = 0.
std::map<RegionSet, Rational> q_S_exact(const AdmissibilityModel& model, const Configuration& y, const Partition& p);

/// Every admissible subset, as ids sorted in configuration order; the empty
/// set first. Throws std::length_error if y.size() > brute_force_limit.
std::vector<std::vector<ParticleId>> brute_force_enumerate(const AdmissibilityModel& model, const Configuration& y);

} // namespace admsched
