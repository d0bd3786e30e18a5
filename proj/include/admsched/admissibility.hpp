#pragma once

#include "admsched/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace admsched {

using ParticleId = std::uint64_t;

struct Particle {
    ParticleId id = 0;
    Location location;

    friend bool operator==(const Particle&, const Particle&) = default;
};

/// Orders particles by location, then id. Every sweep over a configuration
/// (counting DP, sampling, greedy priority scan) relies on this order.
inline bool particle_order(const Particle& a, const Particle& b)
{
    if (a.location.value() != b.location.value())
        return a.location.value() < b.location.value();
    return a.id < b.id;
}

/// Finite counting measure on the circle: a multiset of particle locations,
/// each particle carrying a unique id. Kept sorted by (location, id).
class Configuration {
public:
    Configuration() = default;

    /// Throws std::invalid_argument on duplicate ids.
    explicit Configuration(std::vector<Particle> particles);

    /// Particles at the given locations with ids 0, 1, 2, ...
    static Configuration from_locations(std::span<const double> xs);

    std::span<const Particle> particles() const { return particles_; }
    std::size_t size() const { return particles_.size(); }
    bool empty() const { return particles_.empty(); }
    const Particle& operator[](std::size_t i) const { return particles_[i]; }

    /// Next id handed out by add(); always larger than every id ever present.
    ParticleId next_id() const { return next_id_; }

    /// Adds particles at the given locations with fresh ids; returns the first id used.
    ParticleId add(std::span<const Location> locations);

    /// Removes the particles with the given ids; returns how many were found.
    std::size_t erase(std::span<const ParticleId> ids);

    /// Position of the particle with this id in particles(), if present.
    std::optional<std::size_t> index_of(ParticleId id) const;

    std::vector<double> locations() const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::vector<Particle> particles_;
    ParticleId next_id_ = 0;
};

/// Protocol model on the circle: a set may transmit together iff all pairwise
/// circular distances are at least r. When 1/r is an integer, sets of exactly
/// 1/r particles are additionally forbidden.
struct PairwiseDistance {
    double r = 0.5;
    int mu = 1;
    std::optional<int> forbid_size;

    /// Throws std::invalid_argument unless 0 < r < 1.
    static PairwiseDistance make(double r);
};

/// Abstract model: K regions with a conflict graph; a set is admissible iff
/// it has at most one particle per region and its regions are independent.
class RegionGraph {
public:
    static constexpr int max_regions = 20;

    /// Validates the graph: K <= max_regions, edges between distinct regions,
    /// K a multiple of the independence number mu, and every block of mu
    /// consecutive regions independent. Throws std::invalid_argument.
    RegionGraph(int K, std::vector<std::pair<int, int>> edges);

    int K() const { return K_; }
    int mu() const { return mu_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool adjacent(int i, int j) const { return (adj_[static_cast<std::size_t>(i)] >> j) & 1U; }
    bool independent(std::uint32_t mask) const;

    /// Every independent region set as a bitmask, the empty set first.
    const std::vector<std::uint32_t>& independent_sets() const { return independent_; }

    /// Contiguous partition [i/K, (i+1)/K) that maps particles to regions.
    const Partition& partition() const { return partition_; }

private:
    int K_;
    int mu_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::uint32_t> independent_;
    Partition partition_;
};

using AdmissibilityModel = std::variant<PairwiseDistance, RegionGraph>;

/// The admissibility function F evaluated on a set of particles.
bool is_admissible(const AdmissibilityModel& model, std::span<const Particle> subset);

inline bool is_admissible(const AdmissibilityModel& model, const Configuration& subset)
{
    return is_admissible(model, subset.particles());
}

/// Largest admissible set size mu.
int max_admissible_size(const AdmissibilityModel& model);

/// Whether a particle subset of a given size can ever be admissible by size alone.
bool size_allowed(const AdmissibilityModel& model, std::size_t size);

} // namespace admsched
