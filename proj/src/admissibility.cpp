#include "admsched/admissibility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace admsched {

Configuration::Configuration(std::vector<Particle> particles) : particles_(std::move(particles))
{
    std::unordered_set<ParticleId> seen;
    for (const auto& p : particles_) {
        if (!seen.insert(p.id).second)
            throw std::invalid_argument("duplicate particle id " + std::to_string(p.id));
        next_id_ = std::max(next_id_, p.id + 1);
    }
    std::sort(particles_.begin(), particles_.end(), particle_order);
}

Configuration Configuration::from_locations(std::span<const double> xs)
{
    std::vector<Particle> ps;
    ps.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        ps.push_back({static_cast<ParticleId>(i), Location(xs[i])});
    return Configuration(std::move(ps));
}

ParticleId Configuration::add(std::span<const Location> locations)
{
    const ParticleId first = next_id_;
    if (locations.empty())
        return first;
    if (locations.size() <= 4) {
        for (Location loc : locations) {
            const Particle p{next_id_++, loc};
            particles_.insert(std::upper_bound(particles_.begin(), particles_.end(), p, particle_order), p);
        }
        return first;
    }
    std::vector<Particle> fresh;
    fresh.reserve(locations.size());
    for (Location loc : locations)
        fresh.push_back({next_id_++, loc});
    std::sort(fresh.begin(), fresh.end(), particle_order);
    const auto mid = particles_.size();
    particles_.insert(particles_.end(), fresh.begin(), fresh.end());
    std::inplace_merge(particles_.begin(), particles_.begin() + static_cast<std::ptrdiff_t>(mid), particles_.end(),
                       particle_order);
    return first;
}

std::size_t Configuration::erase(std::span<const ParticleId> ids)
{
    if (ids.empty())
        return 0;
    const auto before = particles_.size();
    if (ids.size() <= 8) {
        std::erase_if(particles_, [&](const Particle& p) { return std::find(ids.begin(), ids.end(), p.id) != ids.end(); });
    } else {
        std::unordered_set<ParticleId> doomed(ids.begin(), ids.end());
        std::erase_if(particles_, [&](const Particle& p) { return doomed.count(p.id) > 0; });
    }
    return before - particles_.size();
}

std::optional<std::size_t> Configuration::index_of(ParticleId id) const
{
    for (std::size_t i = 0; i < particles_.size(); ++i)
        if (particles_[i].id == id)
            return i;
    return std::nullopt;
}

std::vector<double> Configuration::locations() const
{
    std::vector<double> out;
    out.reserve(particles_.size());
    for (const auto& p : particles_)
        out.push_back(p.location.value());
    return out;
}

PairwiseDistance PairwiseDistance::make(double r)
{
    PairwiseDistance m;
    m.r = r;
    m.mu = mu_for_radius(r); // validates r
    if (inverse_is_integer(r))
        m.forbid_size = static_cast<int>(std::lround(1.0 / r));
    return m;
}

RegionGraph::RegionGraph(int K, std::vector<std::pair<int, int>> edges)
    : K_(K), edges_(std::move(edges)), partition_(Partition::contiguous(1, 1))
{
    if (K_ < 1 || K_ > max_regions)
        throw std::invalid_argument("region graph needs 1 <= K <= " + std::to_string(max_regions));
    adj_.assign(static_cast<std::size_t>(K_), 0U);
    for (auto [a, b] : edges_) {
        if (a < 0 || b < 0 || a >= K_ || b >= K_)
            throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        if (a == b)
            throw std::invalid_argument("self-loop on region " + std::to_string(a));
        adj_[static_cast<std::size_t>(a)] |= 1U << b;
        adj_[static_cast<std::size_t>(b)] |= 1U << a;
    }
    const std::uint32_t full = K_ == 32 ? ~0U : ((1U << K_) - 1U);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
        if (independent(mask)) {
            independent_.push_back(mask);
            mu_ = std::max(mu_, std::popcount(mask));
        }
        if (mask == full)
            break;
    }
    if (K_ % mu_ != 0)
        throw std::invalid_argument("K=" + std::to_string(K_) + " is not a multiple of the independence number " +
                                    std::to_string(mu_));
    for (int b = 0; b < K_ / mu_; ++b) {
        const std::uint32_t block = ((1U << mu_) - 1U) << (b * mu_);
        if (!independent(block))
            throw std::invalid_argument("block " + std::to_string(b) + " of " + std::to_string(mu_) +
                                        " consecutive regions is not independent");
    }
    partition_ = Partition::contiguous(K_, mu_);
}

bool RegionGraph::independent(std::uint32_t mask) const
{
    for (std::uint32_t m = mask; m != 0; m &= m - 1) {
        const int i = std::countr_zero(m);
        if (adj_[static_cast<std::size_t>(i)] & mask)
            return false;
    }
    return true;
}

namespace {

bool pairwise_admissible(const PairwiseDistance& m, std::span<const Particle> subset)
{
    if (m.forbid_size && subset.size() == static_cast<std::size_t>(*m.forbid_size))
        return false;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            if (circ_distance(subset[i].location, subset[j].location) < m.r)
                return false;
    return true;
}

bool graph_admissible(const RegionGraph& g, std::span<const Particle> subset)
{
    std::uint32_t occupied = 0;
    for (const auto& p : subset) {
        const auto bit = 1U << g.partition().region_of(p.location);
        if (occupied & bit)
            return false;
        occupied |= bit;
    }
    return g.independent(occupied);
}

} // namespace

bool is_admissible(const AdmissibilityModel& model, std::span<const Particle> subset)
{
    if (subset.empty())
        return true;
    return std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, PairwiseDistance>)
                return pairwise_admissible(m, subset);
            else
                return graph_admissible(m, subset);
        },
        model);
}

int max_admissible_size(const AdmissibilityModel& model)
{
    if (const auto* pw = std::get_if<PairwiseDistance>(&model))
        return pw->mu;
    return std::get<RegionGraph>(model).mu();
}

bool size_allowed(const AdmissibilityModel& model, std::size_t size)
{
    if (size > static_cast<std::size_t>(max_admissible_size(model)))
        return false;
    if (const auto* pw = std::get_if<PairwiseDistance>(&model))
        return !(pw->forbid_size && size == static_cast<std::size_t>(*pw->forbid_size));
    return true;
}

} // namespace admsched
