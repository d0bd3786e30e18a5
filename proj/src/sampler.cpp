#include "admsched/sampler.hpp"

#include "admsched/detail/circle_chains.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace admsched {

namespace {

using detail::CircleChains;

// Counts are bounded by sum_{s <= mu} C(n, s) <= (n+1)^mu.
bool fits_u128(std::size_t n, int mu)
{
    return static_cast<double>(mu) * std::log2(static_cast<double>(n) + 2.0) < 124.0;
}

template <class Int>
std::vector<Int> circle_by_size(const CircleChains& cc, const PairwiseDistance& m)
{
    std::vector<Int> by(static_cast<std::size_t>(m.mu) + 1, Int(0));
    by[0] = Int(1);
    const std::size_t n = cc.size();
    if (n == 0)
        return by;
    by[1] = Int(static_cast<std::uint64_t>(n));
    if (m.mu == 2) {
        std::uint64_t pairs = 0;
        for (std::size_t a = 0; a < n; ++a)
            pairs += cc.pair_count(a);
        by[2] = Int(pairs);
    } else if (m.mu > 2) {
        for (std::size_t a = 0; a < n; ++a) {
            const auto c = cc.anchor_counts<Int>(a);
            for (int s = 2; s <= m.mu; ++s)
                by[static_cast<std::size_t>(s)] += c[static_cast<std::size_t>(s)];
        }
    }
    for (int s = 0; s <= m.mu; ++s)
        if (m.forbid_size && s == *m.forbid_size)
            by[static_cast<std::size_t>(s)] = Int(0);
    return by;
}

std::vector<std::uint64_t> region_occupancy(const Configuration& y, const Partition& p)
{
    std::vector<std::uint64_t> x(static_cast<std::size_t>(p.K()), 0);
    for (const auto& particle : y.particles())
        ++x[static_cast<std::size_t>(p.region_of(particle.location))];
    return x;
}

template <class Int>
Int mask_weight(std::uint32_t mask, const std::vector<std::uint64_t>& x)
{
    Int w(1);
    for (std::uint32_t m = mask; m != 0; m &= m - 1)
        w *= Int(x[static_cast<std::size_t>(std::countr_zero(m))]);
    return w;
}

template <class Int>
std::vector<Int> graph_by_size(const RegionGraph& g, const std::vector<std::uint64_t>& x)
{
    std::vector<Int> by(static_cast<std::size_t>(g.mu()) + 1, Int(0));
    for (std::uint32_t mask : g.independent_sets())
        by[static_cast<std::size_t>(std::popcount(mask))] += mask_weight<Int>(mask, x);
    return by;
}

template <class Int>
BigInt sum_big(const std::vector<Int>& v)
{
    BigInt total = 0;
    for (const auto& c : v)
        total += to_bigint(c);
    return total;
}

template <class Int>
SubsetCount to_count(const std::vector<Int>& by)
{
    SubsetCount out;
    for (const auto& c : by)
        out.by_size.push_back(to_bigint(c));
    out.total = sum_big(by);
    return out;
}

SubsetCount count_circle(const PairwiseDistance& m, const Configuration& y)
{
    const auto pos = y.locations();
    const CircleChains cc(pos, m.r, m.mu);
    if (fits_u128(pos.size(), m.mu))
        return to_count(circle_by_size<u128>(cc, m));
    return to_count(circle_by_size<BigInt>(cc, m));
}

SubsetCount count_graph(const RegionGraph& g, const Configuration& y)
{
    const auto x = region_occupancy(y, g.partition());
    if (fits_u128(y.size(), g.mu()))
        return to_count(graph_by_size<u128>(g, x));
    return to_count(graph_by_size<BigInt>(g, x));
}

// -- sampling ----------------------------------------------------------------

template <class Int>
RemovalOutcome sample_circle_general(const PairwiseDistance& m, const Configuration& y, const CircleChains& cc,
                                     Engine& eng)
{
    const std::size_t n = y.size();
    std::vector<std::vector<Int>> per_anchor(n);
    std::vector<Int> anchor_weight(n, Int(0));
    Int total(1); // empty set
    for (std::size_t a = 0; a < n; ++a) {
        per_anchor[a] = cc.anchor_counts<Int>(a);
        for (int s = 1; s <= m.mu; ++s)
            if (!(m.forbid_size && s == *m.forbid_size))
                anchor_weight[a] += per_anchor[a][static_cast<std::size_t>(s)];
        total += anchor_weight[a];
    }
    Int u = detail::draw_below(eng, total);
    if (u == Int(0))
        return {};
    u -= Int(1);
    std::size_t a = 0;
    for (; a < n; ++a) {
        if (u < anchor_weight[a])
            break;
        u -= anchor_weight[a];
    }
    int size = 1;
    for (; size <= m.mu; ++size) {
        if (m.forbid_size && size == *m.forbid_size)
            continue;
        const Int& c = per_anchor[a][static_cast<std::size_t>(size)];
        if (u < c)
            break;
        u -= c;
    }
    RemovalOutcome out;
    for (std::size_t idx : cc.sample_chain<Int>(a, size, eng))
        out.removed.push_back(y[idx].id);
    return out;
}

// mu <= 2: O(n) without per-anchor tables.
RemovalOutcome sample_circle_small(const PairwiseDistance& m, const Configuration& y, const CircleChains& cc,
                                   Engine& eng)
{
    const std::size_t n = y.size();
    const bool pairs_allowed = m.mu >= 2 && !(m.forbid_size && *m.forbid_size == 2);
    std::uint64_t pairs = 0;
    if (pairs_allowed)
        for (std::size_t a = 0; a < n; ++a)
            pairs += cc.pair_count(a);
    const std::uint64_t total = 1 + n + pairs;
    std::uint64_t u = uniform_below(eng, total);
    if (u == 0)
        return {};
    u -= 1;
    if (u < n)
        return {{y[static_cast<std::size_t>(u)].id}};
    u -= n;
    for (std::size_t a = 0; a < n; ++a) {
        const std::uint64_t c = cc.pair_count(a);
        if (u < c)
            return {{y[a].id, y[cc.nxt(a) + static_cast<std::size_t>(u)].id}};
        u -= c;
    }
    throw std::logic_error("pair roulette exhausted");
}

RemovalOutcome sample_circle(const PairwiseDistance& m, const Configuration& y, Engine& eng)
{
    if (y.empty())
        return {};
    const auto pos = y.locations();
    const CircleChains cc(pos, m.r, m.mu);
    if (m.mu <= 2)
        return sample_circle_small(m, y, cc, eng);
    if (fits_u128(pos.size(), m.mu))
        return sample_circle_general<u128>(m, y, cc, eng);
    return sample_circle_general<BigInt>(m, y, cc, eng);
}

template <class Int>
RemovalOutcome sample_graph_impl(const RegionGraph& g, const Configuration& y, Engine& eng)
{
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(g.K()));
    for (std::size_t i = 0; i < y.size(); ++i)
        members[static_cast<std::size_t>(g.partition().region_of(y[i].location))].push_back(i);
    std::vector<std::uint64_t> x(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
        x[k] = members[k].size();

    const auto& sets = g.independent_sets();
    std::vector<Int> weight(sets.size());
    Int total(0);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        weight[i] = mask_weight<Int>(sets[i], x);
        total += weight[i];
    }
    Int u = detail::draw_below(eng, total);
    std::size_t pick = 0;
    for (; pick < sets.size(); ++pick) {
        if (u < weight[pick])
            break;
        u -= weight[pick];
    }
    RemovalOutcome out;
    for (std::uint32_t mask = sets[pick]; mask != 0; mask &= mask - 1) {
        const auto& region = members[static_cast<std::size_t>(std::countr_zero(mask))];
        const auto k = uniform_below(eng, static_cast<std::uint64_t>(region.size()));
        out.removed.push_back(y[region[static_cast<std::size_t>(k)]].id);
    }
    return out;
}

RemovalOutcome sample_graph(const RegionGraph& g, const Configuration& y, Engine& eng)
{
    if (fits_u128(y.size(), g.mu()))
        return sample_graph_impl<u128>(g, y, eng);
    return sample_graph_impl<BigInt>(g, y, eng);
}

Configuration without(const Configuration& y, std::size_t skip)
{
    std::vector<Particle> ps;
    ps.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        if (i != skip)
            ps.push_back(y[i]);
    return Configuration(std::move(ps));
}

} // namespace

SubsetCount count_admissible_subsets(const AdmissibilityModel& model, const Configuration& y)
{
    if (const auto* pw = std::get_if<PairwiseDistance>(&model))
        return count_circle(*pw, y);
    return count_graph(std::get<RegionGraph>(model), y);
}

RemovalOutcome sample_admissible_subset(const AdmissibilityModel& model, const Configuration& y, Engine& eng)
{
    if (const auto* pw = std::get_if<PairwiseDistance>(&model))
        return sample_circle(*pw, y, eng);
    return sample_graph(std::get<RegionGraph>(model), y, eng);
}

RemovalMarginals removal_marginals(const AdmissibilityModel& model, const Configuration& y, const Partition& p)
{
    RemovalMarginals out;
    out.total = count_admissible_subsets(model, y).total;
    out.region.assign(static_cast<std::size_t>(p.K()), Rational(0));
    std::vector<BigInt> region_sum(static_cast<std::size_t>(p.K()), BigInt(0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        // Particles at one location have identical marginals.
        if (i > 0 && y[i].location == y[i - 1].location)
            out.containing.push_back(out.containing.back());
        else
            out.containing.push_back(out.total - count_admissible_subsets(model, without(y, i)).total);
        out.particle.emplace_back(out.containing.back(), out.total);
        region_sum[static_cast<std::size_t>(p.region_of(y[i].location))] += out.containing.back();
    }
    for (std::size_t k = 0; k < region_sum.size(); ++k)
        out.region[k] = Rational(region_sum[k], out.total);
    return out;
}

std::vector<std::vector<ParticleId>> brute_force_enumerate(const AdmissibilityModel& model, const Configuration& y)
{
    const std::size_t n = y.size();
    if (n > brute_force_limit)
        throw std::length_error("brute-force enumeration limited to " + std::to_string(brute_force_limit) +
                                " particles, got " + std::to_string(n));
    std::vector<std::vector<ParticleId>> out;
    std::vector<Particle> subset;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1U)
                subset.push_back(y[i]);
        if (is_admissible(model, subset)) {
            std::vector<ParticleId> ids;
            for (const auto& q : subset)
                ids.push_back(q.id);
            out.push_back(std::move(ids));
        }
    }
    return out;
}

std::map<RegionSet, BigInt> v_S_counts(const AdmissibilityModel& model, const Configuration& y, const Partition& p)
{
    std::map<RegionSet, BigInt> v;
    if (const auto* g = std::get_if<RegionGraph>(&model)) {
        const auto x = region_occupancy(y, p);
        for (std::uint32_t mask : g->independent_sets()) {
            const BigInt w = mask_weight<BigInt>(mask, x);
            if (w == 0)
                continue;
            RegionSet s;
            for (std::uint32_t m = mask; m != 0; m &= m - 1)
                s.push_back(std::countr_zero(m));
            v[s] = w;
        }
        return v;
    }

    for (const auto& ids : brute_force_enumerate(model, y)) {
        RegionSet s;
        for (ParticleId id : ids)
            s.push_back(p.region_of(y[*y.index_of(id)].location));
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::logic_error("admissible subset with two particles in one region; partition is not exclusive");
        v[s] += 1;
    }
    return v;
}

std::map<RegionSet, Rational> q_S_exact(const AdmissibilityModel& model, const Configuration& y, const Partition& p)
{
    const auto v = v_S_counts(model, y, p);
    BigInt total = 0;
    for (const auto& [s, c] : v)
        total += c;
    std::map<RegionSet, Rational> q;
    for (const auto& [s, c] : v)
        q[s] = Rational(c, total);
    return q;
}

} // namespace admsched
