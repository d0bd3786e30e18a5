#include "admsched/diagnostics.hpp"
#include "admsched/oracle.hpp"
#include "admsched/sampler.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

using namespace admsched;

namespace {

Configuration at(std::vector<double> xs)
{
    return Configuration::from_locations(xs);
}

std::uint64_t total_of(const AdmissibilityModel& m, const Configuration& y)
{
    return count_admissible_subsets(m, y).total.convert_to<std::uint64_t>();
}

// Frequency check within k standard errors of the binomial proportion.
bool near(double hits, double draws, double p, double k = 3.0)
{
    return std::abs(hits / draws - p) <= k * std::sqrt(p * (1 - p) / draws);
}

} // namespace

TEST_CASE("frozen subset counts")
{
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    CHECK(total_of(m, at({0.0, 0.3, 0.6})) == 4);
    CHECK(total_of(m, at({0.0, 0.5})) == 4);
    CHECK(total_of(m, at({0.1, 0.1, 0.7})) == 4);
    CHECK(total_of(m, at({})) == 1);

    std::vector<double> eighths;
    for (int i = 0; i < 8; ++i)
        eighths.push_back(i / 8.0);
    const auto c = count_admissible_subsets(PairwiseDistance::make(0.3), at(eighths));
    CHECK(c.total == 21);
    REQUIRE(c.by_size.size() == 4);
    CHECK(c.by_size[2] == 12);
    CHECK(c.by_size[3] == 0);
}

TEST_CASE("brute-force enumeration order")
{
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    const auto all = brute_force_enumerate(m, at({0.0, 0.3, 0.6}));
    const std::vector<std::vector<ParticleId>> expected{{}, {0}, {1}, {2}};
    CHECK(all == expected);
    const auto pair = brute_force_enumerate(m, at({0.0, 0.5}));
    CHECK(pair.size() == 4);
    CHECK(pair.back() == std::vector<ParticleId>{0, 1});

    std::vector<double> many(21, 0.5);
    CHECK_THROWS_AS(brute_force_enumerate(m, at(many)), std::length_error);
}

TEST_CASE("pair count matches a quadratic scan at scale")
{
    Engine eng = make_stream(11, "sampler-scale");
    for (double r : {0.49, 0.45, 0.5}) {
        std::vector<double> xs;
        for (int i = 0; i < 400; ++i)
            xs.push_back(uniform01(eng));
        const auto y = at(xs);
        const AdmissibilityModel m = PairwiseDistance::make(r);
        std::uint64_t pairs = 0;
        if (max_admissible_size(m) >= 2)
            for (std::size_t i = 0; i < y.size(); ++i)
                for (std::size_t j = i + 1; j < y.size(); ++j)
                    pairs += circ_distance(y[i].location, y[j].location) >= r;
        CHECK(total_of(m, y) == 1 + y.size() + pairs);
    }
}

// k-subsets of an n-cycle whose cyclic gaps are all >= d steps: (n/k) C(n-(d-1)k-1, k-1).
BigInt cycle_subsets(int n, int d, int k)
{
    if (k == 0)
        return 1;
    const int top = n - (d - 1) * k - 1;
    if (top < k - 1)
        return 0;
    BigInt c = 1;
    for (int i = 0; i < k - 1; ++i)
        c = c * (top - i) / (i + 1);
    return c * n / k;
}

TEST_CASE("evenly spaced points match the cycle formula")
{
    // n = 60 stays on the 128-bit path, n = 100 needs arbitrary precision.
    for (const auto [n, d] : {std::pair{60, 4}, std::pair{100, 6}}) {
        std::vector<double> xs;
        for (int i = 0; i < n; ++i)
            xs.push_back(i / static_cast<double>(n) + 1e-4);
        const AdmissibilityModel m = PairwiseDistance::make(0.0501);
        const auto c = count_admissible_subsets(m, at(xs));
        BigInt expected = 0;
        for (int k = 0; k <= 19; ++k) {
            const auto ck = cycle_subsets(n, d, k);
            expected += ck;
            CHECK(c.by_size[static_cast<std::size_t>(k)] == ck);
        }
        CHECK(c.total == expected);
        CHECK(c.total > BigInt(std::numeric_limits<std::uint64_t>::max() >> 40));
    }
}

TEST_CASE("sampler frequencies on small configurations")
{
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    const auto y = at({0.1, 0.1, 0.7});
    Engine eng = make_stream(3, "sampler-freq");
    std::map<std::vector<ParticleId>, double> hits;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        ++hits[sample_admissible_subset(m, y, eng).removed];
    CHECK(hits.size() == 4);
    for (const auto& [s, h] : hits)
        CHECK(near(h, draws, 0.25));

    const auto y2 = at({0.0, 0.5});
    double both = 0;
    for (int i = 0; i < draws; ++i)
        both += sample_admissible_subset(m, y2, eng).removed_count() == 2;
    CHECK(near(both, draws, 0.25));
}

TEST_CASE("sampler output is always admissible")
{
    Engine eng = make_stream(5, "sampler-prop");
    const std::vector<double> radii{0.2, 0.25, 0.3, 1.0 / 3.0, 0.4, 0.49, 0.5};
    for (int t = 0; t < 300; ++t) {
        const auto inst = random_circle_instance(eng, 1 + uniform_below(eng, std::uint64_t{40}), radii);
        const AdmissibilityModel m = inst.model;
        const auto out = sample_admissible_subset(m, inst.y, eng);
        std::vector<Particle> chosen;
        for (ParticleId id : out.removed)
            chosen.push_back(inst.y[*inst.y.index_of(id)]);
        CHECK(is_admissible(m, chosen));
    }
}

TEST_CASE("removal marginals")
{
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    const auto y = at({0.1, 0.1, 0.7});
    const auto p = build_partition(0.49);
    const auto mg = removal_marginals(m, y, p);
    CHECK(mg.total == 4);
    for (const auto& q : mg.particle)
        CHECK(q == Rational(1, 4));
    CHECK(mg.region[static_cast<std::size_t>(p.region_of(Location(0.1)))] == Rational(1, 2));
    CHECK(mg.region[static_cast<std::size_t>(p.region_of(Location(0.7)))] == Rational(1, 4));
}

TEST_CASE("q_S closed form and brute force")
{
    const RegionGraph g(2, {});
    const AdmissibilityModel gm = g;
    std::vector<double> xs;
    for (int i = 0; i < 5; ++i) {
        xs.push_back(0.1 + i * 0.01);
        xs.push_back(0.6 + i * 0.01);
    }
    const auto q = q_S_exact(gm, at(xs), g.partition());
    CHECK(q.at({0, 1}) == Rational(25, 36));

    std::vector<BigInt> big{BigInt(1000), BigInt(1000)};
    const auto marg = graph_region_marginals(g, big);
    CHECK(marg[0] == Rational(1000, 1001));

    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    const auto p = build_partition(0.49);
    const auto y = at({0.0, 0.5});
    const auto q2 = q_S_exact(m, y, p);
    CHECK(q2.at({0, 1}) == Rational(1, 4));
    const auto v = v_S_counts(m, y, p);
    CHECK(v.at({}) == 1);
    CHECK(v.at({0}) == 1);
}

TEST_CASE("counting mutation is detected by the oracle")
{
    OracleLimits lim;
    lim.trials = 30;
    lim.n_max = 8;
    const SubsetCounter off_by_one = [](const AdmissibilityModel& m, const Configuration& y) {
        auto c = count_admissible_subsets(m, y);
        c.total += 1;
        return c;
    };
    CHECK(check_counting(lim).passed);
    CHECK_FALSE(check_counting(lim, off_by_one).passed);

    const SubsetCounter drop_pairs = [](const AdmissibilityModel& m, const Configuration& y) {
        auto c = count_admissible_subsets(m, y);
        if (c.by_size.size() > 2) {
            c.total -= c.by_size[2];
            c.by_size[2] = 0;
        }
        return c;
    };
    CHECK_FALSE(check_counting(lim, drop_pairs).passed);
}
