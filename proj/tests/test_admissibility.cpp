#include "admsched/admissibility.hpp"

#include <doctest.h>

#include <stdexcept>
#include <vector>

using namespace admsched;

namespace {

Configuration at(std::vector<double> xs)
{
    return Configuration::from_locations(xs);
}

} // namespace

TEST_CASE("configuration keeps (location, id) order")
{
    auto y = at({0.7, 0.1, 0.1, 0.4});
    REQUIRE(y.size() == 4);
    CHECK(y[0].location.value() == 0.1);
    CHECK(y[0].id == 1);
    CHECK(y[1].id == 2);
    CHECK(y[3].location.value() == 0.7);

    std::vector<Location> fresh{Location(0.05), Location(0.4), Location(0.9)};
    const auto first = y.add(fresh);
    CHECK(first == 4);
    CHECK(y.size() == 7);
    CHECK(y[0].id == 4);
    CHECK(y.locations() == std::vector<double>{0.05, 0.1, 0.1, 0.4, 0.4, 0.7, 0.9});
    CHECK(y[3].id == 3);  // the older particle at 0.4 comes first
    CHECK(y[4].id == 5);

    std::vector<ParticleId> gone{1, 5, 99};
    CHECK(y.erase(gone) == 2);
    CHECK(y.size() == 5);
    CHECK_FALSE(y.index_of(1).has_value());
    CHECK(y.index_of(6).value() == 4);
}

TEST_CASE("duplicate ids are rejected")
{
    std::vector<Particle> ps{{1, Location(0.1)}, {1, Location(0.2)}};
    CHECK_THROWS_AS(Configuration{ps}, std::invalid_argument);
}

TEST_CASE("pairwise admissibility")
{
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    CHECK(is_admissible(m, at({0.0, 0.5})));
    CHECK_FALSE(is_admissible(m, at({0.0, 0.3})));
    CHECK(is_admissible(m, at({})));
    CHECK(is_admissible(m, at({0.42})));
    CHECK_FALSE(is_admissible(m, at({0.1, 0.1})));  // co-located particles conflict
    CHECK(max_admissible_size(m) == 2);
}

TEST_CASE("integer 1/r forbids sets of size 1/r")
{
    const AdmissibilityModel half = PairwiseDistance::make(0.5);
    CHECK_FALSE(is_admissible(half, at({0.0, 0.5})));
    CHECK(is_admissible(half, at({0.25})));
    CHECK(max_admissible_size(half) == 1);
    CHECK_FALSE(size_allowed(half, 2));

    const AdmissibilityModel fifth = PairwiseDistance::make(0.2);
    CHECK_FALSE(is_admissible(fifth, at({0.0, 0.2, 0.4, 0.6, 0.8})));
    CHECK(is_admissible(fifth, at({0.0, 0.25, 0.5, 0.75})));
    CHECK(max_admissible_size(fifth) == 4);
}

TEST_CASE("region graph validation")
{
    const RegionGraph free2(2, {});
    CHECK(free2.mu() == 2);
    CHECK(free2.independent_sets().size() == 4);
    CHECK(free2.independent_sets().front() == 0U);

    const RegionGraph complete3(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(complete3.mu() == 1);
    CHECK(complete3.independent_sets().size() == 4);

    // Path 0-1-2-3: independence number 2 but block {0,1} is an edge.
    CHECK_THROWS_AS(RegionGraph(4, {{0, 1}, {1, 2}, {2, 3}}), std::invalid_argument);
    // Triangle plus an isolated vertex: mu = 2 does not divide K = 3.
    CHECK_THROWS_AS(RegionGraph(3, {{0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(RegionGraph(21, {}), std::invalid_argument);
    CHECK_THROWS_AS(RegionGraph(2, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(RegionGraph(2, {{0, 2}}), std::invalid_argument);
}

TEST_CASE("region graph admissibility")
{
    // 4-cycle 0-2, 2-1, 1-3, 3-0: independent sets {0,1} and {2,3}.
    const AdmissibilityModel g = RegionGraph(4, {{0, 2}, {1, 2}, {1, 3}, {0, 3}});
    CHECK(max_admissible_size(g) == 2);
    CHECK(is_admissible(g, at({0.1, 0.3})));    // regions 0 and 1
    CHECK_FALSE(is_admissible(g, at({0.1, 0.6})));  // regions 0 and 2
    CHECK_FALSE(is_admissible(g, at({0.1, 0.2})));  // one region twice
}
