#include "admsched/geometry.hpp"
#include "admsched/partition_checks.hpp"
#include "admsched/rng.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace admsched;

TEST_CASE("circular distance")
{
    CHECK(circ_distance(Location(0.1), Location(0.7)) == doctest::Approx(0.4));
    CHECK(circ_distance(Location(0.0), Location(0.5)) == doctest::Approx(0.5));
    CHECK(circ_distance(Location(0.95), Location(0.05)) == doctest::Approx(0.1));
    CHECK(circ_distance(Location(0.3), Location(0.3)) == 0.0);
    CHECK(Location(1.25).value() == doctest::Approx(0.25));
    CHECK(Location(-0.25).value() == doctest::Approx(0.75));
    CHECK(Location(1.0).value() == 0.0);
}

TEST_CASE("maximum admissible size from the radius")
{
    CHECK(mu_for_radius(0.49) == 2);
    CHECK(mu_for_radius(0.5) == 1);
    CHECK(mu_for_radius(0.3) == 3);
    CHECK(mu_for_radius(0.25) == 3);
    CHECK(mu_for_radius(0.2) == 4);
    CHECK(inverse_is_integer(0.5));
    CHECK(inverse_is_integer(0.2));
    CHECK_FALSE(inverse_is_integer(0.3));
    CHECK_THROWS_AS(mu_for_radius(0.0), std::invalid_argument);
    CHECK_THROWS_AS(mu_for_radius(1.0), std::invalid_argument);
}

TEST_CASE("minimal region count")
{
    CHECK(minimal_region_count(0.49) == 200);
    CHECK(minimal_region_count(0.3) == 60);
    CHECK(minimal_region_count(0.5) == 4);
}

TEST_CASE("interleaved partition for r = 0.49")
{
    const auto p = build_partition(0.49);
    CHECK(p.K() == 200);
    CHECK(p.mu() == 2);
    CHECK(p.layout() == Partition::Layout::Interleaved);
    CHECK(p.region(0).lo == doctest::Approx(0.0));
    CHECK(p.region(0).hi == doctest::Approx(0.005));
    CHECK(p.region(1).lo == doctest::Approx(0.5));
    CHECK(p.region(1).hi == doctest::Approx(0.505));
    CHECK(p.region_of(Location(0.0)) == 0);
    CHECK(p.region_of(Location(0.5)) == 1);
    CHECK(p.region_of(Location(0.005)) == 2);
    CHECK(p.region_of(Location(0.999)) == 199);
    CHECK(p.blocks().size() == 100);
    CHECK(p.block_of(0) == p.block_of(1));
    CHECK(min_region_distance(p, 0, 1) == doctest::Approx(0.495));
    CHECK(min_region_distance(p, 0, 2) == 0.0);
    CHECK_THROWS_AS(min_region_distance(p, 3, 3), std::invalid_argument);
}

TEST_CASE("partition construction errors")
{
    CHECK_THROWS_AS(build_partition(0.49, 198), std::invalid_argument);  // below the bound
    CHECK_THROWS_AS(build_partition(0.49, 201), std::invalid_argument);  // not a multiple of mu
    CHECK_NOTHROW(build_partition(0.49, 202));
    CHECK(build_partition(0.3).K() == minimal_region_count(0.3));
}

TEST_CASE("region_of agrees with the region intervals")
{
    Engine eng = make_stream(7, "geometry");
    for (double r : {0.49, 0.3, 0.5, 0.2}) {
        const auto p = build_partition(r);
        for (int i = 0; i < 2000; ++i) {
            const double x = uniform01(eng);
            CHECK(p.region(p.region_of(Location(x))).contains(x));
        }
        for (int i = 0; i < p.K(); ++i)
            CHECK(p.region_of(Location(p.region(i).lo)) == i);
    }
}

TEST_CASE("contiguous partition")
{
    const auto p = Partition::contiguous(6, 2);
    CHECK(p.K() == 6);
    CHECK(p.region_of(Location(0.2)) == 1);
    CHECK(p.blocks().size() == 3);
    CHECK(p.block_of(5) == std::vector<int>{4, 5});
}

TEST_CASE("guaranteed region sets")
{
    const auto p = build_partition(0.49);
    const AdmissibilityModel m = PairwiseDistance::make(0.49);
    CHECK(is_guaranteed(p, m, std::vector<int>{}));
    CHECK(is_guaranteed(p, m, std::vector<int>{0, 1}));
    CHECK_FALSE(is_guaranteed(p, m, std::vector<int>{0, 2}));  // adjacent cells
    CHECK_FALSE(is_guaranteed(p, m, std::vector<int>{0, 1, 3}));
}

TEST_CASE("partition validation")
{
    for (double r : {0.3, 0.49, 0.5}) {
        const auto rep = validate_partition(build_partition(r), PairwiseDistance::make(r));
        CHECK(rep.ok());
        REQUIRE(rep.find("forbidden_size") != nullptr);
        CHECK(rep.find("forbidden_size")->passed);
    }

    // Blocks made of adjacent regions cannot be co-removed.
    const auto bad_blocks = Partition::contiguous(4, 2);
    const auto rep = validate_partition(bad_blocks, PairwiseDistance::make(0.49));
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.find("blocks")->passed);
    CHECK(rep.find("cover")->passed);

    // Overlapping regions fail the cover check.
    const Partition overlap(1, {{0.0, 0.6}, {0.5, 1.0}}, {{0}, {1}});
    CHECK_FALSE(validate_partition(overlap, PairwiseDistance::make(0.6)).find("cover")->passed);

    // Regions longer than r admit two co-removable particles.
    const auto coarse = Partition::contiguous(2, 1);
    CHECK_FALSE(validate_partition(coarse, PairwiseDistance::make(0.3)).find("exclusivity")->passed);
}
