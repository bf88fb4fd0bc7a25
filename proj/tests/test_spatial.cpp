#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <limits>

#include "dbscanpp/reference.hpp"
#include "dbscanpp/rng.hpp"
#include "dbscanpp/spatial.hpp"
#include "test_util.hpp"

using namespace dbscanpp;

TEST_CASE("single point and duplicates") {
    const Dataset one = Dataset::from_points({{1.0, 2.0}});
    const SpatialIndex index(one);
    CHECK(index.range_query(one.point(0), 0.0) == std::vector<std::size_t>{0});

    const Dataset dupes = Dataset::from_points({{1.0}, {1.0}, {2.0}});
    const SpatialIndex dupe_index(dupes);
    CHECK(dupe_index.range_query(dupes.point(0), 0.0) ==
          std::vector<std::size_t>{0, 1});
}

TEST_CASE("closed ball includes the boundary") {
    const Dataset data = Dataset::from_points({{0.0}, {0.5}, {1.0}, {10.0}});
    const SpatialIndex index(data);
    const std::vector<double> center{0.0};
    CHECK(index.range_query(center, 1.0) == std::vector<std::size_t>{0, 1, 2});
    CHECK(index.count_within(center, 1.0) == 3);
    CHECK(index.has_at_least(center, 1.0, 3));
    CHECK_FALSE(index.has_at_least(center, 1.0, 4));
}

TEST_CASE("nearest_within basics") {
    const Dataset data = Dataset::from_points({{0.0}, {10.0}});
    const SpatialIndex index(data);
    const std::vector<double> q1{1.0};
    const auto hit = index.nearest_within(q1, 2.0);
    REQUIRE(hit.has_value());
    CHECK(hit->first == 0);
    CHECK(hit->second == doctest::Approx(1.0));

    const std::vector<double> q2{5.0};
    CHECK_FALSE(index.nearest_within(q2, 1.0).has_value());

    // Equidistant points: the smaller index wins.
    const Dataset tie = Dataset::from_points({{-1.0}, {1.0}});
    const SpatialIndex tie_index(tie);
    const std::vector<double> origin{0.0};
    const auto tied = tie_index.nearest_within(origin, 5.0);
    REQUIRE(tied.has_value());
    CHECK(tied->first == 0);
}

TEST_CASE("dimension mismatches and bad radii") {
    const Dataset data = Dataset::from_points({{0.0, 0.0}});
    const SpatialIndex index(data);
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(index.range_query(wrong, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(index.nearest_within(wrong, 1.0), std::invalid_argument);
    const std::vector<double> ok{0.0, 0.0};
    CHECK_THROWS_AS(index.range_query(ok, -1.0), std::invalid_argument);
}

TEST_CASE("range queries match the linear-scan oracle") {
    const Dataset data = testutil::random_dataset(1000, 3, 7);
    const SpatialIndex index(data);
    Xoshiro256 rng(99);
    for (int q = 0; q < 500; ++q) {
        const std::vector<double> center{10.0 * rng.next_double(),
                                         10.0 * rng.next_double(),
                                         10.0 * rng.next_double()};
        const double radius = 3.0 * rng.next_double();
        CHECK(index.range_query(center, radius) ==
              ref::range_query(data, center, radius));
        CHECK(index.count_within(center, radius) ==
              ref::count_within(data, center, radius));
    }
}

TEST_CASE("nearest_within matches the brute-force argmin") {
    const Dataset data = testutil::random_dataset(800, 2, 13);
    const SpatialIndex index(data);
    Xoshiro256 rng(131);
    for (int q = 0; q < 500; ++q) {
        const std::vector<double> query{12.0 * rng.next_double() - 1.0,
                                        12.0 * rng.next_double() - 1.0};
        const double radius = 2.5 * rng.next_double();
        const auto got = index.nearest_within(query, radius);
        const auto want = ref::nearest_within(data, query, radius);
        CHECK(got.has_value() == want.has_value());
        if (got && want) {
            CHECK(got->first == want->first);
            CHECK(got->second == doctest::Approx(want->second).epsilon(1e-12));
        }
        // Empty range iff empty nearest.
        CHECK(got.has_value() == !index.range_query(query, radius).empty());
    }
}

TEST_CASE("range monotonicity in the radius") {
    const Dataset data = testutil::random_dataset(300, 2, 21);
    const SpatialIndex index(data);
    Xoshiro256 rng(77);
    for (int q = 0; q < 100; ++q) {
        const std::vector<double> center{10.0 * rng.next_double(),
                                         10.0 * rng.next_double()};
        const double r1 = 2.0 * rng.next_double();
        const double r2 = r1 + rng.next_double();
        const auto small = index.range_query(center, r1);
        const auto large = index.range_query(center, r2);
        CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
}

TEST_CASE("unbounded nearest works with an infinite radius") {
    const Dataset data = testutil::random_dataset(200, 3, 5);
    const SpatialIndex index(data);
    const std::vector<double> query{50.0, 50.0, 50.0};
    const auto hit = index.nearest_within(query, std::numeric_limits<double>::infinity());
    const auto want = ref::nearest_within(data, query,
                                          std::numeric_limits<double>::infinity());
    REQUIRE(hit.has_value());
    CHECK(hit->first == want->first);
}
