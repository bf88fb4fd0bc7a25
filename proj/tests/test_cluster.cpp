#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <set>
#include <vector>

#include "dbscanpp/cluster.hpp"
#include "dbscanpp/reference.hpp"
#include "dbscanpp/rng.hpp"
#include "dbscanpp/spatial.hpp"
#include "test_util.hpp"

using namespace dbscanpp;

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

bool is_subset(const std::vector<std::size_t>& inner,
               const std::vector<std::size_t>& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

}  // namespace

TEST_CASE("sample_uniform basics") {
    CHECK(sample_uniform(5, 5, 42) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(sample_uniform(5, 1, 7) == sample_uniform(5, 1, 7));
    CHECK_THROWS_AS(sample_uniform(5, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_uniform(5, 6, 0), std::invalid_argument);

    const auto sample = sample_uniform(100, 10, 3);
    CHECK(sample.size() == 10);
    CHECK(std::is_sorted(sample.begin(), sample.end()));
    CHECK(std::adjacent_find(sample.begin(), sample.end()) == sample.end());
}

TEST_CASE("sample_uniform frequencies are uniform") {
    // 10^4 draws of 10-of-100; every index should land near 10%.
    constexpr std::size_t kReps = 10000;
    std::vector<std::size_t> hits(100, 0);
    for (std::size_t rep = 0; rep < kReps; ++rep)
        for (std::size_t i : sample_uniform(100, 10, rep))
            ++hits[i];
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const double freq = static_cast<double>(hits[i]) / kReps;
        CHECK(freq > 0.09);
        CHECK(freq < 0.11);
    }
}

TEST_CASE("sample_kcenter hand examples") {
    const Dataset data = Dataset::from_points({{0.0}, {1.0}, {10.0}});
    CHECK(sample_kcenter(data, 2) == std::vector<std::size_t>{0, 2});
    CHECK(sample_kcenter(data, 1) == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(sample_kcenter(data, 4), std::invalid_argument);
}

TEST_CASE("sample_kcenter matches the serial reference") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset data = testutil::random_dataset(300, 3, seed);
        for (std::size_t m : {1UL, 7UL, 50UL})
            CHECK(sample_kcenter(data, m) == ref::sample_kcenter(data, m));
    }
}

TEST_CASE("greedy k-center is a 2-approximation on exhaustive instances") {
    Xoshiro256 rng(404);
    for (int instance = 0; instance < 40; ++instance) {
        const std::size_t n = 6 + rng.next_below(7);   // 6..12
        const std::size_t m = 1 + rng.next_below(4);   // 1..4
        const Dataset data = testutil::random_dataset(n, 2, 5000 + instance);

        const auto chosen = sample_kcenter(data, m);
        const auto objective = [&](const std::vector<std::size_t>& centers) {
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t c : centers) {
                    double acc = 0.0;
                    for (std::size_t d = 0; d < data.dim(); ++d) {
                        const double diff = data.point(i)[d] - data.point(c)[d];
                        acc += diff * diff;
                    }
                    best = std::min(best, acc);
                }
                worst = std::max(worst, best);
            }
            return std::sqrt(worst);
        };
        const double tau = objective(chosen);

        // Exhaustive optimum over all C(n, m) subsets.
        double tau_opt = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> subset(m);
        const auto enumerate = [&](auto&& self, std::size_t next, std::size_t depth) -> void {
            if (depth == m) {
                tau_opt = std::min(tau_opt, objective(subset));
                return;
            }
            for (std::size_t i = next; i < n; ++i) {
                subset[depth] = i;
                self(self, i + 1, depth + 1);
            }
        };
        enumerate(enumerate, 0, 0);
        CHECK(tau <= 2.0 * tau_opt + 1e-12);
    }
}

TEST_CASE("find_core_points hand examples") {
    const Dataset data =
        Dataset::from_points({{0.0}, {0.5}, {1.0}, {10.0}, {10.5}, {11.0}});
    const SpatialIndex index(data);
    const auto all = all_indices(data.size());

    const CoreSet cores = find_core_points(data, index, all, 1.0, 2);
    CHECK(cores.indices == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

    const Dataset with_gap =
        Dataset::from_points({{0.0}, {0.5}, {1.0}, {5.0}, {10.0}, {10.5}, {11.0}});
    const SpatialIndex gap_index(with_gap);
    const CoreSet gap_cores =
        find_core_points(with_gap, gap_index, all_indices(7), 1.0, 2);
    CHECK(gap_cores.indices == std::vector<std::size_t>{0, 1, 2, 4, 5, 6});

    // minPts = 1: self-inclusion makes everything core.
    const CoreSet trivial = find_core_points(with_gap, gap_index, all_indices(7), 1.0, 1);
    CHECK(trivial.indices.size() == 7);
}

TEST_CASE("find_core_points matches the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Dataset data = testutil::random_dataset(250, 2, 900 + seed, 5.0);
        const SpatialIndex index(data);
        const auto all = all_indices(data.size());
        Xoshiro256 rng(seed);
        const double eps = 0.2 + rng.next_double();
        const int min_pts = 1 + static_cast<int>(rng.next_below(8));
        const CoreSet fast = find_core_points(data, index, all, eps, min_pts);
        const CoreSet slow = ref::find_core_points(data, all, eps, min_pts);
        CHECK(fast.indices == slow.indices);
    }
}

TEST_CASE("cluster_from_cores hand examples") {
    const Dataset data =
        Dataset::from_points({{0.0}, {0.5}, {1.0}, {10.0}, {10.5}, {11.0}});
    const SpatialIndex index(data);

    const ClusterLabels two = cluster_from_cores(
        data, index, CoreSet{{0, 5}}, 1.0, 1.0, Assignment::kGraph);
    CHECK(two.ids == std::vector<std::int32_t>{0, 0, 0, 1, 1, 1});
    CHECK(two.k == 2);

    const ClusterLabels none =
        cluster_from_cores(data, index, CoreSet{}, 1.0, 1.0, Assignment::kGraph);
    CHECK(none.k == 0);
    for (std::int32_t id : none.ids) CHECK(id == kNoise);

    const ClusterLabels all_one = cluster_from_cores(
        data, index, CoreSet{{2}}, 20.0, 20.0, Assignment::kGraph);
    CHECK(all_one.k == 1);
    for (std::int32_t id : all_one.ids) CHECK(id == 0);

    CHECK_THROWS_AS(cluster_from_cores(data, index, CoreSet{{0}}, 1.0, 0.5,
                                       Assignment::kGraph),
                    std::invalid_argument);
}

TEST_CASE("dbscan hand examples") {
    const Dataset data = Dataset::from_points(
        {{0.0}, {0.5}, {1.0}, {5.0}, {10.0}, {10.5}, {11.0}});
    const ClusteringResult result = dbscan(data, 1.0, 2);
    CHECK(result.labels.ids ==
          std::vector<std::int32_t>{0, 0, 0, kNoise, 1, 1, 1});

    const ClusteringResult single = dbscan(data, 20.0, 1);
    CHECK(single.labels.k == 1);
    CHECK(single.noise_count() == 0);

    const Dataset lone = Dataset::from_points({{3.0}});
    const ClusteringResult one = dbscan(lone, 1.0, 1);
    CHECK(one.labels.ids == std::vector<std::int32_t>{0});
}

TEST_CASE("dbscan matches the quadratic reference in both modes") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Dataset data = testutil::random_dataset(180, 2, 40 + seed, 4.0);
        Xoshiro256 rng(seed);
        const double eps = 0.25 + 0.5 * rng.next_double();
        const int min_pts = 2 + static_cast<int>(rng.next_below(6));
        const double eps_connect = eps * (1.0 + rng.next_double());

        const ClusteringResult graph =
            dbscan(data, eps, min_pts, eps_connect, Assignment::kGraph);
        CHECK(partitions_equal(graph.labels,
                               ref::dbscan_graph(data, eps, min_pts, eps_connect)));

        const ClusteringResult nearest =
            dbscan(data, eps, min_pts, eps_connect, Assignment::kNearestCore);
        CHECK(partitions_equal(nearest.labels,
                               ref::dbscan_nearest(data, eps, min_pts, eps_connect)));
    }
}

TEST_CASE("dbscan_pp kcenter hand example") {
    const Dataset data =
        Dataset::from_points({{0.0}, {0.5}, {1.0}, {10.0}, {10.5}, {11.0}});
    AlgoParams params;
    params.epsilon = 1.0;
    params.min_pts = 2;
    params.m = 2;
    params.strategy = Strategy::kKCenter;
    const ClusteringResult result = dbscan_pp(data, params);
    CHECK(result.cores.indices == std::vector<std::size_t>{0, 5});
    CHECK(result.labels.ids == std::vector<std::int32_t>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("dbscan_pp with m = n reduces to dbscan") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset data = testutil::random_dataset(150, 3, 700 + seed, 5.0);
        Xoshiro256 rng(seed);
        const double eps = 0.3 + rng.next_double();
        const int min_pts = 1 + static_cast<int>(rng.next_below(8));

        AlgoParams params;
        params.epsilon = eps;
        params.min_pts = min_pts;
        params.m = data.size();
        params.seed = seed;
        const ClusteringResult pp = dbscan_pp(data, params);
        const ClusteringResult full = dbscan(data, eps, min_pts);
        CHECK(partitions_equal(pp.labels, full.labels));
        CHECK(pp.cores.indices == full.cores.indices);
    }
}

TEST_CASE("subset and noise-superset properties") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset data = testutil::random_dataset(200, 2, 300 + seed, 6.0);
        Xoshiro256 rng(seed * 17 + 1);
        const double eps = 0.3 + 0.7 * rng.next_double();
        const int min_pts = 2 + static_cast<int>(rng.next_below(7));
        const std::size_t m = 1 + rng.next_below(data.size());

        AlgoParams params;
        params.epsilon = eps;
        params.min_pts = min_pts;
        params.m = m;
        params.seed = seed;
        params.strategy = seed % 2 == 0 ? Strategy::kUniform : Strategy::kKCenter;

        const ClusteringResult pp = dbscan_pp(data, params);
        const ClusteringResult full = dbscan(data, eps, min_pts);

        CHECK(is_subset(pp.cores.indices, full.cores.indices));
        for (std::size_t i = 0; i < data.size(); ++i)
            if (full.labels.ids[i] == kNoise) CHECK(pp.labels.ids[i] == kNoise);
    }
}

TEST_CASE("graph-mode noise is exactly the points no core reaches") {
    const Dataset data = testutil::random_dataset(150, 2, 64, 6.0);
    const SpatialIndex index(data);
    const double eps = 0.6;
    const double eps_connect = 0.9;
    const ClusteringResult result =
        dbscan(data, index, eps, 4, eps_connect, Assignment::kGraph);

    for (std::size_t i = 0; i < data.size(); ++i) {
        double nearest_core = std::numeric_limits<double>::infinity();
        for (std::size_t c : result.cores.indices) {
            double acc = 0.0;
            for (std::size_t d = 0; d < data.dim(); ++d) {
                const double diff = data.point(i)[d] - data.point(c)[d];
                acc += diff * diff;
            }
            nearest_core = std::min(nearest_core, std::sqrt(acc));
        }
        CHECK((result.labels.ids[i] == kNoise) == (nearest_core > eps_connect));
    }
}

TEST_CASE("core set grows with epsilon") {
    const Dataset data = testutil::random_dataset(200, 2, 11, 5.0);
    const SpatialIndex index(data);
    const auto all = all_indices(data.size());
    const CoreSet small = find_core_points(data, index, all, 0.4, 5);
    const CoreSet large = find_core_points(data, index, all, 0.8, 5);
    CHECK(is_subset(small.indices, large.indices));
}

TEST_CASE("cores always carry a cluster label") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Dataset data = testutil::random_dataset(120, 2, 222 + seed, 5.0);
        AlgoParams params;
        params.epsilon = 0.5;
        params.min_pts = 3;
        params.m = 40;
        params.seed = seed;
        params.assignment = seed % 2 == 0 ? Assignment::kGraph : Assignment::kNearestCore;
        const ClusteringResult result = dbscan_pp(data, params);
        for (std::size_t c : result.cores.indices)
            CHECK(result.labels.ids[c] != kNoise);
        CHECK(result.timings.total_ms() >= 0.0);
    }
}

TEST_CASE("nearest-core mode ignores border bridges between components") {
    // Two cores 1.8 apart with a shared non-core midpoint: the graph mode
    // merges them through the bridge, nearest-core mode does not.
    const Dataset data = Dataset::from_points(
        {{0.0}, {0.05}, {0.1}, {0.9}, {1.7}, {1.75}, {1.8}});
    const double eps = 0.25;
    const int min_pts = 3;

    const ClusteringResult graph = dbscan(data, eps, min_pts, 1.0, Assignment::kGraph);
    const ClusteringResult nearest =
        dbscan(data, eps, min_pts, 1.0, Assignment::kNearestCore);
    CHECK(graph.labels.k == 1);
    CHECK(nearest.labels.k == 2);
    // The midpoint is farther than eps from every core: noise in nearest mode.
    CHECK(nearest.labels.ids[3] == kNoise);
    CHECK(graph.labels.ids[3] == 0);
}
