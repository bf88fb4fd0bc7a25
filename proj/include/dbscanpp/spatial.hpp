#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dbscanpp/core.hpp"

namespace dbscanpp {

// Exact Euclidean range and radius-bounded nearest-neighbor queries over a
// fixed dataset. Balanced KD-tree: nodes split the widest-spread coordinate
// at the median, leaves hold up to 16 points. All balls are closed (<=),
// so boundary points count. The index keeps a reference to the dataset,
// which must outlive it; queries are read-only and safe to run from many
// threads at once.
class SpatialIndex {
public:
    explicit SpatialIndex(const Dataset& data);

    // Indices i with |x_i - center| <= radius, sorted ascending.
    std::vector<std::size_t> range_query(std::span<const double> center,
                                         double radius) const;

    // |{ i : |x_i - center| <= radius }| without materializing the set.
    std::size_t count_within(std::span<const double> center, double radius) const;

    // Early-exit variant of count_within: stops as soon as k hits are seen.
    bool has_at_least(std::span<const double> center, double radius,
                      std::size_t k) const;

    // Closest point with distance <= radius, or nullopt. Ties broken by
    // smallest index. The returned distance is true Euclidean.
    std::optional<std::pair<std::size_t, double>> nearest_within(
        std::span<const double> query, double radius) const;

    const Dataset& data() const { return data_; }

private:
    struct Node {
        double split = 0.0;
        std::int32_t split_dim = -1;  // -1 marks a leaf
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
    };

    static constexpr std::size_t kLeafSize = 16;

    std::uint32_t build(std::size_t begin, std::size_t end);
    void check_dim(std::span<const double> q) const;

    double sq_dist(std::span<const double> q, std::size_t i) const {
        const double* p = data_.coords().data() + i * data_.dim();
        double acc = 0.0;
        for (std::size_t d = 0; d < q.size(); ++d) {
            const double diff = q[d] - p[d];
            acc += diff * diff;
        }
        return acc;
    }

    const Dataset& data_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
};

}  // namespace dbscanpp
