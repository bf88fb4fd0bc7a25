#include "dbscanpp/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dbscanpp {

namespace {

constexpr std::size_t kNoneIndex = std::numeric_limits<std::size_t>::max();

}  // namespace

SpatialIndex::SpatialIndex(const Dataset& data) : data_(data) {
    order_.resize(data_.size());
    for (std::size_t i = 0; i < order_.size(); ++i)
        order_[i] = static_cast<std::uint32_t>(i);
    nodes_.reserve(2 * order_.size() / kLeafSize + 2);
    root_ = build(0, order_.size());
}

std::uint32_t SpatialIndex::build(std::size_t begin, std::size_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].begin = static_cast<std::uint32_t>(begin);
    nodes_[id].end = static_cast<std::uint32_t>(end);
    if (end - begin <= kLeafSize) return id;

    const std::size_t dim = data_.dim();
    const double* coords = data_.coords().data();

    // Split on the coordinate with the widest spread over this node.
    std::size_t split_dim = 0;
    double widest = -1.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = coords[order_[i] * dim + d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            split_dim = d;
        }
    }

    // Median split; ties resolved by index so the tree shape is a pure
    // function of the dataset.
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double va = coords[a * dim + split_dim];
                         const double vb = coords[b * dim + split_dim];
                         return va < vb || (va == vb && a < b);
                     });

    const double split = coords[order_[mid] * dim + split_dim];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].split = split;
    nodes_[id].split_dim = static_cast<std::int32_t>(split_dim);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void SpatialIndex::check_dim(std::span<const double> q) const {
    if (q.size() != data_.dim())
        throw std::invalid_argument("spatial query: dimension mismatch");
}

std::vector<std::size_t> SpatialIndex::range_query(std::span<const double> center,
                                                   double radius) const {
    check_dim(center);
    if (radius < 0.0) throw std::invalid_argument("range_query: radius must be >= 0");
    const double r2 = radius * radius;

    std::vector<std::size_t> result;
    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (sq_dist(center, idx) <= r2) result.push_back(idx);
            }
            continue;
        }
        const double dx = center[static_cast<std::size_t>(node.split_dim)] - node.split;
        if (dx <= radius) stack.push_back(node.left);
        if (-dx <= radius) stack.push_back(node.right);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::size_t SpatialIndex::count_within(std::span<const double> center,
                                       double radius) const {
    check_dim(center);
    if (radius < 0.0) throw std::invalid_argument("count_within: radius must be >= 0");
    const double r2 = radius * radius;

    std::size_t count = 0;
    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i)
                if (sq_dist(center, order_[i]) <= r2) ++count;
            continue;
        }
        const double dx = center[static_cast<std::size_t>(node.split_dim)] - node.split;
        if (dx <= radius) stack.push_back(node.left);
        if (-dx <= radius) stack.push_back(node.right);
    }
    return count;
}

bool SpatialIndex::has_at_least(std::span<const double> center, double radius,
                                std::size_t k) const {
    check_dim(center);
    if (radius < 0.0) throw std::invalid_argument("has_at_least: radius must be >= 0");
    if (k == 0) return true;
    const double r2 = radius * radius;

    std::size_t count = 0;
    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                if (sq_dist(center, order_[i]) <= r2 && ++count >= k) return true;
            }
            continue;
        }
        const double dx = center[static_cast<std::size_t>(node.split_dim)] - node.split;
        if (dx <= radius) stack.push_back(node.left);
        if (-dx <= radius) stack.push_back(node.right);
    }
    return false;
}

std::optional<std::pair<std::size_t, double>> SpatialIndex::nearest_within(
    std::span<const double> query, double radius) const {
    check_dim(query);
    if (radius < 0.0) throw std::invalid_argument("nearest_within: radius must be >= 0");

    double best_d2 = radius * radius;
    std::size_t best_idx = kNoneIndex;

    // Near child first so the search radius shrinks quickly. A subtree is
    // skipped only when its axial distance strictly exceeds the current
    // best, so boundary ties are always examined and the smallest index
    // among equidistant points wins.
    auto descend = [&](auto&& self, std::uint32_t ni) -> void {
        const Node& node = nodes_[ni];
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const double d2 = sq_dist(query, idx);
                if (d2 < best_d2 ||
                    (d2 == best_d2 && (best_idx == kNoneIndex || idx < best_idx))) {
                    best_d2 = d2;
                    best_idx = idx;
                }
            }
            return;
        }
        const double dx = query[static_cast<std::size_t>(node.split_dim)] - node.split;
        const std::uint32_t near = dx <= 0.0 ? node.left : node.right;
        const std::uint32_t far = dx <= 0.0 ? node.right : node.left;
        self(self, near);
        if (dx * dx <= best_d2) self(self, far);
    };
    descend(descend, root_);

    if (best_idx == kNoneIndex) return std::nullopt;
    return std::make_pair(best_idx, std::sqrt(best_d2));
}

}  // namespace dbscanpp
