#include "dbscanpp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace dbscanpp::ref {

namespace {

double sq_dist(const Dataset& data, std::span<const double> q, std::size_t i) {
    const auto p = data.point(i);
    double acc = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) {
        const double diff = q[d] - p[d];
        acc += diff * diff;
    }
    return acc;
}

double sq_dist(const Dataset& data, std::size_t i, std::size_t j) {
    return sq_dist(data, data.point(i), j);
}

std::vector<bool> core_flags(const Dataset& data, double epsilon, int min_pts) {
    const std::size_t n = data.size();
    const double eps2 = epsilon * epsilon;
    std::vector<bool> is_core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (sq_dist(data, i, j) <= eps2) ++count;
        is_core[i] = count >= static_cast<std::size_t>(min_pts);
    }
    return is_core;
}

}  // namespace

std::vector<std::size_t> range_query(const Dataset& data,
                                     std::span<const double> center,
                                     double radius) {
    const double r2 = radius * radius;
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (sq_dist(data, center, i) <= r2) hits.push_back(i);
    return hits;
}

std::size_t count_within(const Dataset& data, std::span<const double> center,
                         double radius) {
    const double r2 = radius * radius;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (sq_dist(data, center, i) <= r2) ++count;
    return count;
}

std::optional<std::pair<std::size_t, double>> nearest_within(
    const Dataset& data, std::span<const double> query, double radius) {
    double best_d2 = radius * radius;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d2 = sq_dist(data, query, i);
        if (d2 < best_d2 || (d2 == best_d2 && best == std::numeric_limits<std::size_t>::max())) {
            best_d2 = d2;
            best = i;
        }
    }
    if (best == std::numeric_limits<std::size_t>::max()) return std::nullopt;
    return std::make_pair(best, std::sqrt(best_d2));
}

CoreSet find_core_points(const Dataset& data,
                         std::span<const std::size_t> candidates, double epsilon,
                         int min_pts) {
    CoreSet cores;
    for (std::size_t c : candidates)
        if (count_within(data, data.point(c), epsilon) >=
            static_cast<std::size_t>(min_pts))
            cores.indices.push_back(c);
    std::sort(cores.indices.begin(), cores.indices.end());
    return cores;
}

std::vector<std::size_t> sample_kcenter(const Dataset& data, std::size_t m) {
    const std::size_t n = data.size();
    if (m < 1 || m > n)
        throw std::invalid_argument("sample_kcenter: m must be in [1, n]");
    std::vector<double> min_d2(n);
    std::vector<bool> chosen(n, false);
    std::vector<std::size_t> selected{0};
    chosen[0] = true;
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = sq_dist(data, i, 0);

    while (selected.size() < m) {
        std::size_t best = n;
        double best_d2 = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            if (min_d2[i] > best_d2) {
                best_d2 = min_d2[i];
                best = i;
            }
        }
        selected.push_back(best);
        chosen[best] = true;
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], sq_dist(data, i, best));
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

double hausdorff_distance(const Dataset& a, const Dataset& b) {
    auto directed = [](const Dataset& from, const Dataset& to) {
        double worst = 0.0;
        for (std::size_t i = 0; i < from.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < to.size(); ++j)
                best = std::min(best, sq_dist(to, from.point(i), j));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

ClusterLabels dbscan_graph(const Dataset& data, double epsilon, int min_pts,
                           double epsilon_connect) {
    const std::size_t n = data.size();
    const double conn2 = epsilon_connect * epsilon_connect;
    const auto is_core = core_flags(data, epsilon, min_pts);

    // BFS over the graph with an edge from each core to every point in its
    // connection ball. Non-core points carry no outgoing edges of their own
    // but can still join two cores into one component.
    std::vector<std::int32_t> ids(n, kNoise);
    std::vector<bool> visited(n, false);
    std::int32_t next_id = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start] || !is_core[start]) continue;
        const std::int32_t id = next_id++;
        std::deque<std::size_t> queue{start};
        visited[start] = true;
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            ids[p] = id;
            for (std::size_t q = 0; q < n; ++q) {
                if (visited[q]) continue;
                if (!is_core[p] && !is_core[q]) continue;
                if (sq_dist(data, p, q) <= conn2) {
                    visited[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    return canonicalize_labels(labels_from_ids(std::move(ids)));
}

ClusterLabels dbscan_nearest(const Dataset& data, double epsilon, int min_pts,
                             double epsilon_connect) {
    const std::size_t n = data.size();
    const double eps2 = epsilon * epsilon;
    const double conn2 = epsilon_connect * epsilon_connect;
    const auto is_core = core_flags(data, epsilon, min_pts);

    std::vector<std::int32_t> ids(n, kNoise);
    std::vector<bool> visited(n, false);
    std::int32_t next_id = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start] || !is_core[start]) continue;
        const std::int32_t id = next_id++;
        std::deque<std::size_t> queue{start};
        visited[start] = true;
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            ids[p] = id;
            for (std::size_t q = 0; q < n; ++q)
                if (!visited[q] && is_core[q] && sq_dist(data, p, q) <= conn2) {
                    visited[q] = true;
                    queue.push_back(q);
                }
        }
    }

    for (std::size_t p = 0; p < n; ++p) {
        if (is_core[p]) continue;
        double best_d2 = eps2;
        std::size_t best = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (!is_core[c]) continue;
            const double d2 = sq_dist(data, p, c);
            if (d2 < best_d2 || (d2 == best_d2 && best == n)) {
                best_d2 = d2;
                best = c;
            }
        }
        if (best < n) ids[p] = ids[best];
    }
    return canonicalize_labels(labels_from_ids(std::move(ids)));
}

}  // namespace dbscanpp::ref
