#include "dbscanpp/cluster.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dbscanpp/parallel.hpp"
#include "dbscanpp/rng.hpp"

namespace dbscanpp {

namespace {

// Path compression + union by rank.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        std::size_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::size_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

constexpr std::size_t kQueryBatch = 256;

// First-occurrence component ids for the points with keep[i] set; the rest
// stay noise.
ClusterLabels labels_from_components(UnionFind& uf, const std::vector<char>& keep) {
    const std::size_t n = keep.size();
    std::vector<std::int32_t> ids(n, kNoise);
    std::vector<std::int32_t> root_id(n, -1);
    std::int32_t next_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        const std::size_t root = uf.find(i);
        if (root_id[root] < 0) root_id[root] = next_id++;
        ids[i] = root_id[root];
    }
    return ClusterLabels{std::move(ids), next_id};
}

}  // namespace

std::vector<std::size_t> sample_uniform(std::size_t n, std::size_t m,
                                        std::uint64_t seed) {
    if (m < 1 || m > n)
        throw std::invalid_argument("sample_uniform: m must be in [1, n]");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.next_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<std::size_t> sample_kcenter(const Dataset& data, std::size_t m) {
    const std::size_t n = data.size();
    if (m < 1 || m > n)
        throw std::invalid_argument("sample_kcenter: m must be in [1, n]");
    const std::size_t dim = data.dim();
    const double* coords = data.coords().data();

    auto sq_dist = [&](std::size_t i, std::size_t j) {
        const double* a = coords + i * dim;
        const double* b = coords + j * dim;
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = a[d] - b[d];
            acc += diff * diff;
        }
        return acc;
    };

    std::vector<double> min_d2(n);
    std::vector<char> chosen(n, 0);
    std::vector<std::size_t> selected{0};
    chosen[0] = 1;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) min_d2[i] = sq_dist(i, 0);

    while (selected.size() < m) {
        // Global argmax of min-distance; the (distance, index) comparison
        // makes the winner unique, so thread count cannot change it.
        std::size_t best = n;
        double best_d2 = -1.0;
#pragma omp parallel
        {
            std::size_t local_best = n;
            double local_d2 = -1.0;
#pragma omp for schedule(static) nowait
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) continue;
                if (min_d2[i] > local_d2 ||
                    (min_d2[i] == local_d2 && i < local_best)) {
                    local_d2 = min_d2[i];
                    local_best = i;
                }
            }
#pragma omp critical
            {
                if (local_d2 > best_d2 || (local_d2 == best_d2 && local_best < best)) {
                    best_d2 = local_d2;
                    best = local_best;
                }
            }
        }
        selected.push_back(best);
        chosen[best] = 1;
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], sq_dist(i, best));
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

CoreSet find_core_points(const Dataset& data, const SpatialIndex& index,
                         std::span<const std::size_t> candidates, double epsilon,
                         int min_pts) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("find_core_points: epsilon must be > 0");
    if (min_pts < 1)
        throw std::invalid_argument("find_core_points: min_pts must be >= 1");
    for (std::size_t c : candidates)
        if (c >= data.size())
            throw std::invalid_argument("find_core_points: candidate out of range");

    const std::size_t count = candidates.size();
    const auto threshold = static_cast<std::size_t>(min_pts);
    std::vector<char> is_core(count, 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::size_t i = 0; i < count; ++i)
        is_core[i] = index.has_at_least(data.point(candidates[i]), epsilon, threshold);

    CoreSet cores;
    for (std::size_t i = 0; i < count; ++i)
        if (is_core[i]) cores.indices.push_back(candidates[i]);
    std::sort(cores.indices.begin(), cores.indices.end());
    cores.indices.erase(std::unique(cores.indices.begin(), cores.indices.end()),
                        cores.indices.end());
    return cores;
}

namespace {

ClusterLabels cluster_graph_mode(const Dataset& data, const SpatialIndex& index,
                                 const CoreSet& cores, double epsilon_connect,
                                 PhaseTimings* timings) {
    const std::size_t n = data.size();
    WallTimer timer;

    UnionFind uf(n);
    std::vector<char> in_graph(n, 0);
    std::vector<std::vector<std::size_t>> neighbors(kQueryBatch);
    for (std::size_t base = 0; base < cores.size(); base += kQueryBatch) {
        const std::size_t batch = std::min(kQueryBatch, cores.size() - base);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t j = 0; j < batch; ++j)
            neighbors[j] =
                index.range_query(data.point(cores.indices[base + j]), epsilon_connect);
        for (std::size_t j = 0; j < batch; ++j) {
            const std::size_t core = cores.indices[base + j];
            for (std::size_t q : neighbors[j]) {
                in_graph[q] = 1;
                uf.unite(core, q);
            }
        }
    }
    if (timings) timings->graph_build_ms = timer.lap_ms();

    ClusterLabels labels = labels_from_components(uf, in_graph);
    if (timings) timings->components_ms = timer.lap_ms();
    return labels;
}

ClusterLabels cluster_nearest_mode(const Dataset& data, const SpatialIndex&,
                                   const CoreSet& cores, double epsilon,
                                   double epsilon_connect, PhaseTimings* timings) {
    const std::size_t n = data.size();
    if (cores.empty()) {
        return ClusterLabels{std::vector<std::int32_t>(n, kNoise), 0};
    }
    WallTimer timer;

    const std::size_t dim = data.dim();
    const std::size_t n_cores = cores.size();
    std::vector<double> core_coords(n_cores * dim);
    for (std::size_t j = 0; j < n_cores; ++j) {
        const auto p = data.point(cores.indices[j]);
        std::copy(p.begin(), p.end(), core_coords.begin() + j * dim);
    }
    const Dataset core_data(std::move(core_coords), dim);
    const SpatialIndex core_index(core_data);

    // Components over cores only.
    UnionFind uf(n_cores);
    std::vector<std::vector<std::size_t>> neighbors(kQueryBatch);
    for (std::size_t base = 0; base < n_cores; base += kQueryBatch) {
        const std::size_t batch = std::min(kQueryBatch, n_cores - base);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t j = 0; j < batch; ++j)
            neighbors[j] =
                core_index.range_query(core_data.point(base + j), epsilon_connect);
        for (std::size_t j = 0; j < batch; ++j)
            for (std::size_t q : neighbors[j]) uf.unite(base + j, q);
    }
    if (timings) timings->graph_build_ms = timer.lap_ms();

    // Flatten once so the assignment loop below only reads.
    std::vector<std::int32_t> core_component(n_cores);
    for (std::size_t j = 0; j < n_cores; ++j)
        core_component[j] = static_cast<std::int32_t>(uf.find(j));

    std::vector<char> is_core(n, 0);
    for (std::size_t c : cores.indices) is_core[c] = 1;
    std::vector<std::int32_t> ids(n, kNoise);
    for (std::size_t j = 0; j < n_cores; ++j)
        ids[cores.indices[j]] = core_component[j];
    if (timings) timings->components_ms = timer.lap_ms();

#pragma omp parallel for schedule(dynamic, 256)
    for (std::size_t p = 0; p < n; ++p) {
        if (is_core[p]) continue;
        const auto hit = core_index.nearest_within(data.point(p), epsilon);
        if (hit) ids[p] = core_component[hit->first];
    }
    ClusterLabels labels = canonicalize_labels(labels_from_ids(std::move(ids)));
    if (timings) timings->assignment_ms = timer.lap_ms();
    return labels;
}

}  // namespace

ClusterLabels cluster_from_cores(const Dataset& data, const SpatialIndex& index,
                                 const CoreSet& cores, double epsilon,
                                 double epsilon_connect, Assignment assignment,
                                 PhaseTimings* timings) {
    if (epsilon_connect < epsilon)
        throw std::invalid_argument("cluster_from_cores: epsilon_connect must be >= epsilon");
    for (std::size_t c : cores.indices)
        if (c >= data.size())
            throw std::invalid_argument("cluster_from_cores: core index out of range");

    if (assignment == Assignment::kGraph)
        return cluster_graph_mode(data, index, cores, epsilon_connect, timings);
    return cluster_nearest_mode(data, index, cores, epsilon, epsilon_connect, timings);
}

ClusteringResult dbscan(const Dataset& data, const SpatialIndex& index,
                        double epsilon, int min_pts, double epsilon_connect,
                        Assignment assignment) {
    const std::size_t n = data.size();
    AlgoParams params;
    params.epsilon = epsilon;
    params.min_pts = min_pts;
    params.m = n;
    params.epsilon_connect = epsilon_connect;
    params.assignment = assignment;
    params.validate(n);

    ClusteringResult result;
    result.params = params;

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    WallTimer timer;
    result.cores = find_core_points(data, index, all, epsilon, min_pts);
    result.timings.core_detection_ms = timer.lap_ms();
    result.labels = cluster_from_cores(data, index, result.cores, epsilon,
                                       params.connect_radius(), assignment,
                                       &result.timings);
    return result;
}

ClusteringResult dbscan(const Dataset& data, double epsilon, int min_pts,
                        double epsilon_connect, Assignment assignment) {
    const SpatialIndex index(data);
    return dbscan(data, index, epsilon, min_pts, epsilon_connect, assignment);
}

ClusteringResult dbscan_pp(const Dataset& data, const SpatialIndex& index,
                           const AlgoParams& params) {
    const std::size_t n = data.size();
    params.validate(n);

    ClusteringResult result;
    result.params = params;

    WallTimer timer;
    const std::vector<std::size_t> sample =
        params.strategy == Strategy::kUniform
            ? sample_uniform(n, params.m, params.seed)
            : sample_kcenter(data, params.m);
    result.timings.sampling_ms = timer.lap_ms();

    result.cores = find_core_points(data, index, sample, params.epsilon, params.min_pts);
    result.timings.core_detection_ms = timer.lap_ms();

    result.labels = cluster_from_cores(data, index, result.cores, params.epsilon,
                                       params.connect_radius(), params.assignment,
                                       &result.timings);
    return result;
}

ClusteringResult dbscan_pp(const Dataset& data, const AlgoParams& params) {
    const SpatialIndex index(data);
    return dbscan_pp(data, index, params);
}

}  // namespace dbscanpp
