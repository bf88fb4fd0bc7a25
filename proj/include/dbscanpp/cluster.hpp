#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbscanpp/core.hpp"
#include "dbscanpp/spatial.hpp"

namespace dbscanpp {

// m distinct indices drawn uniformly without replacement (partial
// Fisher-Yates over [0, n) driven by Xoshiro256), sorted ascending.
std::vector<std::size_t> sample_uniform(std::size_t n, std::size_t m,
                                        std::uint64_t seed);

// Greedy farthest-point traversal. Starts at index 0, then repeatedly adds
// the point maximizing the distance to the current set; ties go to the
// smallest index. Deterministic; returned sorted. 2-approximates the
// optimal covering objective.
std::vector<std::size_t> sample_kcenter(const Dataset& data, std::size_t m);

// Subset of candidates whose closed epsilon-ball contains at least min_pts
// dataset points (the point itself counts). Candidates are checked in
// parallel; the result does not depend on evaluation order.
CoreSet find_core_points(const Dataset& data, const SpatialIndex& index,
                         std::span<const std::size_t> candidates, double epsilon,
                         int min_pts);

// Labels from a fixed core set.
//
// Graph mode: connected components of the graph with an edge from every
// core to each dataset point within epsilon_connect of it; points outside
// every such ball are noise. Nearest-core mode: components are computed
// over cores only (adjacent iff within epsilon_connect), then every
// non-core point joins its nearest core's cluster if that core is within
// epsilon, else is noise. Labels are canonical either way.
ClusterLabels cluster_from_cores(const Dataset& data, const SpatialIndex& index,
                                 const CoreSet& cores, double epsilon,
                                 double epsilon_connect, Assignment assignment,
                                 PhaseTimings* timings = nullptr);

// Core detection over all points, then cluster_from_cores.
// epsilon_connect <= 0 means "use epsilon".
ClusteringResult dbscan(const Dataset& data, const SpatialIndex& index,
                        double epsilon, int min_pts, double epsilon_connect = 0.0,
                        Assignment assignment = Assignment::kGraph);
ClusteringResult dbscan(const Dataset& data, double epsilon, int min_pts,
                        double epsilon_connect = 0.0,
                        Assignment assignment = Assignment::kGraph);

// Samples m candidates by the configured strategy, detects cores among
// them only, then clusters. Deterministic given params.seed.
ClusteringResult dbscan_pp(const Dataset& data, const SpatialIndex& index,
                           const AlgoParams& params);
ClusteringResult dbscan_pp(const Dataset& data, const AlgoParams& params);

}  // namespace dbscanpp
