#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dbscanpp/core.hpp"

namespace dbscanpp::ref {

// Serial brute-force counterparts of the indexed, OpenMP-parallel kernels.
// They never touch SpatialIndex, so tests can use them as independent
// oracles, and the kernel benchmark uses them as the serial baseline.

std::vector<std::size_t> range_query(const Dataset& data,
                                     std::span<const double> center,
                                     double radius);

std::size_t count_within(const Dataset& data, std::span<const double> center,
                         double radius);

std::optional<std::pair<std::size_t, double>> nearest_within(
    const Dataset& data, std::span<const double> query, double radius);

CoreSet find_core_points(const Dataset& data,
                         std::span<const std::size_t> candidates, double epsilon,
                         int min_pts);

// Farthest-point traversal, single thread, maintained min-distance array.
std::vector<std::size_t> sample_kcenter(const Dataset& data, std::size_t m);

double hausdorff_distance(const Dataset& a, const Dataset& b);

// Whole-pipeline references: brute-force core detection plus BFS over the
// core-to-neighborhood graph (graph mode) or over cores with nearest-core
// attachment (nearest-core mode). Labels come back canonical.
ClusterLabels dbscan_graph(const Dataset& data, double epsilon, int min_pts,
                           double epsilon_connect);
ClusterLabels dbscan_nearest(const Dataset& data, double epsilon, int min_pts,
                             double epsilon_connect);

}  // namespace dbscanpp::ref
