#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbscanpp/core.hpp"

namespace dbscanpp {

// A dataset plus optional ground-truth labels (never containing noise).
struct LabeledDataset {
    Dataset data;
    std::optional<ClusterLabels> truth;
};

// Comma-separated values, '.' decimal point, optional single header row.
// Numeric columns become coordinates; the label column (by name, or by
// 0-based index given as digits) becomes ground truth via first-occurrence
// encoding. Row order is preserved.
LabeledDataset load_csv(const std::filesystem::path& path, bool has_header,
                        const std::optional<std::string>& label_column = std::nullopt);

// Coordinates written with 17 significant digits, so load_csv(write_csv(x))
// reproduces x exactly. Truth labels, when present, go to a final column.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::optional<ClusterLabels>& truth = std::nullopt);

// n points from an isotropic Gaussian mixture; the component of each point
// is chosen by weight, coordinates are mean + scale * standard normal.
// Truth = component index. Identical bytes for identical seeds.
LabeledDataset gaussian_mixture(std::size_t n, std::size_t dim,
                                const std::vector<std::vector<double>>& means,
                                const std::vector<double>& scales,
                                const std::vector<double>& weights,
                                std::uint64_t seed);

// Axis-aligned box given by its lower and upper corners.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;
};

LabeledDataset uniform_mixture(std::size_t n, std::size_t dim,
                               const std::vector<Box>& boxes,
                               const std::vector<double>& weights,
                               std::uint64_t seed);

// One 5-dimensional point (x, y, R, G, B) per pixel, row-major, unscaled.
struct ImageDataset {
    Dataset points;
    std::size_t width = 0;
    std::size_t height = 0;
};

// Binary PPM (P6), 8-bit channels only.
ImageDataset load_image_ppm(const std::filesystem::path& path);

// Writes a P6 image: cluster ids cycle through a fixed palette, noise is
// black.
void labels_to_image(const ClusterLabels& labels, std::size_t width,
                     std::size_t height, const std::filesystem::path& path);

// Zero mean, unit variance per column (population variance); constant
// columns collapse to zero.
Dataset standardize(const Dataset& data);

// {n, d, has_truth, source} as a JSON string.
std::string dataset_metadata_json(const Dataset& data, bool has_truth,
                                  const std::string& source);

}  // namespace dbscanpp
