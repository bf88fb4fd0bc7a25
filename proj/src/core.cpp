#include "dbscanpp/core.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace dbscanpp {

Dataset::Dataset(std::vector<double> coords, std::size_t dim)
    : coords_(std::move(coords)), dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("Dataset: dimension must be >= 1");
    if (coords_.empty()) throw std::invalid_argument("Dataset: needs at least one point");
    if (coords_.size() % dim_ != 0)
        throw std::invalid_argument("Dataset: coordinate count not a multiple of dim");
    for (double v : coords_)
        if (!std::isfinite(v))
            throw std::invalid_argument("Dataset: coordinates must be finite");
}

Dataset Dataset::from_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw std::invalid_argument("Dataset: needs at least one point");
    const std::size_t dim = points.front().size();
    std::vector<double> coords;
    coords.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim)
            throw std::invalid_argument("Dataset: points have inconsistent dimensions");
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return Dataset(std::move(coords), dim);
}

ClusterLabels labels_from_ids(std::vector<std::int32_t> ids) {
    std::int32_t max_id = -1;
    for (std::int32_t id : ids) {
        if (id < kNoise)
            throw std::invalid_argument("labels: ids must be kNoise or non-negative");
        max_id = std::max(max_id, id);
    }
    return ClusterLabels{std::move(ids), max_id + 1};
}

ClusterLabels canonicalize_labels(const ClusterLabels& labels) {
    std::unordered_map<std::int32_t, std::int32_t> remap;
    ClusterLabels out;
    out.ids.resize(labels.ids.size());
    std::int32_t next_id = 0;
    for (std::size_t i = 0; i < labels.ids.size(); ++i) {
        const std::int32_t id = labels.ids[i];
        if (id == kNoise) {
            out.ids[i] = kNoise;
            continue;
        }
        auto [it, inserted] = remap.emplace(id, next_id);
        if (inserted) ++next_id;
        out.ids[i] = it->second;
    }
    out.k = next_id;
    return out;
}

bool partitions_equal(const ClusterLabels& a, const ClusterLabels& b) {
    if (a.ids.size() != b.ids.size())
        throw std::invalid_argument("partitions_equal: labelings differ in length");
    return canonicalize_labels(a).ids == canonicalize_labels(b).ids;
}

std::string to_string(Strategy s) {
    return s == Strategy::kUniform ? "uniform" : "kcenter";
}

std::string to_string(Assignment a) {
    return a == Assignment::kGraph ? "graph" : "nearest-core";
}

void AlgoParams::validate(std::size_t n) const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (min_pts < 1) throw std::invalid_argument("min_pts must be >= 1");
    if (m < 1 || m > n) throw std::invalid_argument("m must be in [1, n]");
    if (connect_radius() < epsilon)
        throw std::invalid_argument("epsilon_connect must be >= epsilon");
}

std::size_t ClusteringResult::noise_count() const {
    std::size_t count = 0;
    for (std::int32_t id : labels.ids)
        if (id == kNoise) ++count;
    return count;
}

ClusterLabels read_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file: " + path.string());
    std::vector<std::int32_t> ids;
    long long value = 0;
    while (in >> value) ids.push_back(static_cast<std::int32_t>(value));
    if (!in.eof())
        throw std::runtime_error("malformed label file: " + path.string());
    if (ids.empty())
        throw std::runtime_error("empty label file: " + path.string());
    return labels_from_ids(std::move(ids));
}

void write_label_file(const std::filesystem::path& path, const ClusterLabels& labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write label file: " + path.string());
    for (std::int32_t id : labels.ids) out << id << '\n';
    if (!out) throw std::runtime_error("failed writing label file: " + path.string());
}

}  // namespace dbscanpp
