#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dbscanpp {

// Label given to points that belong to no cluster. Serialized as -1.
inline constexpr std::int32_t kNoise = -1;

// n points in R^D, row-major, immutable after construction.
class Dataset {
public:
    Dataset(std::vector<double> coords, std::size_t dim);

    static Dataset from_points(const std::vector<std::vector<double>>& points);

    std::size_t size() const { return coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }

    const std::vector<double>& coords() const { return coords_; }

private:
    std::vector<double> coords_;
    std::size_t dim_;
};

// Per-point cluster assignment: kNoise or an id in [0, k). Pipelines always
// return canonical labels (dense ids numbered by first occurrence); raw ids
// from intermediate steps are made canonical via canonicalize_labels.
struct ClusterLabels {
    std::vector<std::int32_t> ids;
    std::int32_t k = 0;

    std::size_t size() const { return ids.size(); }
};

// Wraps raw ids, computing k = max id + 1. Entries must be kNoise or >= 0.
ClusterLabels labels_from_ids(std::vector<std::int32_t> ids);

// Renumbers clusters by order of first occurrence; noise is preserved.
ClusterLabels canonicalize_labels(const ClusterLabels& labels);

// True iff both labelings induce the same partition with the same noise set.
bool partitions_equal(const ClusterLabels& a, const ClusterLabels& b);

// Strictly increasing indices into a dataset; the detected core points.
struct CoreSet {
    std::vector<std::size_t> indices;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

enum class Strategy { kUniform, kKCenter };
enum class Assignment { kGraph, kNearestCore };

std::string to_string(Strategy s);
std::string to_string(Assignment a);

// Full configuration of a clustering run.
struct AlgoParams {
    double epsilon = 1.0;
    int min_pts = 10;
    std::size_t m = 0;
    Strategy strategy = Strategy::kUniform;
    std::uint64_t seed = 0;
    // <= 0 means "use epsilon". Values above epsilon raise the cutoff used
    // when linking cores without changing core detection.
    double epsilon_connect = 0.0;
    Assignment assignment = Assignment::kGraph;

    double connect_radius() const {
        return epsilon_connect > 0.0 ? epsilon_connect : epsilon;
    }

    // Throws std::invalid_argument naming the offending field.
    void validate(std::size_t n) const;
};

// Wall-clock per phase, milliseconds.
struct PhaseTimings {
    double sampling_ms = 0.0;
    double core_detection_ms = 0.0;
    double graph_build_ms = 0.0;
    double components_ms = 0.0;
    double assignment_ms = 0.0;

    double total_ms() const {
        return sampling_ms + core_detection_ms + graph_build_ms + components_ms +
               assignment_ms;
    }
};

struct ClusteringResult {
    ClusterLabels labels;
    CoreSet cores;
    AlgoParams params;
    PhaseTimings timings;

    std::size_t noise_count() const;
};

// Label files: one integer per line, -1 = noise.
ClusterLabels read_label_file(const std::filesystem::path& path);
void write_label_file(const std::filesystem::path& path, const ClusterLabels& labels);

}  // namespace dbscanpp
