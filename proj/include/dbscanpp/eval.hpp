#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbscanpp/core.hpp"

namespace dbscanpp {

// How noise labels enter the contingency table: as one ordinary cluster of
// their own (what the common reference scorers do with -1), or dropped
// entirely (a point is dropped if either labeling marks it noise).
enum class NoisePolicy { kAsCluster, kExclude };

enum class AmiNormalization { kMax, kMean };

// Co-occurrence counts between two labelings plus their marginals.
struct ContingencyTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> counts;  // rows x cols, row-major
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;

    std::int64_t at(std::size_t i, std::size_t j) const {
        return counts[i * cols + j];
    }
};

ContingencyTable contingency(const ClusterLabels& a, const ClusterLabels& b,
                             NoisePolicy policy = NoisePolicy::kAsCluster);

// Chance-corrected pair-counting agreement, in [-1, 1]. 1 when both the
// raw numerator and denominator vanish (nothing to correct).
double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b,
                           NoisePolicy policy = NoisePolicy::kAsCluster);

// Mutual information corrected by its exact expectation under the
// fixed-marginals hypergeometric model; normalized by max(H(U), H(V))
// (or their mean). Natural logs throughout.
double adjusted_mutual_info(const ClusterLabels& a, const ClusterLabels& b,
                            AmiNormalization norm = AmiNormalization::kMax,
                            NoisePolicy policy = NoisePolicy::kAsCluster);

// Building blocks, exposed for tests and diagnostics.
double mutual_information(const ContingencyTable& table);
double entropy_rows(const ContingencyTable& table);
double entropy_cols(const ContingencyTable& table);
double expected_mutual_info(const ContingencyTable& table);

// max over both directed sup-min distances; exact, index-accelerated.
double hausdorff_distance(const Dataset& a, const Dataset& b);

// Noise-set comparison between a full run and a subsampled run with the
// same epsilon and min_pts (graph mode).
struct NoiseReport {
    std::size_t n_noise_dbscan = 0;
    std::size_t n_noise_pp = 0;
    bool subset_holds = false;
    double ratio = 0.0;  // m/n of the subsampled run
};

NoiseReport noise_report(const ClusteringResult& full, const ClusteringResult& pp);

// Synthetic density with analytically evaluable f: isotropic mixture of
// Gaussians, or of axis-aligned uniform boxes [mean - scale, mean + scale].
struct DensitySpec {
    enum class Family { kGaussianMixture, kUniformMixture };

    Family family = Family::kGaussianMixture;
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<double> scales;
    std::size_t dim = 1;

    void validate() const;
    double density(std::span<const double> x) const;
    double peak_density() const;  // max over component means
};

// All grid points (step = resolution) with f(x) >= lambda, over a bounding
// box extending 6 scale units past every component. Dimension <= 3.
// Throws if no grid point reaches lambda.
Dataset level_set_ground_truth(const DensitySpec& spec, double lambda,
                               double resolution);

// Experiment record serialized with fixed field names; unset fields are
// omitted. Timings are dropped when include_timings is false so repeated
// runs compare byte-identical.
struct EvalReport {
    std::optional<double> ari;
    std::optional<double> ami;
    std::optional<std::size_t> n_noise_dbscan;
    std::optional<std::size_t> n_noise_pp;
    std::optional<bool> noise_subset;
    std::optional<double> hausdorff;
    std::optional<PhaseTimings> timings;
    bool include_timings = true;

    std::string to_json() const;
};

}  // namespace dbscanpp
