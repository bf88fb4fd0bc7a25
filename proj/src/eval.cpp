#include "dbscanpp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "dbscanpp/parallel.hpp"
#include "dbscanpp/spatial.hpp"

namespace dbscanpp {

namespace {

double half_pairs(std::int64_t x) {
    return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
}

double kahan_sum(const std::vector<double>& terms) {
    double sum = 0.0;
    double carry = 0.0;
    for (double t : terms) {
        const double y = t - carry;
        const double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    return sum;
}

}  // namespace

ContingencyTable contingency(const ClusterLabels& a, const ClusterLabels& b,
                             NoisePolicy policy) {
    if (a.ids.size() != b.ids.size())
        throw std::invalid_argument("contingency: labelings differ in length");

    std::unordered_map<std::int32_t, std::size_t> row_of, col_of;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(a.ids.size());
    for (std::size_t i = 0; i < a.ids.size(); ++i) {
        if (policy == NoisePolicy::kExclude &&
            (a.ids[i] == kNoise || b.ids[i] == kNoise))
            continue;
        const auto [rit, r_new] = row_of.emplace(a.ids[i], row_of.size());
        const auto [cit, c_new] = col_of.emplace(b.ids[i], col_of.size());
        cells.emplace_back(rit->second, cit->second);
    }

    ContingencyTable table;
    table.rows = row_of.size();
    table.cols = col_of.size();
    table.counts.assign(table.rows * table.cols, 0);
    table.row_sums.assign(table.rows, 0);
    table.col_sums.assign(table.cols, 0);
    for (const auto& [r, c] : cells) {
        ++table.counts[r * table.cols + c];
        ++table.row_sums[r];
        ++table.col_sums[c];
        ++table.total;
    }
    return table;
}

double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b,
                           NoisePolicy policy) {
    const ContingencyTable t = contingency(a, b, policy);
    if (t.total < 2)
        throw std::invalid_argument("adjusted_rand_index: needs at least 2 points");

    double sum_cells = 0.0;
    for (std::int64_t c : t.counts) sum_cells += half_pairs(c);
    double sum_rows = 0.0;
    for (std::int64_t r : t.row_sums) sum_rows += half_pairs(r);
    double sum_cols = 0.0;
    for (std::int64_t c : t.col_sums) sum_cols += half_pairs(c);

    const double expected = sum_rows * sum_cols / half_pairs(t.total);
    const double numerator = sum_cells - expected;
    const double denominator = 0.5 * (sum_rows + sum_cols) - expected;
    if (numerator == 0.0 && denominator == 0.0) return 1.0;
    return numerator / denominator;
}

double mutual_information(const ContingencyTable& t) {
    const double n = static_cast<double>(t.total);
    double mi = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) {
        for (std::size_t j = 0; j < t.cols; ++j) {
            const std::int64_t nij = t.at(i, j);
            if (nij == 0) continue;
            const double p = static_cast<double>(nij) / n;
            mi += p * (std::log(static_cast<double>(nij)) + std::log(n) -
                       std::log(static_cast<double>(t.row_sums[i])) -
                       std::log(static_cast<double>(t.col_sums[j])));
        }
    }
    return mi;
}

namespace {

double entropy(const std::vector<std::int64_t>& sums, std::int64_t total) {
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (std::int64_t s : sums) {
        if (s == 0) continue;
        const double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

double entropy_rows(const ContingencyTable& t) { return entropy(t.row_sums, t.total); }
double entropy_cols(const ContingencyTable& t) { return entropy(t.col_sums, t.total); }

double expected_mutual_info(const ContingencyTable& t) {
    const std::int64_t n = t.total;
    const double log_n = std::log(static_cast<double>(n));
    auto lf = [](std::int64_t k) {
        return std::lgamma(static_cast<double>(k) + 1.0);
    };

    // Exact hypergeometric expectation, one independent term per cell;
    // terms land in a fixed-order buffer so the final compensated sum does
    // not depend on scheduling.
    const std::size_t cell_count = t.rows * t.cols;
    std::vector<double> cell_terms(cell_count, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t cell = 0; cell < cell_count; ++cell) {
        const std::int64_t ai = t.row_sums[cell / t.cols];
        const std::int64_t bj = t.col_sums[cell % t.cols];
        if (ai == 0 || bj == 0) continue;
        const double log_fixed = lf(ai) + lf(bj) + lf(n - ai) + lf(n - bj) - lf(n);
        const std::int64_t lo = std::max<std::int64_t>(1, ai + bj - n);
        const std::int64_t hi = std::min(ai, bj);
        double acc = 0.0;
        for (std::int64_t nij = lo; nij <= hi; ++nij) {
            const double log_weight = log_fixed - lf(nij) - lf(ai - nij) -
                                      lf(bj - nij) - lf(n - ai - bj + nij);
            const double info = std::log(static_cast<double>(nij)) + log_n -
                                std::log(static_cast<double>(ai)) -
                                std::log(static_cast<double>(bj));
            acc += static_cast<double>(nij) / static_cast<double>(n) * info *
                   std::exp(log_weight);
        }
        cell_terms[cell] = acc;
    }
    return kahan_sum(cell_terms);
}

double adjusted_mutual_info(const ClusterLabels& a, const ClusterLabels& b,
                            AmiNormalization norm, NoisePolicy policy) {
    const ContingencyTable t = contingency(a, b, policy);
    if (t.total < 1)
        throw std::invalid_argument("adjusted_mutual_info: needs at least 1 point");

    const double h_rows = entropy_rows(t);
    const double h_cols = entropy_cols(t);
    const double normalizer = norm == AmiNormalization::kMax
                                  ? std::max(h_rows, h_cols)
                                  : 0.5 * (h_rows + h_cols);
    if (normalizer == 0.0) {
        // Both partitions are single blocks over the same points.
        return t.rows == 1 && t.cols == 1 ? 1.0 : 0.0;
    }

    // Identical partitions give MI = H(U) = H(V) analytically; take the
    // exact answer rather than dividing two equal-but-rounded sums. Every
    // marginal is positive, so "one nonzero cell per row and column" is
    // equivalent to "nonzero cells == rows == cols".
    if (t.rows == t.cols) {
        std::size_t nonzero = 0;
        for (std::int64_t c : t.counts) nonzero += c != 0;
        if (nonzero == t.rows) return 1.0;
    }

    const double mi = mutual_information(t);
    const double emi = expected_mutual_info(t);
    double denominator = normalizer - emi;
    if (denominator >= 0.0)
        denominator = std::max(denominator, 1e-12);
    else
        denominator = std::min(denominator, -1e-12);
    return (mi - emi) / denominator;
}

double hausdorff_distance(const Dataset& a, const Dataset& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("hausdorff_distance: dimension mismatch");

    const double inf = std::numeric_limits<double>::infinity();
    auto directed = [&](const Dataset& from, const SpatialIndex& to_index) {
        double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : worst)
        for (std::size_t i = 0; i < from.size(); ++i) {
            const auto hit = to_index.nearest_within(from.point(i), inf);
            worst = std::max(worst, hit->second);
        }
        return worst;
    };

    const SpatialIndex index_a(a);
    const SpatialIndex index_b(b);
    return std::max(directed(a, index_b), directed(b, index_a));
}

NoiseReport noise_report(const ClusteringResult& full, const ClusteringResult& pp) {
    if (full.labels.size() != pp.labels.size())
        throw std::invalid_argument("noise_report: results cover different datasets");
    if (full.params.epsilon != pp.params.epsilon ||
        full.params.min_pts != pp.params.min_pts)
        throw std::invalid_argument("noise_report: epsilon/min_pts differ between runs");
    if (full.params.assignment != Assignment::kGraph ||
        pp.params.assignment != Assignment::kGraph)
        throw std::invalid_argument("noise_report: both runs must use graph assignment");

    NoiseReport report;
    report.subset_holds = true;
    for (std::size_t i = 0; i < full.labels.size(); ++i) {
        const bool full_noise = full.labels.ids[i] == kNoise;
        const bool pp_noise = pp.labels.ids[i] == kNoise;
        if (full_noise) ++report.n_noise_dbscan;
        if (pp_noise) ++report.n_noise_pp;
        if (full_noise && !pp_noise) report.subset_holds = false;
    }
    report.ratio = static_cast<double>(pp.params.m) /
                   static_cast<double>(pp.labels.size());
    return report;
}

void DensitySpec::validate() const {
    if (dim < 1) throw std::invalid_argument("DensitySpec: dimension must be >= 1");
    const std::size_t k = weights.size();
    if (k == 0 || means.size() != k || scales.size() != k)
        throw std::invalid_argument("DensitySpec: weights/means/scales sizes differ");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("DensitySpec: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("DensitySpec: weights must sum to 1");
    for (double s : scales)
        if (!(s > 0.0)) throw std::invalid_argument("DensitySpec: scales must be positive");
    for (const auto& mean : means)
        if (mean.size() != dim)
            throw std::invalid_argument("DensitySpec: mean dimension mismatch");
}

double DensitySpec::density(std::span<const double> x) const {
    double f = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double s = scales[k];
        if (family == Family::kGaussianMixture) {
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = x[d] - means[k][d];
                sq += diff * diff;
            }
            const double norm =
                std::pow(2.0 * M_PI * s * s, -0.5 * static_cast<double>(dim));
            f += weights[k] * norm * std::exp(-0.5 * sq / (s * s));
        } else {
            bool inside = true;
            for (std::size_t d = 0; d < dim && inside; ++d)
                inside = std::abs(x[d] - means[k][d]) <= s;
            if (inside)
                f += weights[k] / std::pow(2.0 * s, static_cast<double>(dim));
        }
    }
    return f;
}

double DensitySpec::peak_density() const {
    double peak = 0.0;
    for (const auto& mean : means) peak = std::max(peak, density(mean));
    return peak;
}

Dataset level_set_ground_truth(const DensitySpec& spec, double lambda,
                               double resolution) {
    spec.validate();
    if (!(lambda > 0.0))
        throw std::invalid_argument("level_set_ground_truth: lambda must be > 0");
    if (!(resolution > 0.0))
        throw std::invalid_argument("level_set_ground_truth: resolution must be > 0");
    if (spec.dim > 3)
        throw std::invalid_argument("level_set_ground_truth: grid enumeration needs D <= 3");

    std::vector<double> lo(spec.dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(spec.dim, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
        for (std::size_t d = 0; d < spec.dim; ++d) {
            lo[d] = std::min(lo[d], spec.means[k][d] - 6.0 * spec.scales[k]);
            hi[d] = std::max(hi[d], spec.means[k][d] + 6.0 * spec.scales[k]);
        }
    }

    std::vector<std::size_t> steps(spec.dim);
    double cell_estimate = 1.0;
    for (std::size_t d = 0; d < spec.dim; ++d) {
        steps[d] = static_cast<std::size_t>((hi[d] - lo[d]) / resolution) + 1;
        cell_estimate *= static_cast<double>(steps[d]);
    }
    if (cell_estimate > 2e8)
        throw std::invalid_argument("level_set_ground_truth: resolution too fine");

    std::vector<double> coords;
    std::vector<double> x(spec.dim);
    std::vector<std::size_t> odo(spec.dim, 0);
    while (true) {
        for (std::size_t d = 0; d < spec.dim; ++d)
            x[d] = lo[d] + static_cast<double>(odo[d]) * resolution;
        if (spec.density(x) >= lambda)
            coords.insert(coords.end(), x.begin(), x.end());

        std::size_t d = 0;
        while (d < spec.dim && ++odo[d] == steps[d]) odo[d++] = 0;
        if (d == spec.dim) break;
    }

    if (coords.empty())
        throw std::runtime_error(
            "level_set_ground_truth: lambda above the maximum density on the grid");
    return Dataset(std::move(coords), spec.dim);
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    if (ari) j["ari"] = *ari;
    if (ami) j["ami"] = *ami;
    if (n_noise_dbscan) j["n_noise_dbscan"] = *n_noise_dbscan;
    if (n_noise_pp) j["n_noise_pp"] = *n_noise_pp;
    if (noise_subset) j["noise_subset"] = *noise_subset;
    if (hausdorff) j["hausdorff"] = *hausdorff;
    if (timings && include_timings) {
        j["timings_ms"] = {{"sampling", timings->sampling_ms},
                           {"core_detection", timings->core_detection_ms},
                           {"graph_build", timings->graph_build_ms},
                           {"components", timings->components_ms},
                           {"assignment", timings->assignment_ms},
                           {"total", timings->total_ms()}};
    }
    return j.dump(2);
}

}  // namespace dbscanpp
