#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbscanpp/core.hpp"
#include "dbscanpp/data.hpp"
#include "dbscanpp/eval.hpp"

namespace dbscanpp::bench {

// One experiment cell. Reproducible from its parameters and seed; only the
// timing columns vary between runs.
struct BenchRecord {
    std::string experiment;
    std::string algorithm;
    std::string dataset;
    std::size_t n = 0;
    std::size_t d = 0;
    double eps = 0.0;
    double eps_connect = 0.0;
    int min_pts = 0;
    std::size_t m = 0;
    double ratio = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";  // ok | timeout | skipped
    std::int32_t clusters = -1;
    std::int64_t noise = -1;
    double ari = std::numeric_limits<double>::quiet_NaN();
    double ami = std::numeric_limits<double>::quiet_NaN();
    double hausdorff = std::numeric_limits<double>::quiet_NaN();
    PhaseTimings timings;
};

// Fixed column order; NaN cells are written empty. strip_timings zeroes the
// ms columns so byte-identical golden files are possible.
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<BenchRecord>& records,
                       bool strip_timings = false);
void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<BenchRecord>& records,
                         bool strip_timings = false);

// Companion per-figure table: one (x, series, y) row per plotted point.
struct PlotRow {
    double x;
    std::string series;
    double y;
};
void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<PlotRow>& rows);

// Dataset factory: size and seed in, labeled sample out.
using Generator = std::function<LabeledDataset(std::size_t, std::uint64_t)>;

// Named generators used by the CLI: "gauss4x3d" (four 3-D unit Gaussians)
// and "gauss2x2d" (two well-separated 2-D unit Gaussians).
Generator named_generator(const std::string& name);

struct ScalingConfig {
    double eps = 0.5;
    int min_pts = 10;
    std::size_t m_fixed = 500;  // DBSCAN++ budget, held constant across sizes
    std::uint64_t seed = 0;
    int repetitions = 1;        // per cell; the median-total run is recorded
    double timeout_ms = 300000; // runs beyond this mark "timeout" and larger
                                // sizes of the same algorithm are skipped
};

struct ScalingResult {
    std::vector<BenchRecord> records;
    // log-log OLS slope per algorithm; needs >= 4 completed sizes, else NaN.
    std::map<std::string, double> slopes;
};

// Runtime-vs-n for DBSCAN and both DBSCAN++ strategies. Generation and
// index construction are untimed; phase clocks cover the pipeline only.
ScalingResult run_scaling_experiment(const Generator& generator,
                                     const std::string& dataset_name,
                                     const std::vector<std::size_t>& sizes,
                                     const ScalingConfig& config);

struct TradeoffConfig {
    double eps = 0.5;
    int min_pts = 10;
    std::uint64_t seed = 0;
};

// Scores/runtime/noise per m/n ratio for both strategies, plus a DBSCAN
// baseline row at ratio 1. Requires ground truth.
std::vector<BenchRecord> run_tradeoff_sweep(const LabeledDataset& dataset,
                                            const std::vector<double>& ratios,
                                            const TradeoffConfig& config);

struct EpsSweepConfig {
    int min_pts = 10;
    double m_ratio = 0.1;  // DBSCAN++ sample fraction
    std::uint64_t seed = 0;
};

struct EpsSweepResult {
    std::vector<BenchRecord> records;
    // Grid-measure of the eps interval scoring >= 90% of the algorithm's
    // own best ARI.
    std::map<std::string, double> robustness_width;
};

EpsSweepResult run_epsilon_sweep(const LabeledDataset& dataset,
                                 const std::vector<double>& eps_grid,
                                 const EpsSweepConfig& config);

struct LevelSetConfig {
    int min_pts = 10;
    double c = 0.0;           // plug-in constant for the eps formula
    double beta = 1.0;        // drives m via the minimax schedule
    bool m_full = false;      // use m = n instead of the minimax schedule
    std::size_t seeds = 5;
    double resolution = 0.05; // ground-truth grid step
    Strategy strategy = Strategy::kUniform;
};

struct LevelSetResult {
    std::vector<BenchRecord> records;
    std::map<std::size_t, double> median_hausdorff;  // per size, over seeds
};

// Hausdorff distance between DBSCAN++ cores and the analytic level set,
// per sample size, median over seeds. Empty core sets record +inf.
LevelSetResult run_levelset_experiment(const DensitySpec& spec, double lambda,
                                       const std::vector<std::size_t>& sizes,
                                       const LevelSetConfig& config);

// Least-squares slope of log(y) on log(x); NaN with fewer than 4 points.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pool-adjacent-violators fit, non-increasing.
std::vector<double> isotonic_non_increasing(const std::vector<double>& values);

// "start:stop:count" (inclusive, linear) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

}  // namespace dbscanpp::bench
