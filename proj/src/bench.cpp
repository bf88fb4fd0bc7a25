#include "dbscanpp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dbscanpp/cluster.hpp"
#include "dbscanpp/hyperparams.hpp"
#include "dbscanpp/parallel.hpp"
#include "dbscanpp/spatial.hpp"

namespace dbscanpp::bench {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string format_ms(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.3f", v);
    return buffer;
}

void sort_records(std::vector<BenchRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const BenchRecord& a, const BenchRecord& b) {
                  return std::tie(a.experiment, a.algorithm, a.n, a.eps, a.ratio,
                                  a.m, a.seed) <
                         std::tie(b.experiment, b.algorithm, b.n, b.eps, b.ratio,
                                  b.m, b.seed);
              });
}

BenchRecord base_record(const std::string& experiment, const std::string& algorithm,
                        const std::string& dataset, const Dataset& data) {
    BenchRecord r;
    r.experiment = experiment;
    r.algorithm = algorithm;
    r.dataset = dataset;
    r.n = data.size();
    r.d = data.dim();
    return r;
}

void fill_from_result(BenchRecord& r, const ClusteringResult& result,
                      const std::optional<ClusterLabels>& truth) {
    r.eps = result.params.epsilon;
    r.eps_connect = result.params.connect_radius();
    r.min_pts = result.params.min_pts;
    r.m = result.params.m;
    r.ratio = static_cast<double>(result.params.m) /
              static_cast<double>(result.labels.size());
    r.seed = result.params.seed;
    r.clusters = result.labels.k;
    r.noise = static_cast<std::int64_t>(result.noise_count());
    r.timings = result.timings;
    if (truth) {
        r.ari = adjusted_rand_index(truth.value(), result.labels);
        r.ami = adjusted_mutual_info(truth.value(), result.labels);
    }
}

}  // namespace

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<BenchRecord>& records,
                       bool strip_timings) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path.string());
    out << "experiment,algorithm,dataset,n,d,eps,eps_connect,min_pts,m,ratio,"
           "seed,status,clusters,noise,ari,ami,hausdorff,ms_sampling,"
           "ms_core_detection,ms_graph_build,ms_components,ms_assignment,ms_total\n";
    for (const BenchRecord& r : records) {
        const PhaseTimings t = strip_timings ? PhaseTimings{} : r.timings;
        out << r.experiment << ',' << r.algorithm << ',' << r.dataset << ','
            << r.n << ',' << r.d << ',' << format_double(r.eps) << ','
            << format_double(r.eps_connect) << ',' << r.min_pts << ',' << r.m
            << ',' << format_double(r.ratio) << ',' << r.seed << ',' << r.status
            << ',' << r.clusters << ',' << r.noise << ',' << format_double(r.ari)
            << ',' << format_double(r.ami) << ',' << format_double(r.hausdorff)
            << ',' << format_ms(t.sampling_ms) << ','
            << format_ms(t.core_detection_ms) << ',' << format_ms(t.graph_build_ms)
            << ',' << format_ms(t.components_ms) << ','
            << format_ms(t.assignment_ms) << ',' << format_ms(t.total_ms()) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing CSV: " + path.string());
}

void write_records_jsonl(const std::filesystem::path& path,
                         const std::vector<BenchRecord>& records,
                         bool strip_timings) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write JSONL: " + path.string());
    for (const BenchRecord& r : records) {
        const PhaseTimings t = strip_timings ? PhaseTimings{} : r.timings;
        nlohmann::json j;
        j["experiment"] = r.experiment;
        j["algorithm"] = r.algorithm;
        j["dataset"] = r.dataset;
        j["n"] = r.n;
        j["d"] = r.d;
        j["eps"] = r.eps;
        j["eps_connect"] = r.eps_connect;
        j["min_pts"] = r.min_pts;
        j["m"] = r.m;
        j["ratio"] = r.ratio;
        j["seed"] = r.seed;
        j["status"] = r.status;
        j["clusters"] = r.clusters;
        j["noise"] = r.noise;
        j["ari"] = r.ari;
        j["ami"] = r.ami;
        j["hausdorff"] = r.hausdorff;
        j["timings_ms"] = {{"sampling", t.sampling_ms},
                           {"core_detection", t.core_detection_ms},
                           {"graph_build", t.graph_build_ms},
                           {"components", t.components_ms},
                           {"assignment", t.assignment_ms},
                           {"total", t.total_ms()}};
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("failed writing JSONL: " + path.string());
}

void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<PlotRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot CSV: " + path.string());
    out << "x,series,y\n";
    for (const PlotRow& row : rows)
        out << format_double(row.x) << ',' << row.series << ','
            << format_double(row.y) << '\n';
    if (!out) throw std::runtime_error("failed writing plot CSV: " + path.string());
}

Generator named_generator(const std::string& name) {
    if (name == "gauss4x3d") {
        return [](std::size_t n, std::uint64_t seed) {
            return gaussian_mixture(
                n, 3,
                {{0.0, 0.0, 0.0}, {5.0, 0.0, 0.0}, {0.0, 5.0, 0.0}, {0.0, 0.0, 5.0}},
                {1.0, 1.0, 1.0, 1.0}, {0.25, 0.25, 0.25, 0.25}, seed);
        };
    }
    if (name == "gauss2x2d") {
        return [](std::size_t n, std::uint64_t seed) {
            return gaussian_mixture(n, 2, {{-4.0, 0.0}, {4.0, 0.0}}, {1.0, 1.0},
                                    {0.5, 0.5}, seed);
        };
    }
    throw std::invalid_argument("unknown generator: " + name);
}

ScalingResult run_scaling_experiment(const Generator& generator,
                                     const std::string& dataset_name,
                                     const std::vector<std::size_t>& sizes,
                                     const ScalingConfig& config) {
    if (sizes.empty()) throw std::invalid_argument("scaling: sizes must be non-empty");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw std::invalid_argument("scaling: sizes must be increasing");

    const std::vector<std::string> algorithms{"dbscan", "dbscanpp-uniform",
                                              "dbscanpp-kcenter"};
    std::map<std::string, bool> timed_out;
    for (const auto& a : algorithms) timed_out[a] = false;

    ScalingResult out;
    for (std::size_t n : sizes) {
        const LabeledDataset sample = generator(n, config.seed);
        const SpatialIndex index(sample.data);

        for (const std::string& algorithm : algorithms) {
            BenchRecord record =
                base_record("scaling", algorithm, dataset_name, sample.data);
            record.seed = config.seed;
            if (timed_out[algorithm]) {
                record.status = "skipped";
                record.eps = config.eps;
                record.min_pts = config.min_pts;
                out.records.push_back(std::move(record));
                continue;
            }

            auto run_once = [&]() -> ClusteringResult {
                if (algorithm == "dbscan")
                    return dbscan(sample.data, index, config.eps, config.min_pts);
                AlgoParams params;
                params.epsilon = config.eps;
                params.min_pts = config.min_pts;
                params.m = std::min(config.m_fixed, n);
                params.seed = config.seed;
                params.strategy = algorithm == "dbscanpp-uniform"
                                      ? Strategy::kUniform
                                      : Strategy::kKCenter;
                return dbscan_pp(sample.data, index, params);
            };

            // Median-total repetition damps scheduler noise on small sizes.
            std::vector<ClusteringResult> runs;
            const int reps = std::max(1, config.repetitions);
            runs.reserve(static_cast<std::size_t>(reps));
            for (int rep = 0; rep < reps; ++rep) runs.push_back(run_once());
            std::sort(runs.begin(), runs.end(),
                      [](const ClusteringResult& a, const ClusteringResult& b) {
                          return a.timings.total_ms() < b.timings.total_ms();
                      });
            const ClusteringResult& median_run = runs[runs.size() / 2];

            fill_from_result(record, median_run, sample.truth);
            if (median_run.timings.total_ms() > config.timeout_ms) {
                record.status = "timeout";
                timed_out[algorithm] = true;
            }
            out.records.push_back(std::move(record));
        }
    }
    sort_records(out.records);

    for (const std::string& algorithm : algorithms) {
        std::vector<double> xs, ys;
        for (const BenchRecord& r : out.records)
            if (r.algorithm == algorithm && r.status == "ok") {
                xs.push_back(static_cast<double>(r.n));
                ys.push_back(r.timings.total_ms());
            }
        out.slopes[algorithm] = fit_loglog_slope(xs, ys);
    }
    return out;
}

std::vector<BenchRecord> run_tradeoff_sweep(const LabeledDataset& dataset,
                                            const std::vector<double>& ratios,
                                            const TradeoffConfig& config) {
    if (!dataset.truth)
        throw std::invalid_argument("tradeoff: ground truth required for scores");
    if (ratios.empty()) throw std::invalid_argument("tradeoff: ratios must be non-empty");
    for (double r : ratios)
        if (!(r > 0.0 && r <= 1.0))
            throw std::invalid_argument("tradeoff: ratios must lie in (0, 1]");

    const std::size_t n = dataset.data.size();
    const SpatialIndex index(dataset.data);
    std::vector<BenchRecord> records;

    const ClusteringResult baseline =
        dbscan(dataset.data, index, config.eps, config.min_pts);
    BenchRecord base =
        base_record("tradeoff", "dbscan", "input", dataset.data);
    fill_from_result(base, baseline, dataset.truth);
    base.ratio = 1.0;
    records.push_back(std::move(base));

    for (double ratio : ratios) {
        for (Strategy strategy : {Strategy::kUniform, Strategy::kKCenter}) {
            AlgoParams params;
            params.epsilon = config.eps;
            params.min_pts = config.min_pts;
            params.m = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))),
                1, n);
            params.strategy = strategy;
            params.seed = config.seed;
            const ClusteringResult result = dbscan_pp(dataset.data, index, params);

            BenchRecord record = base_record(
                "tradeoff", "dbscanpp-" + to_string(strategy), "input", dataset.data);
            fill_from_result(record, result, dataset.truth);
            record.ratio = ratio;
            records.push_back(std::move(record));
        }
    }
    sort_records(records);
    return records;
}

EpsSweepResult run_epsilon_sweep(const LabeledDataset& dataset,
                                 const std::vector<double>& eps_grid,
                                 const EpsSweepConfig& config) {
    if (!dataset.truth)
        throw std::invalid_argument("eps-sweep: ground truth required for scores");
    if (eps_grid.empty())
        throw std::invalid_argument("eps-sweep: grid must be non-empty");
    for (double e : eps_grid)
        if (!(e > 0.0)) throw std::invalid_argument("eps-sweep: grid must be positive");
    std::vector<double> grid = eps_grid;
    std::sort(grid.begin(), grid.end());

    const std::size_t n = dataset.data.size();
    const SpatialIndex index(dataset.data);
    EpsSweepResult out;

    for (double eps : grid) {
        {
            const ClusteringResult result =
                dbscan(dataset.data, index, eps, config.min_pts);
            BenchRecord record =
                base_record("eps-sweep", "dbscan", "input", dataset.data);
            fill_from_result(record, result, dataset.truth);
            out.records.push_back(std::move(record));
        }
        for (Strategy strategy : {Strategy::kUniform, Strategy::kKCenter}) {
            AlgoParams params;
            params.epsilon = eps;
            params.min_pts = config.min_pts;
            params.m = std::clamp<std::size_t>(
                static_cast<std::size_t>(
                    std::llround(config.m_ratio * static_cast<double>(n))),
                1, n);
            params.strategy = strategy;
            params.seed = config.seed;
            const ClusteringResult result = dbscan_pp(dataset.data, index, params);
            BenchRecord record = base_record(
                "eps-sweep", "dbscanpp-" + to_string(strategy), "input", dataset.data);
            fill_from_result(record, result, dataset.truth);
            out.records.push_back(std::move(record));
        }
    }
    sort_records(out.records);

    // Robustness: grid measure (half-cell at the edges) of the eps values
    // whose ARI reaches 90% of the algorithm's own best.
    for (const std::string& algorithm :
         {std::string("dbscan"), std::string("dbscanpp-uniform"),
          std::string("dbscanpp-kcenter")}) {
        std::vector<double> scores(grid.size(), 0.0);
        std::size_t cursor = 0;
        for (const BenchRecord& r : out.records)
            if (r.algorithm == algorithm) scores[cursor++] = r.ari;

        const double best = *std::max_element(scores.begin(), scores.end());
        double width = 0.0;
        if (best > 0.0) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (scores[i] < 0.9 * best) continue;
                const double left = i == 0 ? grid[0] : grid[i - 1];
                const double right = i + 1 == grid.size() ? grid.back() : grid[i + 1];
                width += 0.5 * (right - left);
            }
        }
        out.robustness_width[algorithm] = width;
    }
    return out;
}

LevelSetResult run_levelset_experiment(const DensitySpec& spec, double lambda,
                                       const std::vector<std::size_t>& sizes,
                                       const LevelSetConfig& config) {
    spec.validate();
    if (sizes.empty()) throw std::invalid_argument("levelset: sizes must be non-empty");
    if (config.seeds < 1) throw std::invalid_argument("levelset: needs >= 1 seed");

    const Dataset truth_set = level_set_ground_truth(spec, lambda, config.resolution);

    LevelSetResult out;
    for (std::size_t n : sizes) {
        const double eps =
            params::epsilon_for_level(lambda, config.min_pts, n, spec.dim, config.c);
        const std::size_t m =
            config.m_full ? n : params::m_minimax(n, spec.dim, config.beta);

        std::vector<double> distances;
        for (std::uint64_t seed = 0; seed < config.seeds; ++seed) {
            const LabeledDataset sample = [&] {
                if (spec.family == DensitySpec::Family::kGaussianMixture)
                    return gaussian_mixture(n, spec.dim, spec.means, spec.scales,
                                            spec.weights, seed);
                std::vector<Box> boxes;
                for (std::size_t k = 0; k < spec.means.size(); ++k) {
                    Box box;
                    for (std::size_t d = 0; d < spec.dim; ++d) {
                        box.lower.push_back(spec.means[k][d] - spec.scales[k]);
                        box.upper.push_back(spec.means[k][d] + spec.scales[k]);
                    }
                    boxes.push_back(std::move(box));
                }
                return uniform_mixture(n, spec.dim, boxes, spec.weights, seed);
            }();

            AlgoParams params;
            params.epsilon = eps;
            params.min_pts = config.min_pts;
            params.m = std::min(m, n);
            params.strategy = config.strategy;
            params.seed = seed;
            const ClusteringResult result = dbscan_pp(sample.data, params);

            BenchRecord record = base_record("levelset", "dbscanpp-" +
                                             to_string(config.strategy),
                                             "density-spec", sample.data);
            fill_from_result(record, result, std::nullopt);
            if (result.cores.empty()) {
                record.hausdorff = std::numeric_limits<double>::infinity();
            } else {
                std::vector<double> coords;
                coords.reserve(result.cores.size() * spec.dim);
                for (std::size_t c : result.cores.indices) {
                    const auto p = sample.data.point(c);
                    coords.insert(coords.end(), p.begin(), p.end());
                }
                const Dataset core_points(std::move(coords), spec.dim);
                record.hausdorff = hausdorff_distance(core_points, truth_set);
            }
            distances.push_back(record.hausdorff);
            out.records.push_back(std::move(record));
        }

        std::sort(distances.begin(), distances.end());
        const std::size_t mid = distances.size() / 2;
        out.median_hausdorff[n] = distances.size() % 2 == 1
                                      ? distances[mid]
                                      : 0.5 * (distances[mid - 1] + distances[mid]);
    }
    sort_records(out.records);
    return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4)
        return std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            return std::numeric_limits<double>::quiet_NaN();
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> isotonic_non_increasing(const std::vector<double>& values) {
    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
            blocks[blocks.size() - 2].sum += blocks.back().sum;
            blocks[blocks.size() - 2].count += blocks.back().count;
            blocks.pop_back();
        }
    }
    std::vector<double> fitted;
    fitted.reserve(values.size());
    for (const Block& b : blocks)
        fitted.insert(fitted.end(), b.count, b.mean());
    return fitted;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty grid specification");
    if (text.find(':') != std::string::npos) {
        std::stringstream stream(text);
        std::string a, b, c;
        if (!std::getline(stream, a, ':') || !std::getline(stream, b, ':') ||
            !std::getline(stream, c))
            throw std::invalid_argument("grid must be start:stop:count");
        const double start = std::stod(a);
        const double stop = std::stod(b);
        const long count = std::stol(c);
        if (count < 1) throw std::invalid_argument("grid count must be >= 1");
        std::vector<double> grid;
        if (count == 1) {
            grid.push_back(start);
        } else {
            for (long i = 0; i < count; ++i)
                grid.push_back(start + (stop - start) * static_cast<double>(i) /
                                           static_cast<double>(count - 1));
        }
        return grid;
    }
    std::vector<double> grid;
    std::stringstream stream(text);
    std::string cell;
    while (std::getline(stream, cell, ','))
        grid.push_back(std::stod(cell));
    if (grid.empty()) throw std::invalid_argument("empty grid specification");
    return grid;
}

}  // namespace dbscanpp::bench
