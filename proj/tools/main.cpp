#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbscanpp/bench.hpp"
#include "dbscanpp/cluster.hpp"
#include "dbscanpp/data.hpp"
#include "dbscanpp/eval.hpp"
#include "dbscanpp/hyperparams.hpp"
#include "dbscanpp/parallel.hpp"
#include "dbscanpp/spatial.hpp"

namespace fs = std::filesystem;
using namespace dbscanpp;

namespace {

struct ClusterOptions {
    std::string input;
    std::string algo = "dbscan";
    double eps = 0.0;
    int min_pts = params::minpts_default();
    double eps_connect = 0.0;
    std::string assign = "graph";
    std::string strategy = "uniform";
    std::size_t m = 0;
    double m_ratio = 0.0;
    double m_p = 0.0;
    std::uint64_t seed = 0;
    bool has_header = false;
    std::string label_column;
    bool do_standardize = false;
    std::string out;
    std::string report;
    std::string meta_out;
    bool no_timings = false;
};

void add_common_cluster_flags(CLI::App* cmd, ClusterOptions& opt) {
    cmd->add_option("--algo", opt.algo, "Algorithm: dbscan or dbscanpp")
        ->check(CLI::IsMember({"dbscan", "dbscanpp"}))
        ->capture_default_str();
    cmd->add_option("--eps", opt.eps, "Neighborhood radius")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--min-pts", opt.min_pts, "Density threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--eps-connect", opt.eps_connect,
                    "Connection radius for linking cores (default: --eps)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--assign", opt.assign, "Assignment mode")
        ->check(CLI::IsMember({"graph", "nearest-core"}))
        ->capture_default_str();
    cmd->add_option("--strategy", opt.strategy, "DBSCAN++ sampling strategy")
        ->check(CLI::IsMember({"uniform", "kcenter"}))
        ->capture_default_str();
    auto* m_abs = cmd->add_option("--m", opt.m, "DBSCAN++ sample size (absolute)");
    auto* m_ratio = cmd->add_option("--m-ratio", opt.m_ratio,
                                    "DBSCAN++ sample size as a fraction of n")
                        ->check(CLI::Range(0.0, 1.0));
    auto* m_p =
        cmd->add_option("--m-p", opt.m_p, "DBSCAN++ sample size via p * n^(D/(D+4))")
            ->check(CLI::Range(0.0, 1.0));
    m_abs->excludes(m_ratio)->excludes(m_p);
    m_ratio->excludes(m_p);
    cmd->add_option("--seed", opt.seed, "Seed for all randomness")
        ->capture_default_str();
    cmd->add_flag("--no-timings", opt.no_timings,
                  "Strip timings from reports (for byte-stable output)");
}

Strategy parse_strategy(const std::string& s) {
    return s == "kcenter" ? Strategy::kKCenter : Strategy::kUniform;
}

Assignment parse_assignment(const std::string& s) {
    return s == "nearest-core" ? Assignment::kNearestCore : Assignment::kGraph;
}

std::size_t resolve_m(const ClusterOptions& opt, std::size_t n, std::size_t dim) {
    if (opt.m > 0) return std::min(opt.m, n);
    if (opt.m_ratio > 0.0)
        return std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(opt.m_ratio * static_cast<double>(n))),
            1, n);
    if (opt.m_p > 0.0) return params::m_schedule(n, dim, opt.m_p);
    throw std::invalid_argument(
        "--algo dbscanpp requires exactly one of --m, --m-ratio, --m-p");
}

ClusteringResult run_configured(const ClusterOptions& opt, const Dataset& data) {
    const SpatialIndex index(data);
    if (opt.algo == "dbscan")
        return dbscan(data, index, opt.eps, opt.min_pts, opt.eps_connect,
                      parse_assignment(opt.assign));
    AlgoParams params;
    params.epsilon = opt.eps;
    params.min_pts = opt.min_pts;
    params.m = resolve_m(opt, data.size(), data.dim());
    params.strategy = parse_strategy(opt.strategy);
    params.seed = opt.seed;
    params.epsilon_connect = opt.eps_connect;
    params.assignment = parse_assignment(opt.assign);
    return dbscan_pp(data, index, params);
}

void write_report(const std::string& path, const ClusteringResult& result,
                  const std::optional<ClusterLabels>& truth, bool no_timings) {
    EvalReport report;
    if (truth) {
        report.ari = adjusted_rand_index(*truth, result.labels);
        report.ami = adjusted_mutual_info(*truth, result.labels);
    }
    report.timings = result.timings;
    report.include_timings = !no_timings;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << report.to_json() << '\n';
}

int cmd_cluster(const ClusterOptions& opt) {
    if (!fs::exists(opt.input))
        throw std::runtime_error("input file not found: " + opt.input);
    std::optional<std::string> label_column;
    if (!opt.label_column.empty()) label_column = opt.label_column;
    LabeledDataset loaded = load_csv(opt.input, opt.has_header, label_column);
    if (opt.do_standardize) loaded.data = standardize(loaded.data);

    const ClusteringResult result = run_configured(opt, loaded.data);

    const std::string out_path =
        opt.out.empty() ? opt.input + ".labels.txt" : opt.out;
    write_label_file(out_path, result.labels);
    const std::string report_path =
        opt.report.empty() ? opt.input + ".report.json" : opt.report;
    write_report(report_path, result, loaded.truth, opt.no_timings);
    if (!opt.meta_out.empty()) {
        std::ofstream meta(opt.meta_out);
        if (!meta) throw std::runtime_error("cannot write metadata: " + opt.meta_out);
        meta << dataset_metadata_json(loaded.data, loaded.truth.has_value(),
                                      opt.input)
             << '\n';
    }

    const std::string name =
        opt.algo == "dbscan" ? "dbscan" : "dbscanpp-" + opt.strategy;
    std::printf("%s k=%d noise=%zu elapsed_ms=%.3f\n", name.c_str(), result.labels.k,
                result.noise_count(), result.timings.total_ms());
    return 0;
}

int cmd_segment(const ClusterOptions& opt, const std::string& out_path) {
    if (!fs::exists(opt.input))
        throw std::runtime_error("input file not found: " + opt.input);
    const ImageDataset image = load_image_ppm(opt.input);
    const ClusteringResult result = run_configured(opt, image.points);

    const std::string target =
        out_path.empty() ? opt.input + ".seg.ppm" : out_path;
    labels_to_image(result.labels, image.width, image.height, target);
    std::printf("segments=%d noise=%zu elapsed_ms=%.3f\n", result.labels.k,
                result.noise_count(), result.timings.total_ms());
    return 0;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    for (double v : bench::parse_grid(text)) {
        if (v < 1.0) throw std::invalid_argument("--sizes entries must be >= 1");
        sizes.push_back(static_cast<std::size_t>(v));
    }
    return sizes;
}

LabeledDataset load_sweep_input(const std::string& input, const std::string& gen,
                                std::size_t gen_n, std::uint64_t seed,
                                bool has_header, const std::string& label_column) {
    if (!gen.empty()) return bench::named_generator(gen)(gen_n, seed);
    if (input.empty())
        throw std::invalid_argument("provide an input CSV or --gen <name>");
    if (!fs::exists(input))
        throw std::runtime_error("input file not found: " + input);
    std::optional<std::string> column;
    if (!label_column.empty()) column = label_column;
    return load_csv(input, has_header, column);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DBSCAN and DBSCAN++ density clustering toolkit"};
    app.require_subcommand(1);

    int workers = 0;
    app.add_option("--workers", workers,
                   "Thread budget for parallel kernels (default: all)");

    // cluster
    ClusterOptions cluster_opt;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster a CSV dataset");
    cluster_cmd->add_option("input", cluster_opt.input, "Input CSV file")->required();
    add_common_cluster_flags(cluster_cmd, cluster_opt);
    cluster_cmd->add_flag("--has-header", cluster_opt.has_header,
                          "First CSV row is a header");
    cluster_cmd->add_option("--label-column", cluster_opt.label_column,
                            "Ground-truth column (name or 0-based index)");
    cluster_cmd->add_flag("--standardize", cluster_opt.do_standardize,
                          "Zero-mean/unit-variance per column before clustering");
    cluster_cmd->add_option("--out", cluster_opt.out, "Label file path");
    cluster_cmd->add_option("--report", cluster_opt.report, "Report JSON path");
    cluster_cmd->add_option("--meta-out", cluster_opt.meta_out,
                            "Dataset metadata JSON path");

    // segment
    ClusterOptions segment_opt;
    std::string segment_out;
    auto* segment_cmd =
        app.add_subcommand("segment", "Segment a P6 PPM image by pixel clustering");
    segment_cmd->add_option("input", segment_opt.input, "Input PPM (P6) image")
        ->required();
    add_common_cluster_flags(segment_cmd, segment_opt);
    segment_cmd->add_option("--out", segment_out, "Segmented PPM path");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Experiment harness");
    bench_cmd->require_subcommand(1);

    std::string sc_gen = "gauss4x3d", sc_sizes = "1000,2000,4000,8000";
    bench::ScalingConfig sc_cfg;
    std::string sc_prefix = "scaling";
    bool sc_no_timings = false;
    auto* scaling_cmd = bench_cmd->add_subcommand("scaling", "Runtime vs dataset size");
    scaling_cmd->add_option("--gen", sc_gen, "Named generator")->capture_default_str();
    scaling_cmd->add_option("--sizes", sc_sizes, "Comma list of sizes")
        ->capture_default_str();
    scaling_cmd->add_option("--eps", sc_cfg.eps, "Radius")->capture_default_str();
    scaling_cmd->add_option("--min-pts", sc_cfg.min_pts, "Density threshold")
        ->capture_default_str();
    scaling_cmd->add_option("--m", sc_cfg.m_fixed, "Fixed DBSCAN++ sample size")
        ->capture_default_str();
    scaling_cmd->add_option("--seed", sc_cfg.seed, "Seed")->capture_default_str();
    scaling_cmd->add_option("--reps", sc_cfg.repetitions, "Repetitions per cell")
        ->capture_default_str();
    scaling_cmd->add_option("--timeout-ms", sc_cfg.timeout_ms, "Per-run budget")
        ->capture_default_str();
    scaling_cmd->add_option("--out-prefix", sc_prefix, "Output path prefix")
        ->capture_default_str();
    scaling_cmd->add_flag("--no-timings", sc_no_timings,
                          "Zero the ms columns in outputs");

    std::string to_input, to_gen, to_label_column, to_ratios = "0.05,0.1,0.2,0.3,0.5,1.0";
    std::size_t to_gen_n = 5000;
    bool to_has_header = false, to_no_timings = false;
    bench::TradeoffConfig to_cfg;
    std::string to_prefix = "tradeoff";
    auto* tradeoff_cmd =
        bench_cmd->add_subcommand("tradeoff", "Scores and runtime vs m/n ratio");
    tradeoff_cmd->add_option("input", to_input, "Labeled CSV input");
    tradeoff_cmd->add_option("--gen", to_gen, "Named generator instead of a file");
    tradeoff_cmd->add_option("--n", to_gen_n, "Generator sample size")
        ->capture_default_str();
    tradeoff_cmd->add_option("--ratios", to_ratios, "Comma list of m/n ratios")
        ->capture_default_str();
    tradeoff_cmd->add_option("--eps", to_cfg.eps, "Radius")->required();
    tradeoff_cmd->add_option("--min-pts", to_cfg.min_pts, "Density threshold")
        ->capture_default_str();
    tradeoff_cmd->add_option("--seed", to_cfg.seed, "Seed")->capture_default_str();
    tradeoff_cmd->add_flag("--has-header", to_has_header, "CSV header row");
    tradeoff_cmd->add_option("--label-column", to_label_column,
                             "Ground-truth column (name or 0-based index)");
    tradeoff_cmd->add_option("--out-prefix", to_prefix, "Output path prefix")
        ->capture_default_str();
    tradeoff_cmd->add_flag("--no-timings", to_no_timings,
                           "Zero the ms columns in outputs");

    std::string es_input, es_gen, es_label_column, es_grid;
    std::size_t es_gen_n = 5000;
    bool es_has_header = false, es_no_timings = false;
    bench::EpsSweepConfig es_cfg;
    std::string es_prefix = "eps_sweep";
    auto* eps_cmd = bench_cmd->add_subcommand("eps-sweep", "Scores across an eps grid");
    eps_cmd->add_option("input", es_input, "Labeled CSV input");
    eps_cmd->add_option("--gen", es_gen, "Named generator instead of a file");
    eps_cmd->add_option("--n", es_gen_n, "Generator sample size")->capture_default_str();
    eps_cmd->add_option("--eps", es_grid, "Grid: start:stop:count or comma list")
        ->required();
    eps_cmd->add_option("--min-pts", es_cfg.min_pts, "Density threshold")
        ->capture_default_str();
    eps_cmd->add_option("--m-ratio", es_cfg.m_ratio, "DBSCAN++ sample fraction")
        ->capture_default_str();
    eps_cmd->add_option("--seed", es_cfg.seed, "Seed")->capture_default_str();
    eps_cmd->add_flag("--has-header", es_has_header, "CSV header row");
    eps_cmd->add_option("--label-column", es_label_column,
                        "Ground-truth column (name or 0-based index)");
    eps_cmd->add_option("--out-prefix", es_prefix, "Output path prefix")
        ->capture_default_str();
    eps_cmd->add_flag("--no-timings", es_no_timings, "Zero the ms columns in outputs");

    double ls_lambda = 0.03;
    std::string ls_sizes = "1000,4000,16000";
    bench::LevelSetConfig ls_cfg;
    std::string ls_strategy = "uniform";
    std::string ls_family = "gaussian";
    std::string ls_means = "-3,0;3,0";
    std::string ls_scales = "1,1";
    std::string ls_weights = "0.5,0.5";
    std::string ls_prefix = "levelset";
    bool ls_no_timings = false;
    auto* levelset_cmd = bench_cmd->add_subcommand(
        "levelset", "Hausdorff distance between cores and the analytic level set");
    levelset_cmd->add_option("--lambda", ls_lambda, "Density level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    levelset_cmd->add_option("--sizes", ls_sizes, "Comma list of sizes")
        ->capture_default_str();
    levelset_cmd->add_option("--min-pts", ls_cfg.min_pts, "Density threshold")
        ->capture_default_str();
    levelset_cmd->add_option("--c", ls_cfg.c, "Plug-in constant for the eps formula")
        ->capture_default_str();
    levelset_cmd->add_option("--beta", ls_cfg.beta, "Regularity exponent for m")
        ->capture_default_str();
    levelset_cmd->add_flag("--m-full", ls_cfg.m_full, "Use m = n");
    levelset_cmd->add_option("--seeds", ls_cfg.seeds, "Seeds per size")
        ->capture_default_str();
    levelset_cmd->add_option("--resolution", ls_cfg.resolution, "Ground-truth grid step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    levelset_cmd->add_option("--strategy", ls_strategy, "Sampling strategy")
        ->check(CLI::IsMember({"uniform", "kcenter"}))
        ->capture_default_str();
    levelset_cmd->add_option("--family", ls_family, "Density family")
        ->check(CLI::IsMember({"gaussian", "uniform"}))
        ->capture_default_str();
    levelset_cmd->add_option("--means", ls_means, "Component means, ';' separated")
        ->capture_default_str();
    levelset_cmd->add_option("--scales", ls_scales, "Component scales")
        ->capture_default_str();
    levelset_cmd->add_option("--weights", ls_weights, "Component weights")
        ->capture_default_str();
    levelset_cmd->add_option("--out-prefix", ls_prefix, "Output path prefix")
        ->capture_default_str();
    levelset_cmd->add_flag("--no-timings", ls_no_timings,
                           "Zero the ms columns in outputs");

    // eval
    std::string eval_a, eval_b;
    auto* eval_cmd =
        app.add_subcommand("eval", "Score two label files against each other");
    eval_cmd->add_option("labels_a", eval_a, "First label file")->required();
    eval_cmd->add_option("labels_b", eval_b, "Second label file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (workers > 0) set_threads(workers);

    try {
        if (cluster_cmd->parsed()) return cmd_cluster(cluster_opt);
        if (segment_cmd->parsed()) return cmd_segment(segment_opt, segment_out);

        if (scaling_cmd->parsed()) {
            const auto result = bench::run_scaling_experiment(
                bench::named_generator(sc_gen), sc_gen, parse_sizes(sc_sizes), sc_cfg);
            bench::write_records_csv(sc_prefix + ".csv", result.records, sc_no_timings);
            bench::write_records_jsonl(sc_prefix + ".jsonl", result.records,
                                       sc_no_timings);
            std::vector<bench::PlotRow> plot;
            for (const auto& r : result.records)
                if (r.status == "ok")
                    plot.push_back({static_cast<double>(r.n), r.algorithm,
                                    sc_no_timings ? 0.0 : r.timings.total_ms()});
            bench::write_plot_csv(sc_prefix + ".plot.csv", plot);
            for (const auto& [algorithm, slope] : result.slopes)
                std::printf("slope %s %.4f\n", algorithm.c_str(), slope);
            return 0;
        }

        if (tradeoff_cmd->parsed()) {
            const LabeledDataset input = load_sweep_input(
                to_input, to_gen, to_gen_n, to_cfg.seed, to_has_header, to_label_column);
            const auto records =
                bench::run_tradeoff_sweep(input, bench::parse_grid(to_ratios), to_cfg);
            bench::write_records_csv(to_prefix + ".csv", records, to_no_timings);
            bench::write_records_jsonl(to_prefix + ".jsonl", records, to_no_timings);
            std::vector<bench::PlotRow> plot;
            for (const auto& r : records) {
                plot.push_back({r.ratio, r.algorithm + ":ari", r.ari});
                plot.push_back({r.ratio, r.algorithm + ":noise",
                                static_cast<double>(r.noise)});
            }
            bench::write_plot_csv(to_prefix + ".plot.csv", plot);
            std::printf("tradeoff rows=%zu\n", records.size());
            return 0;
        }

        if (eps_cmd->parsed()) {
            const LabeledDataset input = load_sweep_input(
                es_input, es_gen, es_gen_n, es_cfg.seed, es_has_header, es_label_column);
            const auto result =
                bench::run_epsilon_sweep(input, bench::parse_grid(es_grid), es_cfg);
            bench::write_records_csv(es_prefix + ".csv", result.records, es_no_timings);
            bench::write_records_jsonl(es_prefix + ".jsonl", result.records,
                                       es_no_timings);
            std::vector<bench::PlotRow> plot;
            for (const auto& r : result.records)
                plot.push_back({r.eps, r.algorithm + ":ari", r.ari});
            bench::write_plot_csv(es_prefix + ".plot.csv", plot);
            for (const auto& [algorithm, width] : result.robustness_width)
                std::printf("robustness_width %s %.6f\n", algorithm.c_str(), width);
            return 0;
        }

        if (levelset_cmd->parsed()) {
            DensitySpec spec;
            spec.family = ls_family == "gaussian"
                              ? DensitySpec::Family::kGaussianMixture
                              : DensitySpec::Family::kUniformMixture;
            for (double w : bench::parse_grid(ls_weights)) spec.weights.push_back(w);
            for (double s : bench::parse_grid(ls_scales)) spec.scales.push_back(s);
            std::stringstream means_stream(ls_means);
            std::string component;
            while (std::getline(means_stream, component, ';'))
                spec.means.push_back(bench::parse_grid(component));
            spec.dim = spec.means.empty() ? 0 : spec.means.front().size();
            ls_cfg.strategy = parse_strategy(ls_strategy);

            const auto result = bench::run_levelset_experiment(
                spec, ls_lambda, parse_sizes(ls_sizes), ls_cfg);
            bench::write_records_csv(ls_prefix + ".csv", result.records, ls_no_timings);
            bench::write_records_jsonl(ls_prefix + ".jsonl", result.records,
                                       ls_no_timings);
            std::vector<bench::PlotRow> plot;
            for (const auto& [n, median] : result.median_hausdorff)
                plot.push_back({static_cast<double>(n), "median_hausdorff", median});
            bench::write_plot_csv(ls_prefix + ".plot.csv", plot);
            for (const auto& [n, median] : result.median_hausdorff)
                std::printf("median_hausdorff n=%zu %.6f\n", n, median);
            return 0;
        }

        if (eval_cmd->parsed()) {
            try {
                const ClusterLabels a = read_label_file(eval_a);
                const ClusterLabels b = read_label_file(eval_b);
                nlohmann::json j;
                j["ari"] = adjusted_rand_index(a, b);
                j["ami"] = adjusted_mutual_info(a, b);
                std::cout << j.dump() << '\n';
                return 0;
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 1;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
