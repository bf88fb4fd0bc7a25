#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dbscanpp/bench.hpp"
#include "dbscanpp/cluster.hpp"
#include "test_util.hpp"

using namespace dbscanpp;
namespace fs = std::filesystem;

TEST_CASE("parse_grid") {
    CHECK(bench::parse_grid("1,2,3") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(bench::parse_grid("2.5") == std::vector<double>{2.5});
    const auto linear = bench::parse_grid("0.1:2.0:20");
    CHECK(linear.size() == 20);
    CHECK(linear.front() == doctest::Approx(0.1));
    CHECK(linear.back() == doctest::Approx(2.0));
    CHECK(bench::parse_grid("5:9:1") == std::vector<double>{5.0});
    CHECK_THROWS_AS(bench::parse_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(bench::parse_grid("1:2:0"), std::invalid_argument);
}

TEST_CASE("fit_loglog_slope recovers exponents") {
    const std::vector<double> x{100, 200, 400, 800, 1600};
    std::vector<double> linear, quadratic;
    for (double v : x) {
        linear.push_back(3.0 * v);
        quadratic.push_back(0.01 * v * v);
    }
    CHECK(bench::fit_loglog_slope(x, linear) == doctest::Approx(1.0));
    CHECK(bench::fit_loglog_slope(x, quadratic) == doctest::Approx(2.0));
    CHECK(std::isnan(bench::fit_loglog_slope({1, 2, 3}, {1, 2, 3})));
}

TEST_CASE("pearson") {
    CHECK(bench::pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
    CHECK(bench::pearson({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(std::isnan(bench::pearson({1, 1}, {2, 3})));
}

TEST_CASE("isotonic non-increasing fit") {
    const std::vector<double> raw{10, 11, 7, 8, 3, 3, 1};
    const auto fitted = bench::isotonic_non_increasing(raw);
    REQUIRE(fitted.size() == raw.size());
    for (std::size_t i = 1; i < fitted.size(); ++i) CHECK(fitted[i] <= fitted[i - 1]);
    CHECK(fitted[0] == doctest::Approx(10.5));
    CHECK(fitted[1] == doctest::Approx(10.5));
    CHECK(fitted.back() == doctest::Approx(1.0));

    // Already monotone input is untouched.
    const std::vector<double> monotone{5, 4, 3, 2};
    CHECK(bench::isotonic_non_increasing(monotone) == monotone);
}

TEST_CASE("scaling experiment structure") {
    bench::ScalingConfig config;
    config.eps = 0.8;
    config.m_fixed = 100;
    const auto result = bench::run_scaling_experiment(
        bench::named_generator("gauss4x3d"), "gauss4x3d", {300, 600}, config);
    // Two sizes, three algorithms.
    CHECK(result.records.size() == 6);
    for (const auto& record : result.records) {
        CHECK(record.status == "ok");
        CHECK(record.clusters >= 0);
        CHECK(record.timings.total_ms() >= 0.0);
    }
    // Too few sizes for a slope.
    CHECK(std::isnan(result.slopes.at("dbscan")));
    CHECK_THROWS_AS(bench::run_scaling_experiment(
                        bench::named_generator("gauss4x3d"), "g", {600, 300}, config),
                    std::invalid_argument);
}

TEST_CASE("tradeoff sweep: ratio 1 matches the dbscan baseline exactly") {
    const LabeledDataset sample = bench::named_generator("gauss2x2d")(1000, 5);
    bench::TradeoffConfig config;
    config.eps = 0.6;
    const auto records = bench::run_tradeoff_sweep(sample, {0.2, 1.0}, config);

    double baseline_ari = -2.0, uniform_full_ari = -3.0;
    std::int64_t baseline_noise = -1, uniform_full_noise = -2;
    for (const auto& r : records) {
        if (r.algorithm == "dbscan") {
            baseline_ari = r.ari;
            baseline_noise = r.noise;
        }
        if (r.algorithm == "dbscanpp-uniform" && r.ratio == 1.0) {
            uniform_full_ari = r.ari;
            uniform_full_noise = r.noise;
        }
    }
    CHECK(baseline_ari == uniform_full_ari);
    CHECK(baseline_noise == uniform_full_noise);
    CHECK(records.size() == 1 + 2 * 2);
}

TEST_CASE("tradeoff runtime grows roughly linearly with the ratio") {
    const LabeledDataset sample = bench::named_generator("gauss2x2d")(20000, 3);
    bench::TradeoffConfig config;
    config.eps = 0.5;
    const std::vector<double> ratios{0.05, 0.1, 0.2, 0.4, 0.8};
    const auto records = bench::run_tradeoff_sweep(sample, ratios, config);

    std::vector<double> xs, ys;
    for (const auto& r : records)
        if (r.algorithm == "dbscanpp-uniform") {
            xs.push_back(r.ratio);
            ys.push_back(r.timings.total_ms());
        }
    REQUIRE(xs.size() == ratios.size());
    CHECK(bench::pearson(xs, ys) >= 0.9);
}

TEST_CASE("eps sweep degenerate ends") {
    const LabeledDataset sample = bench::named_generator("gauss2x2d")(400, 9);
    bench::EpsSweepConfig config;
    config.m_ratio = 0.2;
    const auto result = bench::run_epsilon_sweep(sample, {1e-6, 50.0}, config);

    for (const auto& r : result.records) {
        if (r.eps == 1e-6) {
            // Below the minimum pairwise distance: no cores, everything noise.
            CHECK(r.clusters == 0);
            CHECK(r.noise == 400);
        }
        if (r.eps == 50.0 && r.algorithm == "dbscan") {
            CHECK(r.clusters == 1);
            CHECK(r.noise == 0);
        }
    }
}

TEST_CASE("levelset experiment propagates impossible levels") {
    DensitySpec spec;
    spec.dim = 2;
    spec.weights = {1.0};
    spec.means = {{0.0, 0.0}};
    spec.scales = {1.0};
    bench::LevelSetConfig config;
    config.seeds = 1;
    config.resolution = 0.25;
    CHECK_THROWS_AS(
        bench::run_levelset_experiment(spec, 100.0, {500}, config),
        std::runtime_error);
}

TEST_CASE("levelset minimax m stays within 2x of the full-sample distance") {
    DensitySpec spec;
    spec.dim = 2;
    spec.weights = {0.5, 0.5};
    spec.means = {{-3.0, 0.0}, {3.0, 0.0}};
    spec.scales = {1.0, 1.0};
    const double lambda = 0.5 * spec.peak_density();

    bench::LevelSetConfig config;
    config.seeds = 5;
    config.resolution = 0.1;
    const std::vector<std::size_t> sizes{16000};

    const auto minimax = bench::run_levelset_experiment(spec, lambda, sizes, config);
    bench::LevelSetConfig full = config;
    full.m_full = true;
    const auto dense = bench::run_levelset_experiment(spec, lambda, sizes, full);

    const double a = minimax.median_hausdorff.at(16000);
    const double b = dense.median_hausdorff.at(16000);
    CHECK(a <= 2.0 * b);
    CHECK(b <= 2.0 * a);
}

TEST_CASE("record writers produce stable tables") {
    bench::BenchRecord record;
    record.experiment = "unit";
    record.algorithm = "dbscan";
    record.dataset = "demo";
    record.n = 10;
    record.d = 2;
    record.eps = 0.5;
    record.min_pts = 10;
    record.status = "ok";
    record.clusters = 2;
    record.noise = 1;
    record.timings.core_detection_ms = 1.25;

    const auto csv_path = fs::temp_directory_path() / "dbscanpp_records.csv";
    const auto jsonl_path = fs::temp_directory_path() / "dbscanpp_records.jsonl";
    bench::write_records_csv(csv_path, {record});
    bench::write_records_jsonl(jsonl_path, {record}, true);

    std::ifstream csv(csv_path);
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header.find("experiment,algorithm,dataset") == 0);
    CHECK(row.find("unit,dbscan,demo,10,2,0.5") == 0);

    std::ifstream jsonl(jsonl_path);
    std::string line;
    std::getline(jsonl, line);
    CHECK(line.find("\"algorithm\":\"dbscan\"") != std::string::npos);
    // strip_timings zeroes the clocks.
    CHECK(line.find("\"core_detection\":0.0") != std::string::npos);
    fs::remove(csv_path);
    fs::remove(jsonl_path);

    const auto plot_path = fs::temp_directory_path() / "dbscanpp_plot.csv";
    bench::write_plot_csv(plot_path, {{1.0, "dbscan", 2.0}});
    std::ifstream plot(plot_path);
    std::getline(plot, line);
    CHECK(line == "x,series,y");
    std::getline(plot, line);
    CHECK(line == "1,dbscan,2");
    fs::remove(plot_path);
}
