#include "dbscanpp/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbscanpp::params {

void LevelSetParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
}

double unit_ball_volume(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
    const double half = static_cast<double>(dim) / 2.0;
    return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

double c_delta_n(double delta, std::size_t n) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("c_delta_n: delta must be in (0, 1)");
    if (n < 2) throw std::invalid_argument("c_delta_n: n must be >= 2");
    return 16.0 * std::log(2.0 / delta) * std::sqrt(std::log(static_cast<double>(n)));
}

double epsilon_for_level(double lambda, int min_pts, std::size_t n,
                         std::size_t dim, double c) {
    if (!(lambda > 0.0)) throw std::invalid_argument("epsilon_for_level: lambda must be > 0");
    if (min_pts < 1) throw std::invalid_argument("epsilon_for_level: min_pts must be >= 1");
    if (c < 0.0) throw std::invalid_argument("epsilon_for_level: c must be >= 0");
    if (n < 1) throw std::invalid_argument("epsilon_for_level: n must be >= 1");

    const double root = std::sqrt(static_cast<double>(min_pts));
    if (root <= c * c)
        throw std::invalid_argument(
            "epsilon_for_level: minPts too small for this confidence level");
    const double level = lambda - lambda * c * c / root;
    const double denom = static_cast<double>(n) * unit_ball_volume(dim) * level;
    return std::pow(static_cast<double>(min_pts) / denom,
                    1.0 / static_cast<double>(dim));
}

std::size_t m_schedule(std::size_t n, std::size_t dim, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("m_schedule: p must be in (0, 1]");
    const double exponent =
        static_cast<double>(dim) / (static_cast<double>(dim) + 4.0);
    const double raw = std::floor(p * std::pow(static_cast<double>(n), exponent));
    const auto m = static_cast<std::size_t>(std::max(raw, 1.0));
    return std::min(m, n);
}

std::size_t m_minimax(std::size_t n, std::size_t dim, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("m_minimax: beta must be > 0");
    const double exponent =
        static_cast<double>(dim) / (2.0 * beta + static_cast<double>(dim));
    const double raw = std::ceil(std::pow(static_cast<double>(n), exponent));
    const auto m = static_cast<std::size_t>(std::max(raw, 1.0));
    return std::min(m, n);
}

int minpts_default() { return 10; }

MinPtsWindow minpts_window(std::size_t n, std::size_t dim, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("minpts_window: beta must be > 0");
    if (n < 2) throw std::invalid_argument("minpts_window: n must be >= 2");
    const double log_n = std::log(static_cast<double>(n));
    const double d = static_cast<double>(dim);
    const double lower = log_n * log_n;
    const double upper = std::pow(log_n, 2.0 * d / (2.0 + d)) *
                         std::pow(static_cast<double>(n), 2.0 * beta / (2.0 * beta + d));
    return {lower, upper};
}

}  // namespace dbscanpp::params
