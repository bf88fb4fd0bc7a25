#pragma once

#include <cstddef>

namespace dbscanpp::params {

// Density level, confidence, and boundary-regularity exponent used by the
// level-set oriented parameter rules.
struct LevelSetParams {
    double lambda = 1.0;  // density level, > 0
    double delta = 0.05;  // confidence, in (0, 1)
    double beta = 1.0;    // regularity exponent, > 0

    void validate() const;
};

// Volume of the unit ball in R^D: pi^(D/2) / Gamma(D/2 + 1).
double unit_ball_volume(std::size_t dim);

// 16 * log(2/delta) * sqrt(log n), natural logs.
double c_delta_n(double delta, std::size_t n);

// Radius targeting density level lambda:
//   (min_pts / (n * v_D * (lambda - lambda * c^2 / sqrt(min_pts))))^(1/D).
// Pass c = c_delta_n(delta, n), or a smaller constant directly; throws when
// sqrt(min_pts) <= c^2 (the formula leaves its validity region).
double epsilon_for_level(double lambda, int min_pts, std::size_t n,
                         std::size_t dim, double c);

// floor(p * n^(D/(D+4))), clamped to [1, n].
std::size_t m_schedule(std::size_t n, std::size_t dim, double p);

// ceil(n^(D/(2*beta+D))), clamped to [1, n]: smallest sample-size order that
// keeps the level-set estimation rate at its n-driven term.
std::size_t m_minimax(std::size_t n, std::size_t dim, double beta);

// Default density threshold used by every CLI entry point.
int minpts_default();

// Diagnostic only: the admissible min_pts window with both unknown
// constants set to 1. Reports the window's shape, not a normative bound.
struct MinPtsWindow {
    double lower;
    double upper;
};
MinPtsWindow minpts_window(std::size_t n, std::size_t dim, double beta);

}  // namespace dbscanpp::params
