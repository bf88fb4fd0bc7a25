#pragma once

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dbscanpp {

#ifdef _OPENMP
inline int max_threads() { return omp_get_max_threads(); }
inline void set_threads(int n) { omp_set_num_threads(n); }
#else
inline int max_threads() { return 1; }
inline void set_threads(int) {}
#endif

// Wall clock in milliseconds.
class WallTimer {
public:
    WallTimer() : start_(std::chrono::steady_clock::now()) {}

    double elapsed_ms() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace dbscanpp
