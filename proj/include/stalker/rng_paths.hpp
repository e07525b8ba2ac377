#pragma once

#include <vector>

#include "stalker/rng.hpp"

namespace stalker {

// Brownian path sampled on a regular grid of spacing dt; values[i] is the
// position at time i*dt, values[0] = 0.
struct FinePath {
    double dt = 0.0;
    std::vector<double> values;

    double horizon() const { return dt * static_cast<double>(values.size() - 1); }
};

// Piecewise-constant coarse observation of a path: the level starts at the
// path origin and moves by exactly +-epsilon at the recorded jump times.
// jump_times[0] = 0 and levels[0] is the starting level; levels[i] holds on
// [jump_times[i], jump_times[i+1]).
struct Skeleton {
    double epsilon = 0.0;
    double horizon = 0.0;
    std::vector<double> jump_times;
    std::vector<double> levels;

    std::size_t jump_count() const { return jump_times.size() - 1; }
    // duration of segment i (time between jump i and jump i+1)
    double segment_duration(std::size_t i) const {
        return jump_times[i + 1] - jump_times[i];
    }
};

FinePath gen_fine_path(double horizon, double dt, RngStream& rng);

Skeleton extract_skeleton(const FinePath& path, double epsilon);

// First exit time of standard Brownian motion from (-1,1), started at 0.
// cdf/pdf switch between the two classical theta-series representations so
// both tails are cheap and accurate.
double exit_time_cdf(double t);
double exit_time_pdf(double t);
double exit_time_survival(double t);
// Inverse of exit_time_cdf; table-backed in the bulk, series inversion in
// the tails.
double exit_time_quantile(double u);

// One draw of the first exit time of (-eps, eps); equal in law to eps^2
// times the unit exit time, and implemented exactly that way.
double sample_exit_time(double epsilon, RngStream& rng);

struct ExitTailBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Sandwich for P(exit time of (-eps,eps) exceeds eps): the one- and two-term
// truncations of the alternating survival series.
ExitTailBounds exit_tail_bounds(double epsilon);

// E[exp(-alpha * unit exit time)] = 1 / cosh(sqrt(2 alpha))
double exit_laplace(double alpha);

}  // namespace stalker
