#pragma once

#include <cstddef>
#include <vector>

#include "stalker/rng_paths.hpp"

namespace stalker {

// Parameters of the pursuit ODE  f' = (c + b - f)^(-gamma)  with c = 1 + shift.
// shift = 0 is the real follower; the +-2*eps variants bound it from either
// side when comparing skeletons of different resolution.
struct DriftParams {
    double gamma = 1.0;
    double shift = 0.0;

    double c() const { return 1.0 + shift; }
};

// Distance covered by the chaser after time t, starting b >= 0 behind.
// Closed form: b + c - ((b+c)^(g+1) - (g+1) t)^(1/(g+1)).  Throws
// std::domain_error off the region where that expression is meaningful.
double hbar(double t, double b, const DriftParams& params);

// Remaining distance after time t as a total function: clamps to 0 once
// contact is reached and for non-positive b.
double h_dist(double t, double b, const DriftParams& params);

// Time at which a chase from distance b reaches contact (h_dist hits 0).
double contact_time(double b, const DriftParams& params);

// Follower of a skeleton, stored at jump-minus instants only; values between
// jumps are reconstructed from the closed form on demand.
struct StalkerTrajectory {
    double epsilon = 0.0;
    double horizon = 0.0;
    DriftParams params;
    bool reflected = false;          // true: upper follower (runs above the level)
    std::vector<double> jump_times;  // copied from the skeleton
    std::vector<double> levels;
    std::vector<double> x_at_jump_minus;

    // position at an arbitrary time in [0, horizon]
    double value_at(double t) const;
};

// Run the follower over a skeleton.  reflect = false gives the lower process
// X (stays <= level), reflect = true the upper process Y (= -X applied to the
// mirrored skeleton).  start is the position at time 0-.
StalkerTrajectory evolve(const Skeleton& skeleton, const DriftParams& params,
                         bool reflect = false, double start = 0.0);

// Resolution-coupling report for one driving path observed at two skeleton
// resolutions.
struct ConvergenceReport {
    double sup_diff = 0.0;  // max |X_eps' - X_eps| on the fine grid of [0, t_star]
    double bound = 0.0;     // eps * exp(gamma * t_star)
    std::vector<double> per_jump_gaps;   // X_eps' - X_eps at coarse jump times
    std::vector<double> per_jump_dists;  // level - X_eps at coarse jump times
};

std::vector<ConvergenceReport> convergence_experiment(double gamma, double eps,
                                                      double eps_prime,
                                                      double t_star,
                                                      std::size_t paths,
                                                      RngStream& rng,
                                                      int threads = 1);

// Trajectory values on the regular grid {0, dt, ..., n*dt}; walks the
// segments once instead of binary-searching per point.
std::vector<double> sample_on_grid(const StalkerTrajectory& traj, double dt,
                                   std::size_t n_points);

}  // namespace stalker
