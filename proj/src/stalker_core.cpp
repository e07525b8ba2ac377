#include "stalker/stalker_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stalker/detail/powg.hpp"
#include "stalker/util.hpp"

namespace stalker {

using detail::pow_gp1;
using detail::root_gp1;

namespace {

void check_params(const DriftParams& p, const char* who) {
    if (!(p.gamma > 0.0)) throw std::invalid_argument(std::string(who) + ": gamma must be positive");
    if (!(p.c() > 0.0)) throw std::invalid_argument(std::string(who) + ": shift must exceed -1");
}

}  // namespace

double hbar(double t, double b, const DriftParams& params) {
    check_params(params, "hbar");
    if (!(t >= 0.0)) throw std::invalid_argument("hbar: t must be >= 0");
    if (!(b >= 0.0)) throw std::domain_error("hbar: b must be >= 0");
    double c = params.c();
    double rad = pow_gp1(b + c, params.gamma) - (params.gamma + 1.0) * t;
    double floor_rad = pow_gp1(c, params.gamma);
    if (rad < floor_rad * (1.0 - 1e-12))
        throw std::domain_error("hbar: t beyond the contact time for this b");
    if (rad < floor_rad) rad = floor_rad;
    return b + c - root_gp1(rad, params.gamma);
}

double h_dist(double t, double b, const DriftParams& params) {
    check_params(params, "h_dist");
    if (!(t >= 0.0)) throw std::invalid_argument("h_dist: t must be >= 0");
    if (b <= 0.0) return 0.0;
    double c = params.c();
    double rad = pow_gp1(b + c, params.gamma) - (params.gamma + 1.0) * t;
    if (rad <= 0.0) return 0.0;  // defensive: cannot occur before contact, c > 0
    double d = root_gp1(rad, params.gamma) - c;
    return d > 0.0 ? d : 0.0;
}

double contact_time(double b, const DriftParams& params) {
    check_params(params, "contact_time");
    if (b <= 0.0) return 0.0;
    double c = params.c();
    return (pow_gp1(b + c, params.gamma) - pow_gp1(c, params.gamma)) /
           (params.gamma + 1.0);
}

StalkerTrajectory evolve(const Skeleton& skeleton, const DriftParams& params,
                         bool reflect, double start) {
    check_params(params, "evolve");
    if (skeleton.levels.empty() || skeleton.levels.size() != skeleton.jump_times.size())
        throw std::invalid_argument("evolve: malformed skeleton");

    StalkerTrajectory traj;
    traj.epsilon = skeleton.epsilon;
    traj.horizon = skeleton.horizon;
    traj.params = params;
    traj.reflected = reflect;
    traj.jump_times = skeleton.jump_times;
    traj.levels = skeleton.levels;
    traj.x_at_jump_minus.resize(skeleton.levels.size());
    traj.x_at_jump_minus[0] = start;

    // The upper follower is the mirror image of the lower one, so run the
    // recursion on the negated levels and flip the sign again on output.
    double sgn = reflect ? -1.0 : 1.0;
    double x = sgn * start;
    for (std::size_t i = 0; i + 1 < skeleton.levels.size(); ++i) {
        double level = sgn * skeleton.levels[i];
        x = level - h_dist(skeleton.segment_duration(i), level - x, params);
        traj.x_at_jump_minus[i + 1] = sgn * x;
    }
    return traj;
}

double StalkerTrajectory::value_at(double t) const {
    if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12))
        throw std::invalid_argument("value_at: t outside [0, horizon]");
    // segment with jump_times[i] <= t
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - jump_times.begin()) - 1;
    double sgn = reflected ? -1.0 : 1.0;
    double level = sgn * levels[i];
    double xin = sgn * x_at_jump_minus[i];
    return sgn * (level - h_dist(t - jump_times[i], level - xin, params));
}

std::vector<double> sample_on_grid(const StalkerTrajectory& traj, double dt,
                                   std::size_t n_points) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_on_grid: dt must be positive");
    std::vector<double> out(n_points);
    double sgn = traj.reflected ? -1.0 : 1.0;
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n_points; ++j) {
        double t = dt * static_cast<double>(j);
        while (seg + 1 < traj.jump_times.size() && traj.jump_times[seg + 1] <= t) ++seg;
        double level = sgn * traj.levels[seg];
        double xin = sgn * traj.x_at_jump_minus[seg];
        out[j] = sgn * (level - h_dist(t - traj.jump_times[seg], level - xin, traj.params));
    }
    return out;
}

std::vector<ConvergenceReport> convergence_experiment(double gamma, double eps,
                                                      double eps_prime,
                                                      double t_star,
                                                      std::size_t paths,
                                                      RngStream& rng,
                                                      int threads) {
    if (!(gamma > 0.0)) throw std::invalid_argument("convergence_experiment: gamma must be positive");
    if (!(t_star > 0.0)) throw std::invalid_argument("convergence_experiment: t_star must be positive");
    if (!(eps_prime > 0.0) || !(eps_prime < eps))
        throw std::invalid_argument("convergence_experiment: need 0 < eps_prime < eps");
    if (paths == 0) throw std::invalid_argument("convergence_experiment: paths must be >= 1");
    // The coupling estimate degrades like exp(gamma t); insist on a scale
    // separation that keeps the bound meaningful.
    if (eps > 0.1 * std::exp(-gamma * t_star))
        throw std::invalid_argument(
            "convergence_experiment: eps too large for this horizon "
            "(need eps <= 0.1*exp(-gamma*t_star))");

    double dt = eps_prime * eps_prime / 100.0;
    double bound = eps * std::exp(gamma * t_star);
    DriftParams params{gamma, 0.0};

    std::vector<ConvergenceReport> reports(paths);
    std::uint64_t seed = rng.seed();
    std::uint64_t base = rng.stream_id();
    parallel_for(paths, threads, [&](std::size_t p) {
        RngStream local(seed, base + 1 + p);
        FinePath path = gen_fine_path(t_star, dt, local);
        Skeleton coarse = extract_skeleton(path, eps);
        Skeleton fine = extract_skeleton(path, eps_prime);
        StalkerTrajectory xc = evolve(coarse, params);
        StalkerTrajectory xf = evolve(fine, params);

        std::size_t n = path.values.size();
        std::vector<double> gc = sample_on_grid(xc, dt, n);
        std::vector<double> gf = sample_on_grid(xf, dt, n);
        ConvergenceReport rep;
        rep.bound = bound;
        for (std::size_t i = 0; i < n; ++i)
            rep.sup_diff = std::max(rep.sup_diff, std::abs(gf[i] - gc[i]));
        rep.per_jump_gaps.resize(coarse.jump_times.size());
        rep.per_jump_dists.resize(coarse.jump_times.size());
        for (std::size_t i = 0; i < coarse.jump_times.size(); ++i) {
            double t = coarse.jump_times[i];
            double xe = xc.value_at(t);
            rep.per_jump_gaps[i] = xf.value_at(t) - xe;
            rep.per_jump_dists[i] = coarse.levels[i] - xe;
        }
        reports[p] = std::move(rep);
    });
    return reports;
}

}  // namespace stalker
