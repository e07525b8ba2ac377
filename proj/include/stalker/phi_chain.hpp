#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stalker/stalker_core.hpp"
#include "stalker/stats.hpp"

namespace stalker {

// Distance pair (level - lower follower, upper follower - level) observed at
// jump-minus instants; both coordinates are nonnegative.
struct PhiState {
    double x = 0.0;
    double y = 0.0;

    double norm1() const { return x + y; }
};

// The two equally likely jump branches of the distance chain.
PhiState phi_jump_kernel(const PhiState& state, double eps, bool up);

// Both coordinates relax independently for time t.
PhiState phi_drift(const PhiState& state, double t, double gamma);

// One full transition: fair jump branch, then relaxation over one sampled
// exit time of (-eps, eps).
PhiState phi_step(const PhiState& state, double eps, double gamma, RngStream& rng);

// Nested reference levels around 4^k used by the hitting experiments.
struct LevelSets {
    int k = 1;
    double mid = 4.0;   // states with x+y = mid
    double lo = 1.0;    // target: x+y <= lo  (= 4^(k-1))
    double hi = 16.0;   // escape: x+y >= hi  (= 4^(k+1))

    explicit LevelSets(int k_);
};

struct HittingReport {
    int k = 0;
    double gamma = 0.0;
    double eps = 0.0;
    std::size_t replicas = 0;
    std::size_t decided = 0;
    std::size_t hits = 0;      // reached the inner set first
    std::size_t censored = 0;  // step budget exhausted
    double estimate = 0.0;     // hits / decided
    double ci_lo = 0.0;        // Wilson 95%
    double ci_hi = 0.0;
    double mean_steps = 0.0;   // over decided replicas
    std::uint64_t step_budget = 0;
};

// Estimate P(inner level set is reached before the outer one) from a start
// on the middle set.  Replica r draws from stream (rng.seed, rng.stream+1+r),
// so the result is independent of the thread count.
HittingReport hitting_experiment(const PhiState& start, int k, double gamma,
                                 double eps, std::size_t replicas,
                                 std::uint64_t step_budget, RngStream& rng,
                                 int threads = 1);

// Ruin probability of a fair +-1 walk: P(hit -1 before +k) = k/(k+1).
double gambler_ruin(std::int64_t k);

// Closed-form value of the axis-climb probability: the chance that a
// particle pinned to an axis at height 4^k climbs to 4^(k+1) before ever
// reaching the bisector, in the small-eps normalization. Converges to
// exp(-6/7) as eps -> 0, independently of k.
double axis_escape_probability(int k, double eps);

// Deterministic relaxation speed |(dx/dt, dy/dt)| at a state.
double drift_speed(const PhiState& state, double gamma);

// Image of the lower tube wall: starting from (x, g(x)) both coordinates
// reach (0, 4^(k-1)) simultaneously under the coupled relaxation.
double tube_boundary(double x, int k, double gamma);

// Lower bound on the tube width at the balanced point, normalized by 4^k in
// the caller's checks; equals sqrt(2) * (g(2*4^k) - 2*4^k).
double tube_diameter_lower(int k, double gamma);

// Lyapunov candidate 1 - ||(x+1, y+1)||_{gamma+1}^{-1}, valued in [0, 1).
double test_function(const PhiState& state, double gamma);

enum class GeneratorMethod { quadrature, monte_carlo };

struct GeneratorEstimate {
    double value = 0.0;
    double std_err = 0.0;
    GeneratorMethod method = GeneratorMethod::quadrature;
};

// One-step generator of the chain applied to test_function: averages the two
// jump branches exactly and integrates the relaxation against the exit-time
// law, either by adaptive quadrature of the density series or by Monte
// Carlo over sampled exit times.
GeneratorEstimate generator_gap(const PhiState& state, double eps, double gamma,
                                GeneratorMethod method, std::size_t samples = 0,
                                RngStream* rng = nullptr);

// Sign predictor for the generator via the second-order expansion:
// gamma * ((x+1)^(gamma-1) + (y+1)^(gamma-1)) >= 4.
bool taylor_condition(const PhiState& state, double gamma);

struct TubeResidenceReport {
    int k = 0;
    double eps = 0.0;
    double c = 0.0;
    std::int64_t half_width_steps = 0;  // tube half-width in step units
    double expected_steps = 0.0;        // half_width_steps^2
    double mean_steps = 0.0;            // empirical mean exit step count
    double prob_short = 0.0;            // P(exit count < c * expected_steps)
    double chernoff_bound = 0.0;        // min_a e^(a c) / cosh(sqrt(2a))
    double alpha_star = 0.0;            // minimizing a
};

// Time spent by a fair +-1 walk inside a tube of the guaranteed width, with
// the exponential-moment bound evaluated at its optimal parameter for
// comparison.
TubeResidenceReport tube_residence_experiment(int k, double eps, double c,
                                              std::size_t replicas,
                                              RngStream& rng);

// Distance states at jump-minus instants of a coupled follower pair run on
// one skeleton.
std::vector<PhiState> phi_states_of(const StalkerTrajectory& lower,
                                    const StalkerTrajectory& upper);

// Iterate the chain and record ||state||_1 against accumulated jump times.
SeriesRecord run_phi_series(const PhiState& start, double eps, double gamma,
                            std::size_t steps, RngStream& rng);

// Wilson 95% interval for hits successes out of n trials.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n);

}  // namespace stalker
