#include "stalker/phi_chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stalker/detail/powg.hpp"
#include "stalker/util.hpp"

namespace stalker {

using detail::pow_gp1;
using detail::pow_neg_g;
using detail::root_gp1;

namespace {

void check_state(const PhiState& s, const char* who) {
    if (!(s.x >= 0.0) || !(s.y >= 0.0))
        throw std::invalid_argument(std::string(who) + ": state must lie in the closed quadrant");
}

void check_gamma_eps(double gamma, double eps, const char* who) {
    if (!(gamma > 0.0)) throw std::invalid_argument(std::string(who) + ": gamma must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
}

// Adaptive Simpson with function-value reuse.
template <typename F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 28);
}

}  // namespace

PhiState phi_jump_kernel(const PhiState& state, double eps, bool up) {
    check_state(state, "phi_jump_kernel");
    if (!(eps > 0.0)) throw std::invalid_argument("phi_jump_kernel: eps must be positive");
    if (up) return {state.x + eps, std::max(state.y - eps, 0.0)};
    return {std::max(state.x - eps, 0.0), state.y + eps};
}

PhiState phi_drift(const PhiState& state, double t, double gamma) {
    DriftParams p{gamma, 0.0};
    return {h_dist(t, state.x, p), h_dist(t, state.y, p)};
}

PhiState phi_step(const PhiState& state, double eps, double gamma, RngStream& rng) {
    check_gamma_eps(gamma, eps, "phi_step");
    bool up = (rng.next_u64() >> 63) != 0;
    PhiState jumped = phi_jump_kernel(state, eps, up);
    double sigma = sample_exit_time(eps, rng);
    return phi_drift(jumped, sigma, gamma);
}

LevelSets::LevelSets(int k_) : k(k_) {
    mid = std::pow(4.0, k);
    lo = mid / 4.0;
    hi = mid * 4.0;
}

HittingReport hitting_experiment(const PhiState& start, int k, double gamma,
                                 double eps, std::size_t replicas,
                                 std::uint64_t step_budget, RngStream& rng,
                                 int threads) {
    check_state(start, "hitting_experiment");
    check_gamma_eps(gamma, eps, "hitting_experiment");
    if (replicas == 0) throw std::invalid_argument("hitting_experiment: replicas must be >= 1");
    if (step_budget == 0) throw std::invalid_argument("hitting_experiment: step_budget must be >= 1");
    LevelSets sets(k);
    if (std::abs(start.norm1() - sets.mid) > 1e-9 * sets.mid)
        throw std::invalid_argument("hitting_experiment: start must satisfy x + y = 4^k");

    enum class Outcome : std::uint8_t { hit, miss, censored };
    std::vector<Outcome> outcome(replicas);
    std::vector<std::uint64_t> steps_used(replicas);

    std::uint64_t seed = rng.seed();
    std::uint64_t base = rng.stream_id();
    parallel_for(replicas, threads, [&](std::size_t r) {
        RngStream local(seed, base + 1 + r);
        PhiState s = start;
        Outcome out = Outcome::censored;
        std::uint64_t n = step_budget;
        for (std::uint64_t i = 1; i <= step_budget; ++i) {
            s = phi_step(s, eps, gamma, local);
            double d = s.norm1();
            if (d <= sets.lo) { out = Outcome::hit; n = i; break; }
            if (d >= sets.hi) { out = Outcome::miss; n = i; break; }
        }
        outcome[r] = out;
        steps_used[r] = n;
    });

    HittingReport rep;
    rep.k = k;
    rep.gamma = gamma;
    rep.eps = eps;
    rep.replicas = replicas;
    rep.step_budget = step_budget;
    double step_sum = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        switch (outcome[r]) {
            case Outcome::hit: ++rep.hits; ++rep.decided; step_sum += static_cast<double>(steps_used[r]); break;
            case Outcome::miss: ++rep.decided; step_sum += static_cast<double>(steps_used[r]); break;
            case Outcome::censored: ++rep.censored; break;
        }
    }
    if (rep.decided > 0) {
        rep.estimate = static_cast<double>(rep.hits) / static_cast<double>(rep.decided);
        auto [lo, hi] = wilson_interval(rep.hits, rep.decided);
        rep.ci_lo = lo;
        rep.ci_hi = hi;
        rep.mean_steps = step_sum / static_cast<double>(rep.decided);
    }
    return rep;
}

double gambler_ruin(std::int64_t k) {
    if (k < 1) throw std::invalid_argument("gambler_ruin: k must be >= 1");
    return static_cast<double>(k) / static_cast<double>(k + 1);
}

double axis_escape_probability(int k, double eps) {
    if (k < 0) throw std::invalid_argument("axis_escape_probability: k must be >= 0");
    if (!(eps > 0.0)) throw std::invalid_argument("axis_escape_probability: eps must be positive");
    double fk = std::pow(4.0, k);
    double n = std::floor(3.0 * fk / eps);
    if (n < 1.0)
        throw std::invalid_argument("axis_escape_probability: eps too large, no climb steps");
    double top = fk / 2.0 + n * eps;
    // n-fold product of the worst (largest) climb factor, evaluated in log
    // space; tends to exp(-6/7) from below as eps -> 0.
    return std::exp(n * std::log1p(-eps / top));
}

double drift_speed(const PhiState& state, double gamma) {
    check_state(state, "drift_speed");
    if (!(gamma > 0.0)) throw std::invalid_argument("drift_speed: gamma must be positive");
    double sx = pow_neg_g(1.0 + state.x, gamma);
    double sy = pow_neg_g(1.0 + state.y, gamma);
    return std::sqrt(sx * sx + sy * sy);
}

double tube_boundary(double x, int k, double gamma) {
    if (!(x >= 0.0)) throw std::invalid_argument("tube_boundary: x must be >= 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("tube_boundary: gamma must be positive");
    double base = std::pow(4.0, k - 1);
    double a = pow_gp1(base + 1.0, gamma) + pow_gp1(x + 1.0, gamma) - 1.0;
    return root_gp1(a, gamma) - 1.0;
}

double tube_diameter_lower(int k, double gamma) {
    double w = 2.0 * std::pow(4.0, k);
    return std::sqrt(2.0) * (tube_boundary(w, k, gamma) - w);
}

double test_function(const PhiState& state, double gamma) {
    check_state(state, "test_function");
    if (!(gamma > 0.0)) throw std::invalid_argument("test_function: gamma must be positive");
    double z = root_gp1(pow_gp1(state.x + 1.0, gamma) + pow_gp1(state.y + 1.0, gamma), gamma);
    return 1.0 - 1.0 / z;
}

bool taylor_condition(const PhiState& state, double gamma) {
    check_state(state, "taylor_condition");
    if (!(gamma > 0.0)) throw std::invalid_argument("taylor_condition: gamma must be positive");
    double a = std::pow(state.x + 1.0, gamma - 1.0);
    double b = std::pow(state.y + 1.0, gamma - 1.0);
    return gamma * (a + b) >= 4.0;
}

GeneratorEstimate generator_gap(const PhiState& state, double eps, double gamma,
                                GeneratorMethod method, std::size_t samples,
                                RngStream* rng) {
    check_state(state, "generator_gap");
    check_gamma_eps(gamma, eps, "generator_gap");

    double g0 = test_function(state, gamma);
    PhiState up = phi_jump_kernel(state, eps, true);
    PhiState dn = phi_jump_kernel(state, eps, false);
    double eps2 = eps * eps;
    // branch-averaged increment of the test function after relaxing for
    // eps^2 * s, with s in units of the unit exit time
    auto increment = [&](double s) {
        double t = eps2 * s;
        return 0.5 * (test_function(phi_drift(up, t, gamma), gamma) +
                      test_function(phi_drift(dn, t, gamma), gamma)) -
               g0;
    };

    GeneratorEstimate est;
    est.method = method;
    if (method == GeneratorMethod::quadrature) {
        auto f = [&](double s) { return exit_time_pdf(s) * increment(s); };
        // main mass, then the exponential tail out to survival ~ 1e-12
        double v = adaptive_simpson(f, 0.0, 10.0, 1e-13);
        v += adaptive_simpson(f, 10.0, 22.5, 1e-14);
        est.value = v;
        est.std_err = exit_time_survival(22.5) + 1e-14;
    } else {
        if (samples < 2) throw std::invalid_argument("generator_gap: monte_carlo needs samples >= 2");
        if (rng == nullptr) throw std::invalid_argument("generator_gap: monte_carlo needs an rng");
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            double v = increment(exit_time_quantile(rng->uniform()));
            sum += v;
            sumsq += v * v;
        }
        double n = static_cast<double>(samples);
        double mean = sum / n;
        double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
        est.value = mean;
        est.std_err = std::sqrt(var / n);
    }
    return est;
}

TubeResidenceReport tube_residence_experiment(int k, double eps, double c,
                                              std::size_t replicas,
                                              RngStream& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("tube_residence_experiment: eps must be positive");
    if (!(c > 0.0) || !(c < 1.0))
        throw std::invalid_argument("tube_residence_experiment: c must lie in (0,1)");
    if (replicas == 0)
        throw std::invalid_argument("tube_residence_experiment: replicas must be >= 1");
    double D = (std::sqrt(65.0) - 8.0) / (2.0 * std::sqrt(2.0));
    auto m = static_cast<std::int64_t>(std::floor(D * std::pow(4.0, k) / eps));
    if (m < 1)
        throw std::invalid_argument("tube_residence_experiment: tube narrower than one step");

    TubeResidenceReport rep;
    rep.k = k;
    rep.eps = eps;
    rep.c = c;
    rep.half_width_steps = m;
    rep.expected_steps = static_cast<double>(m) * static_cast<double>(m);
    double cutoff = c * rep.expected_steps;

    std::uint64_t seed = rng.seed();
    std::uint64_t base = rng.stream_id();
    double total = 0.0;
    std::size_t short_count = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
        RngStream local(seed, base + 1 + r);
        std::int64_t pos = 0;
        std::uint64_t steps = 0;
        while (pos > -m && pos < m) {
            pos += (local.next_u64() >> 63) ? 1 : -1;
            ++steps;
        }
        total += static_cast<double>(steps);
        if (static_cast<double>(steps) < cutoff) ++short_count;
    }
    rep.mean_steps = total / static_cast<double>(replicas);
    rep.prob_short = static_cast<double>(short_count) / static_cast<double>(replicas);

    // optimal Chernoff parameter: tanh(u) = c u with u = sqrt(2 alpha)
    double lo = 1e-9, hi = 2.0 / c;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (std::tanh(mid) - c * mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double u = 0.5 * (lo + hi);
    rep.alpha_star = 0.5 * u * u;
    // e^(alpha c) / cosh(u), in log space to survive small c
    double log_cosh = u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
    rep.chernoff_bound = std::exp(rep.alpha_star * c - log_cosh);
    return rep;
}

std::vector<PhiState> phi_states_of(const StalkerTrajectory& lower,
                                    const StalkerTrajectory& upper) {
    if (lower.jump_times.size() != upper.jump_times.size() ||
        lower.levels != upper.levels || lower.reflected || !upper.reflected)
        throw std::invalid_argument(
            "phi_states_of: expects a lower/upper pair from the same skeleton");
    std::vector<PhiState> states(lower.jump_times.size());
    states[0] = {lower.levels[0] - lower.x_at_jump_minus[0],
                 upper.x_at_jump_minus[0] - lower.levels[0]};
    for (std::size_t i = 1; i < states.size(); ++i) {
        double level = lower.levels[i - 1];  // level holding on [jump i-1, jump i)
        states[i] = {level - lower.x_at_jump_minus[i],
                     upper.x_at_jump_minus[i] - level};
    }
    return states;
}

SeriesRecord run_phi_series(const PhiState& start, double eps, double gamma,
                            std::size_t steps, RngStream& rng) {
    check_state(start, "run_phi_series");
    check_gamma_eps(gamma, eps, "run_phi_series");
    SeriesRecord rec;
    rec.label = "phi_distance";
    rec.times.reserve(steps + 1);
    rec.values.reserve(steps + 1);
    rec.times.push_back(0.0);
    rec.values.push_back(start.norm1());
    PhiState s = start;
    double t = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        bool up = (rng.next_u64() >> 63) != 0;
        double sigma = sample_exit_time(eps, rng);
        s = phi_drift(phi_jump_kernel(s, eps, up), sigma, gamma);
        t += sigma;
        rec.times.push_back(t);
        rec.values.push_back(s.norm1());
    }
    return rec;
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilson_interval: n must be >= 1");
    double z = 1.959963984540054;
    double nn = static_cast<double>(n);
    double p = static_cast<double>(hits) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace stalker
