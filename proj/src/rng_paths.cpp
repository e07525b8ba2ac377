#include "stalker/rng_paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace stalker {

namespace {

constexpr double kPi = 3.141592653589793238463;

// Regime switch for the two series; both are accurate to ~1e-16 here.
constexpr double kSeriesSwitch = 0.5;

double cdf_large_t(double t) {
    // 1 - (4/pi) sum (-1)^n/(2n+1) exp(-(2n+1)^2 pi^2 t / 8)
    double a = kPi * kPi * t / 8.0;
    double s = 0.0;
    for (int n = 0; n < 64; ++n) {
        double m = 2.0 * n + 1.0;
        double term = std::exp(-m * m * a) / m;
        s += (n % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return 1.0 - (4.0 / kPi) * s;
}

double cdf_small_t(double t) {
    // 2 sum (-1)^k erfc((2k+1)/sqrt(2t))
    double inv = 1.0 / std::sqrt(2.0 * t);
    double s = 0.0;
    for (int k = 0; k < 64; ++k) {
        double m = 2.0 * k + 1.0;
        double term = std::erfc(m * inv);
        s += (k % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return 2.0 * s;
}

double pdf_large_t(double t) {
    double a = kPi * kPi * t / 8.0;
    double s = 0.0;
    for (int n = 0; n < 64; ++n) {
        double m = 2.0 * n + 1.0;
        double term = m * std::exp(-m * m * a);
        s += (n % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return (kPi / 2.0) * s;
}

double pdf_small_t(double t) {
    double s = 0.0;
    for (int k = 0; k < 64; ++k) {
        double m = 2.0 * k + 1.0;
        double term = m * std::exp(-m * m / (2.0 * t));
        s += (k % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::sqrt(2.0 / kPi) * std::pow(t, -1.5) * s;
}

double survival_large_t(double t) {
    double a = kPi * kPi * t / 8.0;
    double s = 0.0;
    for (int n = 0; n < 64; ++n) {
        double m = 2.0 * n + 1.0;
        double term = std::exp(-m * m * a) / m;
        s += (n % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return (4.0 / kPi) * s;
}

// Bisection inverse of the cdf; only used off the cached table, and to build
// the table itself.
double invert_cdf_bisect(double u, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (exit_time_cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// For t >= 3 the survival series is one-term dominated, so the quantile has
// a closed inversion up to a ~1e-13 correction handled by one fixed-point
// pass.
double quantile_tail(double u) {
    double s = 1.0 - u;
    double inv_a = 8.0 / (kPi * kPi);
    double t = inv_a * std::log((4.0 / kPi) / s);
    for (int i = 0; i < 2; ++i) {
        double e8 = std::exp(-kPi * kPi * t);  // ratio of term 2 to term 1
        double e24 = e8 * e8 * e8;
        t = inv_a * (std::log((4.0 / kPi) / s) + std::log1p(-e8 / 3.0 + e24 / 5.0));
    }
    return t;
}

// Monotone cubic (Fritsch-Carlson) interpolation table for the quantile on a
// uniform u-grid.  Covers the bulk of the distribution; tails are inverted
// directly from the series.
struct QuantileTable {
    static constexpr int kKnots = 4096;
    double u_lo, u_hi, du, inv_du;
    std::vector<double> t;  // knot values
    std::vector<double> m;  // knot slopes dt/du

    QuantileTable() {
        // Below t = 0.1 the cdf is so flat that a uniform u-grid cannot
        // resolve the quantile; that sliver (u ~ 3e-3 of mass) stays on the
        // bisection path instead.
        u_lo = exit_time_cdf(0.1);
        u_hi = exit_time_cdf(3.0);
        du = (u_hi - u_lo) / (kKnots - 1);
        inv_du = 1.0 / du;
        t.resize(kKnots);
        m.resize(kKnots);
        double lo = 0.05;
        for (int j = 0; j < kKnots; ++j) {
            double u = u_lo + du * j;
            double tj = invert_cdf_bisect(u, lo, 3.5);
            t[j] = tj;
            lo = tj;  // quantile is increasing; shrink the bracket
        }
        // Exact knot slopes dt/du = 1/pdf, clamped into the Fritsch-Carlson
        // region so the interpolant stays monotone even where the grid is
        // coarse relative to the curvature.
        std::vector<double> d(kKnots - 1);
        for (int j = 0; j + 1 < kKnots; ++j) d[j] = (t[j + 1] - t[j]) * inv_du;
        for (int j = 0; j < kKnots; ++j) {
            double cap = 3.0 * ((j == 0) ? d[0]
                                : (j == kKnots - 1) ? d[kKnots - 2]
                                                    : std::min(d[j - 1], d[j]));
            m[j] = std::min(1.0 / exit_time_pdf(t[j]), cap);
        }
    }

    double eval(double u) const {
        double x = (u - u_lo) * inv_du;
        int j = static_cast<int>(x);
        if (j < 0) j = 0;
        if (j > kKnots - 2) j = kKnots - 2;
        double s = x - j;
        double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        double h10 = s * (1.0 - s) * (1.0 - s);
        double h01 = s * s * (3.0 - 2.0 * s);
        double h11 = s * s * (s - 1.0);
        return h00 * t[j] + h01 * t[j + 1] + du * (h10 * m[j] + h11 * m[j + 1]);
    }
};

const QuantileTable& quantile_table() {
    static const QuantileTable table;
    return table;
}

}  // namespace

FinePath gen_fine_path(double horizon, double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("gen_fine_path: dt must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("gen_fine_path: horizon must be positive");
    if (dt > horizon) throw std::invalid_argument("gen_fine_path: dt exceeds horizon");
    auto n_steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
    FinePath path;
    path.dt = dt;
    path.values.resize(n_steps + 1);
    path.values[0] = 0.0;
    double sd = std::sqrt(dt);
    double x = 0.0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        x += sd * rng.gauss();
        path.values[i] = x;
    }
    return path;
}

Skeleton extract_skeleton(const FinePath& path, double epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("extract_skeleton: epsilon must be positive");
    if (path.values.size() < 2 || !(path.dt > 0.0))
        throw std::invalid_argument("extract_skeleton: path is empty");
    if (path.dt > epsilon * epsilon / 100.0 * (1.0 + 1e-9)) {
        std::fprintf(stderr,
                     "extract_skeleton: dt=%g is coarse relative to epsilon^2=%g; "
                     "crossing times will be biased\n",
                     path.dt, epsilon * epsilon);
    }
    Skeleton sk;
    sk.epsilon = epsilon;
    sk.horizon = path.horizon();
    sk.jump_times.push_back(0.0);
    sk.levels.push_back(path.values[0]);
    double level = path.values[0];
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        double diff = path.values[i] - level;
        if (diff >= epsilon || diff <= -epsilon) {
            level += (diff > 0.0) ? epsilon : -epsilon;
            sk.jump_times.push_back(path.dt * static_cast<double>(i));
            sk.levels.push_back(level);
        }
    }
    return sk;
}

double exit_time_cdf(double t) {
    if (t <= 0.0) return 0.0;
    return (t < kSeriesSwitch) ? cdf_small_t(t) : cdf_large_t(t);
}

double exit_time_pdf(double t) {
    if (t <= 0.0) return 0.0;
    return (t < kSeriesSwitch) ? pdf_small_t(t) : pdf_large_t(t);
}

double exit_time_survival(double t) {
    if (t <= 0.0) return 1.0;
    return (t < kSeriesSwitch) ? 1.0 - cdf_small_t(t) : survival_large_t(t);
}

double exit_time_quantile(double u) {
    if (!(u >= 0.0) || u >= 1.0)
        throw std::invalid_argument("exit_time_quantile: u must lie in [0,1)");
    if (u == 0.0) return 0.0;
    const QuantileTable& tab = quantile_table();
    if (u > tab.u_hi) return quantile_tail(u);
    if (u < tab.u_lo) return invert_cdf_bisect(u, 1e-8, 0.12);
    return tab.eval(u);
}

double sample_exit_time(double epsilon, RngStream& rng) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("sample_exit_time: epsilon must be positive");
    return epsilon * epsilon * exit_time_quantile(rng.uniform());
}

ExitTailBounds exit_tail_bounds(double epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("exit_tail_bounds: epsilon must be positive");
    ExitTailBounds b;
    b.upper = (4.0 / kPi) * std::exp(-kPi * kPi / (8.0 * epsilon));
    b.lower = b.upper * (1.0 - std::exp(-kPi * kPi / epsilon) / 3.0);
    return b;
}

double exit_laplace(double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("exit_laplace: alpha must be >= 0");
    double r = std::sqrt(2.0 * alpha);
    if (r > 700.0) return 2.0 * std::exp(-r);  // cosh would overflow
    return 1.0 / std::cosh(r);
}

}  // namespace stalker
