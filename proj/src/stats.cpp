#include "stalker/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace stalker {

SeriesRecord returns(const SeriesRecord& series) {
    if (series.values.size() < 2)
        throw std::invalid_argument("returns: need at least 2 samples");
    if (series.times.size() != series.values.size())
        throw std::invalid_argument("returns: times/values length mismatch");
    SeriesRecord out;
    out.label = series.label + ".returns";
    std::size_t n = series.values.size() - 1;
    out.times.resize(n);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.times[i] = series.times[i + 1];
        out.values[i] = series.values[i + 1] - series.values[i];
    }
    return out;
}

SeriesRecord volatility_autocorr(const SeriesRecord& rets, std::size_t window,
                                 std::size_t max_lag) {
    if (window == 0) throw std::invalid_argument("volatility_autocorr: window must be >= 1");
    std::size_t n_w = rets.values.size() / window;
    if (n_w < 3 || n_w <= max_lag)
        throw std::invalid_argument(
            "volatility_autocorr: series too short for this window/max_lag");

    std::vector<double> vol(n_w);
    for (std::size_t w = 0; w < n_w; ++w) {
        double s = 0.0;
        for (std::size_t i = 0; i < window; ++i)
            s += std::abs(rets.values[w * window + i]);
        vol[w] = s / static_cast<double>(window);
    }
    double mean = 0.0;
    for (double v : vol) mean += v;
    mean /= static_cast<double>(n_w);
    double var = 0.0;
    for (double v : vol) var += (v - mean) * (v - mean);

    SeriesRecord out;
    out.label = rets.label + ".volacf";
    out.times.resize(max_lag + 1);
    out.values.resize(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < n_w; ++i)
            c += (vol[i] - mean) * (vol[i + lag] - mean);
        out.times[lag] = static_cast<double>(lag);
        out.values[lag] = (var > 0.0) ? c / var : (lag == 0 ? 1.0 : 0.0);
    }
    return out;
}

double excess_kurtosis(const std::vector<double>& values) {
    if (values.size() < 4)
        throw std::invalid_argument("excess_kurtosis: need at least 4 samples");
    double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) throw std::invalid_argument("excess_kurtosis: series is constant");
    return m4 / (m2 * m2) - 3.0;
}

RecurrenceReport recurrence_diagnostics(const SeriesRecord& series, double radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("recurrence_diagnostics: radius must be positive");
    if (series.values.empty() || series.times.size() != series.values.size())
        throw std::invalid_argument("recurrence_diagnostics: malformed series");

    RecurrenceReport rep;
    rep.radius = radius;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (series.values[i] <= radius) {
            ++rep.visit_count;
            rep.last_exit = series.times[i];
        }
    }

    // log-log slope over the final half, skipping nonpositive entries
    std::size_t lo = series.values.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = lo; i < series.values.size(); ++i) {
        if (series.values[i] <= 0.0 || series.times[i] <= 0.0) continue;
        double x = std::log(series.times[i]);
        double y = std::log(series.values[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        double denom = static_cast<double>(m) * sxx - sx * sx;
        if (denom > 0.0) rep.growth_exponent = (static_cast<double>(m) * sxy - sx * sy) / denom;
    }
    return rep;
}

}  // namespace stalker
