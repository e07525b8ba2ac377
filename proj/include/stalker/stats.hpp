#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace stalker {

// A scalar time series with a human-readable label.
struct SeriesRecord {
    std::vector<double> times;
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
};

// First differences of a series; entry i carries the time of values[i+1].
SeriesRecord returns(const SeriesRecord& series);

// Sample autocorrelation of the windowed-|value| series: the input is split
// into consecutive windows, each reduced to its mean absolute value, and the
// ACF of that reduced series is returned for lags 0..max_lag (lag as "time").
SeriesRecord volatility_autocorr(const SeriesRecord& rets, std::size_t window,
                                 std::size_t max_lag);

// Excess kurtosis (0 for a normal sample, in expectation).
double excess_kurtosis(const std::vector<double>& values);

struct RecurrenceReport {
    double radius = 0.0;
    double last_exit = 0.0;        // last time the series was inside [0, radius]
    std::size_t visit_count = 0;   // samples with value <= radius
    double growth_exponent = 0.0;  // log-log slope over the final half
};

// Recurrence-vs-transience summary of a nonnegative distance series.
RecurrenceReport recurrence_diagnostics(const SeriesRecord& series, double radius);

}  // namespace stalker
