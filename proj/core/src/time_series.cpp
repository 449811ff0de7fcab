#include "sparseode/time_series.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

namespace sparseode {

void TimeSeries::validate() const {
    if (values.rows() != times.size())
        throw ShapeMismatch("values has " + std::to_string(values.rows()) +
                            " rows for " + std::to_string(times.size()) + " times");
    if (!names.empty() && static_cast<int>(names.size()) != p())
        throw ShapeMismatch("got " + std::to_string(names.size()) + " names for " +
                            std::to_string(p()) + " columns");
    for (int i = 0; i < n(); ++i) {
        if (!std::isfinite(times[i]))
            throw ValidationError("non-finite time at row " + std::to_string(i + 1));
        if (times[i] < 0.0 || times[i] > 1.0)
            throw ValidationError("time " + std::to_string(times[i]) +
                                  " outside [0, 1] at row " + std::to_string(i + 1));
        if (i > 0 && times[i] <= times[i - 1])
            throw NonMonotoneTimes("times not strictly increasing at row " +
                                   std::to_string(i + 1));
    }
    if (!values.allFinite()) throw ValidationError("non-finite value in series");
    std::unordered_set<std::string> seen;
    for (const auto& name : names)
        if (!seen.insert(name).second)
            throw DuplicateColumnName("duplicate column name '" + name + "'");
}

RescaledSeries rescale_times(const TimeSeries& raw) {
    const int n = raw.n();
    if (n < 2) throw ValidationError("need at least two observations to rescale");
    for (int i = 1; i < n; ++i)
        if (!(raw.times[i] > raw.times[i - 1]))
            throw NonMonotoneTimes("times not strictly increasing at row " +
                                   std::to_string(i + 1));

    RescaledSeries out;
    out.t_min = raw.times[0];
    out.t_max = raw.times[n - 1];
    out.ts.values = raw.values;
    out.ts.names = raw.names;
    out.ts.times.resize(n);
    const double span = out.t_max - out.t_min;
    for (int i = 0; i < n; ++i)
        out.ts.times[i] = (raw.times[i] - out.t_min) / span;
    // Pin the endpoints exactly; interior points keep the computed values.
    out.ts.times[0] = 0.0;
    out.ts.times[n - 1] = 1.0;
    out.ts.validate();
    return out;
}

}  // namespace sparseode
