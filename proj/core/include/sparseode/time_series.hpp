#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sparseode/errors.hpp"

namespace sparseode {

// Noisy multivariate trajectory sample: values(i, j) observed at times(i).
struct TimeSeries {
    Eigen::VectorXd times;           // strictly increasing, within [0, 1]
    Eigen::MatrixXd values;          // n x p
    std::vector<std::string> names;  // empty, or one label per column

    int n() const { return static_cast<int>(times.size()); }
    int p() const { return static_cast<int>(values.cols()); }

    // Throws a ValidationError subtype if any invariant is violated.
    void validate() const;
};

// A series whose times were mapped affinely onto [0, 1] (min -> 0, max -> 1),
// together with the original span so the map can be undone. Coefficients
// estimated on the rescaled clock differ from original-time ones by the
// factor duration(): A_original = A_rescaled / duration().
struct RescaledSeries {
    TimeSeries ts;
    double t_min = 0.0;
    double t_max = 1.0;
    double duration() const { return t_max - t_min; }
};

// Identity (bitwise) when times already span [0, 1] exactly.
RescaledSeries rescale_times(const TimeSeries& raw);

}  // namespace sparseode
