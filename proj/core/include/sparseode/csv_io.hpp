#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sparseode/errors.hpp"
#include "sparseode/simulation.hpp"
#include "sparseode/time_series.hpp"

namespace sparseode {

// Full-precision decimal rendering (17 significant digits): parsing the
// result with strtod gives back the same double.
std::string format_full(double x);

// Reads `time,<name>,...` rows, validates, and rescales times onto [0, 1].
// ParseError names the offending 1-based line.
RescaledSeries ingest_timeseries(const std::filesystem::path& path);

// Header `time,m1,...,mp` (or the given names), 17 significant digits.
void write_series_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& times,
                      const Eigen::MatrixXd& values,
                      const std::vector<std::string>& names = {});

// Nonzero entries as 1-based `row,col,coefficient` triplets.
void write_adjacency_csv(const std::filesystem::path& path,
                         const Eigen::MatrixXd& A, double tol = 0.0);

Eigen::MatrixXd read_adjacency_csv(const std::filesystem::path& path, int p);

// One `estimator,n,replicates,amse_mean,amse_stderr,avg_nonzero` row per
// estimator.
void write_benchmark_report_csv(const std::filesystem::path& path,
                                const BenchmarkReport& report);

// `source,target` rows, optional header.
std::vector<std::pair<std::string, std::string>> read_edge_list(
    const std::filesystem::path& path);

}  // namespace sparseode
